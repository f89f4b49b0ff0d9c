#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "cantor/calibrate.hpp"
#include "cantor/common.hpp"
#include "cantor/feasibility.hpp"
#include "cantor/hier.hpp"
#include "cantor/level.hpp"
#include "cantor/potential.hpp"

namespace cantor {

struct TraceRow {
    int n = 0;
    double c_n = 0.0;
    double osc = 0.0;
    double osc_norm = 0.0;   // osc * |alphabet|^n
    double a_min = 1.0;
    double a_max = 1.0;
    double a_mean = 1.0;
    double sup_d23 = std::numeric_limits<double>::quiet_NaN();
    double drift = 0.0;      // |c_n - c_{n-1}|
    double budget = 0.0;     // enforced oscillation budget at n
    bool budget_ok = true;
    int clamped = 0;
    double wall_ms = 0.0;
};

using CalibrationTrace = std::vector<TraceRow>;

struct RunOptions {
    bool hier = false;
    double err_budget = 1e-9;   // hierarchical certified-error budget
    bool diagnostics = false;   // record sup |D2|+|D3| per generation
    bool force = false;         // continue past infeasibility, mark the trace
    bool calibrate = true;      // false: control run with a_k = 1 throughout
    bool skip_feasibility_check = false;
    double ring_tol = 1e-10;
    std::uint64_t point_cap = 1ull << 22;
    std::function<void(int)> progress;
};

struct RunResult {
    GeneratorSpec spec;
    std::shared_ptr<const ParamTree> params;
    Level final_level;
    PotentialProfile final_profile;
    CalibrationTrace trace;
    bool ok = true;           // every budget held and nothing was clamped
    double width = 0.0;       // W used for budgets
    FeasibilityReport feasibility;
    bool precheck_pass = true;  // B2+B3 within the budget-safe level W/N
};

// Iterates expand -> profile -> choose from K_0 to n_max, recording the
// trace and asserting the oscillation budget after each generation.
inline RunResult run_construction(const GeneratorSpec& spec, int n_max, RunOptions opt = {}) {
    if (n_max < 1) throw usage_error("run_construction: n_max must be >= 1");
    if (n_max > spec.max_generation)
        throw usage_error("run_construction: n_max exceeds the generator's max_generation");
    if (ipow_u64(spec.alphabet_size(), n_max) > opt.point_cap)
        throw usage_error("run_construction: |alphabet|^n_max exceeds the configured point cap");

    RunResult res;
    res.spec = spec;
    KernelSpec kernel = kernel_for(spec, opt.ring_tol);
    const double W = increment_width(spec, kernel);
    res.width = W;

    // The analytic B2/B3 are conservative upper bounds; the hard gate is the
    // budget-safe level W/N. The strict margin W/(2N) - (B2+B3) is recorded
    // and the per-generation budget assertions below remain authoritative.
    res.feasibility = feasible(spec, opt.ring_tol);
    if (opt.calibrate && !opt.skip_feasibility_check) {
        double safe_level = res.width / spec.alphabet_size();
        double b23 = res.feasibility.b2 + res.feasibility.b3;
        res.precheck_pass = res.feasibility.window_ok && b23 <= safe_level;
        if (!res.precheck_pass && !opt.force)
            throw infeasibility_error(
                "construction infeasible: B2+B3 " + to_decimal_string(b23) +
                    " exceeds the budget-safe level " + to_decimal_string(safe_level) +
                    " (strict margin " + to_decimal_string(res.feasibility.margin) +
                    "); pass force to continue",
                0, 0, b23, safe_level);
    }

    Level level = root_level(spec);
    PotentialProfile profile;  // empty for K_0 (g_0 = 0)
    double prev_c = 0.0;

    for (int n = 1; n <= n_max; ++n) {
        auto t0 = std::chrono::steady_clock::now();
        TraceRow row;
        row.n = n;

        std::vector<double> new_params;
        if (n == 1) {
            // a_0 = 1 by convention
            new_params.assign(level.size(), 1.0);
        } else if (!opt.calibrate) {
            new_params.assign(level.size(), 1.0);
        } else {
            ChosenParams chosen = choose_parameters(profile, spec, kernel, opt.force, W);
            new_params = std::move(chosen.values);
            row.clamped = chosen.clamped;
            if (chosen.clamped > 0) res.ok = false;
        }
        row.a_min = *std::min_element(new_params.begin(), new_params.end());
        row.a_max = *std::max_element(new_params.begin(), new_params.end());
        double mean = 0.0;
        for (double v : new_params) mean += v;
        row.a_mean = mean / static_cast<double>(new_params.size());

        Level next = expand_level(level, new_params, spec);
        PotentialProfile next_profile =
            opt.hier ? hier_potential_profile(next, kernel, opt.err_budget)
                     : potential_profile(next, kernel);

        row.c_n = next_profile.c_n;
        row.osc = next_profile.oscillation;
        row.osc_norm = next_profile.oscillation / spec.weight(n);
        row.drift = n == 1 ? std::abs(next_profile.c_n) : std::abs(next_profile.c_n - prev_c);
        // approximation error counts against the admissible oscillation
        row.budget = oscillation_budget(spec, kernel, n, W) - 2.0 * next_profile.max_err;
        row.budget_ok = next_profile.oscillation <= row.budget;
        if (opt.calibrate && !row.budget_ok) {
            if (!opt.force)
                throw infeasibility_error(
                    "oscillation budget violated at generation " + std::to_string(n),
                    n, 0, next_profile.oscillation, row.budget);
            res.ok = false;
        }
        if (opt.diagnostics)
            row.sup_d23 = sup_delta23(level, next, kernel);

        prev_c = next_profile.c_n;
        level = std::move(next);
        profile = std::move(next_profile);

        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
        res.trace.push_back(row);
        if (opt.progress) opt.progress(n);
    }

    res.params = level.params;
    res.final_level = std::move(level);
    res.final_profile = std::move(profile);
    return res;
}

// Self-similar control: a_k = 1 everywhere, no budget enforcement.
inline RunResult control_construction(const GeneratorSpec& spec, int n_max, RunOptions opt = {}) {
    opt.calibrate = false;
    opt.force = true;
    return run_construction(spec, n_max, opt);
}

}  // namespace cantor
