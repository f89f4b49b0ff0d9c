#include <doctest.h>

#include "cantor/construct.hpp"
#include "cantor/verify.hpp"

using namespace cantor;

namespace {

const RunResult& reference_run() {
    static RunResult run = [] {
        GeneratorSpec spec = GeneratorSpec::line(2.217, 0.0623, 12);
        return run_construction(spec, 10, RunOptions{});
    }();
    return run;
}

}  // namespace

TEST_CASE("green_at: positive off the set, sane sign at distance 1") {
    const RunResult& run = reference_run();
    Level lvl = build_level(run.spec, run.params, 6);
    PotentialProfile prof = potential_profile(lvl, KernelSpec::log_kernel_spec());
    // y at distance ~1 from a diameter-~1 set: positive, of moderate size
    // (the level constant c_m ~ -2.2 here, so G ~ 2.3 rather than ln 2)
    GreenEstimate g = green_at({0.0, 1.0}, lvl, prof);
    CHECK(g.value > 0.3);
    CHECK(g.value < 5.0);
    CHECK(g.dist_lo <= g.dist_mid);
    CHECK(g.dist_hi >= g.dist_mid);
    // positivity at all tested corkscrew points for m >= 4
    SplitMix64 rng = stream_for(5, 0);
    for (int s = 0; s < 50; ++s) {
        Vec2 y = lvl.points[rng.next() % lvl.size()] + Vec2{0.0, 0.25 * (1.0 + rng.uniform())};
        REQUIRE(green_at(y, lvl, prof).value > 0.0);
    }
    CHECK_THROWS_AS(green_at(lvl.points[0], lvl, prof), domain_error);
}

TEST_CASE("ring estimate: potential on tiny rings around set points") {
    const RunResult& run = reference_run();
    KernelSpec lk = KernelSpec::log_kernel_spec();
    for (int n : {4, 6, 8}) {
        Level lvl = build_level(run.spec, run.params, n);
        PotentialProfile prof = potential_profile(lvl, lk);
        double rad = 0.5 * ipow(run.spec.ratio, n - 1);
        double base = prof.c_n + lvl.weight() * std::log(rad);
        SplitMix64 rng = stream_for(7, n);
        for (int s = 0; s < 16; ++s) {
            std::uint64_t pick = rng.next() % lvl.size();
            double ang = 2.0 * M_PI * rng.uniform();
            Vec2 y = lvl.points[pick] + Vec2{rad * std::cos(ang), rad * std::sin(ang)};
            double dev = std::abs(potential_at(y, lvl, lk) - base) / lvl.weight();
            REQUIRE(dev <= 3.0);  // loose stability envelope; criterion 6 fits C
        }
    }
}

TEST_CASE("green ratio sweep: single point at scale 1 and shallow-level guard") {
    const RunResult& run = reference_run();
    Level lvl = build_level(run.spec, run.params, 8);
    PotentialProfile prof = potential_profile(lvl, KernelSpec::log_kernel_spec());
    GreenSweep one = green_ratio_sweep(lvl, prof, {1.0}, 1, 3);
    CHECK(one.rows.size() == 1);
    CHECK(one.global_min > 0.0);
    CHECK(std::isfinite(one.global_max));
    CHECK_THROWS_AS(green_ratio_sweep(lvl, prof, {1e-9}, 4, 3), usage_error);
}

TEST_CASE("green ratio sweep bounded on calibrated and control sets") {
    const RunResult& run = reference_run();
    PotentialProfile prof = potential_profile(run.final_level, KernelSpec::log_kernel_spec());
    std::vector<double> scales{0.25, 0.0625, 0.015625};
    GreenSweep sweep = green_ratio_sweep(run.final_level, prof, scales, 16, 11);
    CHECK(sweep.global_max / sweep.global_min <= 100.0);

    RunResult ctrl = control_construction(run.spec, 10);
    PotentialProfile cprof = potential_profile(ctrl.final_level, KernelSpec::log_kernel_spec());
    GreenSweep csweep = green_ratio_sweep(ctrl.final_level, cprof, scales, 16, 11);
    CHECK(csweep.global_max / csweep.global_min <= 100.0);  // smoke, not a theorem check
}

TEST_CASE("ahlfors audit: dyadic cells carry the exact mass") {
    const RunResult& run = reference_run();
    Level lvl = build_level(run.spec, run.params, 8);
    AhlforsReport rep = ahlfors_report(lvl, run.spec, 200, 13);
    CHECK_FALSE(rep.degenerate);
    CHECK(rep.min_ratio > 0.0);
    CHECK(rep.max_ratio >= rep.min_ratio);
    // the empirical constant stays within the bracket ratio raised to delta:
    // mass 2^{-k} against radii between the bi-Lipschitz brackets
    double delta = run.spec.delta();
    double bracket = (run.spec.ceiling / (1.0 - run.spec.ratio)) /
                     run.spec.condition_a_value();
    double per_scale_bound = std::pow(bracket, delta);
    // across scales an extra 2^delta slack comes from dyadic rounding
    CHECK(rep.c0_squared <= 8.0 * per_scale_bound * std::pow(2.0, delta));
    // stability across generations
    AhlforsReport next = ahlfors_report(build_level(run.spec, run.params, 10), run.spec, 200, 13);
    CHECK(next.c0_squared <= 2.0 * rep.c0_squared);
    CHECK(rep.c0_squared <= 2.0 * next.c0_squared);
}

TEST_CASE("ahlfors audit flags a degenerate single-point level") {
    GeneratorSpec spec = GeneratorSpec::line(2.217, 0.0623);
    AhlforsReport rep = ahlfors_report(root_level(spec), spec, 10, 1);
    CHECK(rep.degenerate);
}
