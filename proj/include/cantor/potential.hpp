#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cantor/common.hpp"
#include "cantor/kernel.hpp"
#include "cantor/level.hpp"

namespace cantor {

// Per-point potentials g_n(x) = w_n sum_{y != x} e(y-x) plus oscillation
// statistics. c_n is the profile minimum.
struct PotentialProfile {
    int generation = 0;
    std::vector<double> values;
    std::vector<double> err_bounds;  // certified per-point summation error
    double c_n = 0.0;                // min
    double max_value = 0.0;
    double oscillation = 0.0;
    double max_err = 0.0;
    std::string method = "naive";
    double err_budget = std::numeric_limits<double>::quiet_NaN();

    void finalize() {
        c_n = values.empty() ? 0.0 : values[0];
        max_value = c_n;
        for (double v : values) {
            c_n = std::min(c_n, v);
            max_value = std::max(max_value, v);
        }
        oscillation = values.empty() ? 0.0 : max_value - c_n;
        max_err = 0.0;
        for (double e : err_bounds) max_err = std::max(max_err, e);
    }
};

namespace detail {

inline double accumulation_bound(double abs_sum, std::size_t terms) {
    if (terms < 2) return 0.0;
    double levels = std::ceil(std::log2(static_cast<double>(terms))) + 2.0;
    return abs_sum * levels * std::numeric_limits<double>::epsilon();
}

}  // namespace detail

// Exact pairwise summation, excluding self-interaction. Displacements come
// from the word geometry (full relative precision at any depth). Data-parallel
// over target points with a fixed-shape per-point reduction, so the result is
// bit-identical for any thread count.
inline PotentialProfile potential_profile(const Level& level, const KernelSpec& kernel,
                                          const PairGeometry* geo = nullptr) {
    const std::size_t M = level.size();
    if (M < 2) throw usage_error("potential_profile: level needs at least 2 points");
    PairGeometry local;
    if (!geo) {
        local = PairGeometry(level);
        geo = &local;
    }
    PotentialProfile prof;
    prof.generation = level.generation;
    prof.values.resize(M);
    prof.err_bounds.resize(M);
    const double w = level.weight();
    const bool ring = !kernel.is_log();
    parallel_for(M, [&](std::size_t i) {
        std::vector<double> terms;
        terms.reserve(M - 1);
        double abs_sum = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (j == i) continue;
            double v = disp_kernel(kernel, geo->disp(j, i), j, i);
            terms.push_back(v);
            abs_sum += std::abs(v);
        }
        double s = pairwise_sum(terms);
        prof.values[i] = w * s;
        double err = detail::accumulation_bound(abs_sum, terms.size());
        if (ring) err += kernel.quad_tol * abs_sum;  // per-eval relative bound
        prof.err_bounds[i] = w * err;
    });
    prof.finalize();
    return prof;
}

// Off-set potential g~_n(y) = w_n sum_{x in K_n} e(y-x); no exclusion.
inline double potential_at(Vec2 y, const Level& level, const KernelSpec& kernel) {
    const std::size_t M = level.size();
    if (M == 0) throw usage_error("potential_at: empty level");
    std::vector<double> terms(M);
    for (std::size_t j = 0; j < M; ++j)
        terms[j] = target_kernel(kernel, y, level.points[j]);
    return level.weight() * pairwise_sum(terms);
}

}  // namespace cantor
