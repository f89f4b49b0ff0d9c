#pragma once

#include <atomic>
#include <cmath>
#include <vector>

#include "cantor/common.hpp"
#include "cantor/level.hpp"
#include "cantor/verify.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// Walk-on-spheres estimate of the harmonic measure of the planar Cantor set,
// with hits attributed to depth-k cells. Step radius is the certified lower
// bound dist(z, K_m) - slack; a walker leaving |z| > R_out re-enters through
// the exact exterior Poisson kernel of the circle (planar Brownian motion is
// recurrent, so the re-entry is exact, not an approximation).
// ---------------------------------------------------------------------------

struct WosResult {
    Vec2 pole;
    double eps = 0.0;
    int depth = 0;
    int n_symbols = 2;
    std::uint64_t walks = 0;
    std::uint64_t seed = 0;
    double r_out = 0.0;
    std::vector<std::uint64_t> hits;  // per depth-k cell, lexicographic
    std::uint64_t censored = 0;
    std::uint64_t reentries = 0;
    std::uint64_t total_steps = 0;
    bool ok = true;  // censored fraction <= 1%

    double censored_fraction() const {
        return walks ? static_cast<double>(censored) / static_cast<double>(walks) : 0.0;
    }
};

// Exterior-disk hitting angle offset: wrapped Cauchy with parameter rho_frac.
inline double sample_poisson_reentry_offset(double rho_frac, double u) {
    double scale = (1.0 - rho_frac) / (1.0 + rho_frac);
    return 2.0 * std::atan(scale * std::tan(M_PI * (u - 0.5)));
}

// Density of the angle offset; integrates to 1 over (-pi, pi].
inline double poisson_reentry_density(double rho_frac, double offset) {
    double num = 1.0 - rho_frac * rho_frac;
    double den = 2.0 * M_PI * (1.0 + rho_frac * rho_frac - 2.0 * rho_frac * std::cos(offset));
    return num / den;
}

inline WosResult wos_sample(Vec2 pole, const Level& level, const GeneratorSpec& spec,
                            double eps, std::uint64_t walks, int depth, std::uint64_t seed,
                            std::uint64_t step_cap = 1000000) {
    if (spec.kind == AlphabetKind::RingAxis)
        throw usage_error("wos_sample: planar variants only");
    if (depth < 0 || depth > level.generation)
        throw usage_error("wos_sample: depth must lie in [0, level generation]");
    const int m = level.generation;
    const double res = ipow(spec.ratio, m);
    if (!(eps >= 2.0 * res))
        throw usage_error("wos_sample: eps must be at least twice the level resolution r^m");
    const double slack = descendant_slack(spec, m);
    auto [pole_d, pole_i] = nearest_point(level, pole);
    (void)pole_i;
    if (pole_d - slack < 1.0)
        throw usage_error("wos_sample: pole must satisfy dist(pole, K) >= 1");

    WosResult out;
    out.pole = pole;
    out.eps = eps;
    out.depth = depth;
    out.n_symbols = spec.alphabet_size();
    out.walks = walks;
    out.seed = seed;
    out.r_out = 2.0 + level_diameter(level);

    const int N = spec.alphabet_size();
    const std::uint64_t cells = ipow_u64(static_cast<std::uint64_t>(N), depth);
    const std::uint64_t cell_div = ipow_u64(static_cast<std::uint64_t>(N), m - depth);
    const double r_out = out.r_out;

    unsigned workers = thread_cap();
    std::vector<std::vector<std::uint64_t>> hits(workers, std::vector<std::uint64_t>(cells, 0));
    std::vector<std::uint64_t> censored(workers, 0), reentries(workers, 0), steps_acc(workers, 0);
    std::uint64_t chunk = (walks + workers - 1) / workers;

    parallel_for(workers, [&](std::size_t w) {
        std::uint64_t lo = w * chunk, hi = std::min<std::uint64_t>(walks, lo + chunk);
        for (std::uint64_t walk = lo; walk < hi; ++walk) {
            SplitMix64 rng = stream_for(seed, walk);
            Vec2 z = pole;
            bool done = false;
            for (std::uint64_t step = 0; step < step_cap; ++step) {
                double zr = z.norm();
                if (zr > r_out) {
                    double frac = r_out / zr;
                    double theta = std::atan2(z.y, z.x) +
                                   sample_poisson_reentry_offset(frac, rng.uniform());
                    z = {r_out * std::cos(theta), r_out * std::sin(theta)};
                    ++reentries[w];
                    ++steps_acc[w];
                    continue;
                }
                auto [d, idx] = nearest_point(level, z);
                double d_lb = d - slack;
                if (d_lb < eps) {
                    ++hits[w][idx / cell_div];
                    done = true;
                    break;
                }
                double phi = 2.0 * M_PI * rng.uniform();
                z = z + Vec2{d_lb * std::cos(phi), d_lb * std::sin(phi)};
                ++steps_acc[w];
            }
            if (!done) ++censored[w];
        }
    }, workers);

    out.hits.assign(cells, 0);
    for (unsigned w = 0; w < workers; ++w) {
        for (std::uint64_t c = 0; c < cells; ++c) out.hits[c] += hits[w][c];
        out.censored += censored[w];
        out.reentries += reentries[w];
        out.total_steps += steps_acc[w];
    }
    out.ok = out.censored_fraction() <= 0.01;
    return out;
}

// ---------------------------------------------------------------------------
// Comparison of the sampled exit frequencies with mu: ratios
// hits(Q)/walks * |alphabet|^k per cell, binomial confidence intervals, and
// the max/min band over cells with positive counts.
// ---------------------------------------------------------------------------

struct MeasureRow {
    std::uint64_t cell = 0;
    std::uint64_t count = 0;
    double ratio = 0.0;  // omega-hat(Q) / mu(Q)
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool excluded = false;  // zero-count cells are flagged and left out
};

struct MeasureComparison {
    int depth = 0;
    std::vector<MeasureRow> rows;
    double band_min = 0.0;
    double band_max = 0.0;
    double band = 0.0;  // max/min over included cells
    int excluded_cells = 0;
};

inline std::vector<std::uint64_t> aggregate_counts(const WosResult& wos, int depth) {
    if (depth < 0 || depth > wos.depth)
        throw usage_error("aggregate_counts: depth must lie in [0, wos depth]");
    std::size_t fold = ipow_u64(static_cast<std::uint64_t>(wos.n_symbols), wos.depth - depth);
    std::vector<std::uint64_t> agg(wos.hits.size() / fold, 0);
    for (std::size_t c = 0; c < wos.hits.size(); ++c) agg[c / fold] += wos.hits[c];
    return agg;
}

inline MeasureComparison measure_comparison(const WosResult& wos, int depth) {
    MeasureComparison cmp;
    cmp.depth = depth;
    std::vector<std::uint64_t> counts = aggregate_counts(wos, depth);
    const double cells = static_cast<double>(counts.size());
    const double n = static_cast<double>(wos.walks - wos.censored);
    cmp.band_min = std::numeric_limits<double>::infinity();
    cmp.band_max = 0.0;
    const double z95 = 1.959963984540054;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        MeasureRow row;
        row.cell = c;
        row.count = counts[c];
        double p = n > 0 ? static_cast<double>(counts[c]) / n : 0.0;
        double se = n > 0 ? std::sqrt(std::max(p * (1.0 - p), 0.0) / n) : 0.0;
        row.ratio = p * cells;
        row.ci_lo = (p - z95 * se) * cells;
        row.ci_hi = (p + z95 * se) * cells;
        row.excluded = counts[c] == 0;
        if (row.excluded) {
            ++cmp.excluded_cells;
        } else {
            cmp.band_min = std::min(cmp.band_min, row.ratio);
            cmp.band_max = std::max(cmp.band_max, row.ratio);
        }
        cmp.rows.push_back(row);
    }
    cmp.band = cmp.band_min > 0.0 ? cmp.band_max / cmp.band_min
                                  : std::numeric_limits<double>::infinity();
    return cmp;
}

}  // namespace cantor
