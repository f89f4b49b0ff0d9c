#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cantor/common.hpp"
#include "cantor/level.hpp"
#include "cantor/potential.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// Green-function-at-infinity estimates on the constructed sets:
// G(y) ~ g~_m(y) - c_m, with dist(y,K) bracketed by dist(y,K_m) +- slack.
// ---------------------------------------------------------------------------

struct GreenEstimate {
    Vec2 y;
    int m = 0;
    double value = 0.0;     // g~_m(y) - c_m
    double dist_mid = 0.0;  // dist(y, K_m)
    double dist_lo = 0.0;
    double dist_hi = 0.0;
    double ratio = 0.0;     // value / dist_mid^delta
    double err_indication = 0.0;  // m * w_m * ln a, from the drift bound
};

inline GreenEstimate green_at(Vec2 y, const Level& level, const PotentialProfile& profile) {
    if (profile.generation != level.generation)
        throw usage_error("green_at: profile and level generations differ");
    GreenEstimate g;
    g.y = y;
    g.m = level.generation;
    g.value = potential_at(y, level, KernelSpec::log_kernel_spec()) - profile.c_n;
    auto [d, idx] = nearest_point(level, y);
    (void)idx;
    double slack = descendant_slack(level.spec, level.generation);
    g.dist_mid = d;
    g.dist_lo = std::max(0.0, d - slack);
    g.dist_hi = d + slack;
    double delta = level.spec.delta();
    g.ratio = g.value / std::pow(g.dist_mid, delta);
    g.err_indication = g.m * level.weight() * std::log(level.spec.ceiling);
    return g;
}

struct GreenSweepRow {
    double scale = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
};

struct GreenSweep {
    std::vector<GreenSweepRow> rows;
    double global_min = 0.0;
    double global_max = 0.0;
};

// Corkscrew sampling y = x_0 + (0, R) over dyadic scales; returns
// G / dist^delta statistics per scale and globally.
inline GreenSweep green_ratio_sweep(const Level& level, const PotentialProfile& profile,
                                    const std::vector<double>& scales, int samples_per_scale,
                                    std::uint64_t seed) {
    if (scales.empty()) throw usage_error("green_ratio_sweep: no scales");
    double min_scale = *std::min_element(scales.begin(), scales.end());
    // need depth ~ log_r(min scale) + 2 so the level resolves the distance
    if (ipow(level.spec.ratio, std::max(level.generation - 2, 0)) > min_scale)
        throw usage_error("green_ratio_sweep: level too shallow for the requested scales");

    GreenSweep sweep;
    sweep.global_min = std::numeric_limits<double>::infinity();
    sweep.global_max = -std::numeric_limits<double>::infinity();
    SplitMix64 rng = stream_for(seed, 0x6ee5);
    for (double R : scales) {
        std::vector<double> ratios;
        ratios.reserve(samples_per_scale);
        for (int s = 0; s < samples_per_scale; ++s) {
            std::uint64_t pick = rng.next() % level.size();
            Vec2 y = level.points[pick] + Vec2{0.0, R};
            GreenEstimate g = green_at(y, level, profile);
            ratios.push_back(g.value / std::pow(std::max(g.dist_mid, 1e-300), level.spec.delta()));
        }
        std::sort(ratios.begin(), ratios.end());
        GreenSweepRow row;
        row.scale = R;
        row.min_ratio = ratios.front();
        row.max_ratio = ratios.back();
        row.median_ratio = ratios[ratios.size() / 2];
        sweep.rows.push_back(row);
        sweep.global_min = std::min(sweep.global_min, row.min_ratio);
        sweep.global_max = std::max(sweep.global_max, row.max_ratio);
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Ahlfors regularity audit: mu_m(B(x, rho)) / rho^delta over sampled centers
// and dyadic radii rho in [r^m, diam].
// ---------------------------------------------------------------------------

struct AhlforsRow {
    double rho = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

struct AhlforsReport {
    std::vector<AhlforsRow> rows;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double c0_squared = 0.0;  // empirical C_0^2 = max/min
    bool degenerate = false;
};

inline double level_diameter(const Level& level) {
    if (level.size() < 2) return 0.0;
    if (level.spec.collinear()) return level.points.back().x - level.points.front().x;
    double d = 0.0;
    // extreme points in each axis direction bound the diameter well enough
    std::vector<std::size_t> extremes;
    auto by_x = [&](std::size_t a, std::size_t b) { return level.points[a].x < level.points[b].x; };
    auto by_y = [&](std::size_t a, std::size_t b) { return level.points[a].y < level.points[b].y; };
    std::vector<std::size_t> idx(level.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    extremes.push_back(*std::min_element(idx.begin(), idx.end(), by_x));
    extremes.push_back(*std::max_element(idx.begin(), idx.end(), by_x));
    extremes.push_back(*std::min_element(idx.begin(), idx.end(), by_y));
    extremes.push_back(*std::max_element(idx.begin(), idx.end(), by_y));
    for (std::size_t e : extremes)
        for (std::size_t i = 0; i < level.size(); ++i)
            d = std::max(d, dist(level.points[e], level.points[i]));
    return d;
}

inline AhlforsReport ahlfors_report(const Level& level, const GeneratorSpec& spec,
                                    int sample_size, std::uint64_t seed) {
    AhlforsReport rep;
    if (level.size() < 2) {
        rep.degenerate = true;
        return rep;
    }
    const double delta = spec.delta();
    const double w = level.weight();
    const double diam = level_diameter(level);
    const double rho_min = ipow(spec.ratio, level.generation);

    std::vector<std::uint64_t> centers;
    if (static_cast<std::uint64_t>(sample_size) >= level.size()) {
        centers.resize(level.size());
        for (std::uint64_t i = 0; i < level.size(); ++i) centers[i] = i;
    } else {
        SplitMix64 rng = stream_for(seed, 0xa41f);
        for (int s = 0; s < sample_size; ++s) centers.push_back(rng.next() % level.size());
    }

    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    for (double rho = diam; rho >= rho_min; rho *= 0.5) {
        AhlforsRow row;
        row.rho = rho;
        row.min_ratio = std::numeric_limits<double>::infinity();
        row.max_ratio = 0.0;
        for (std::uint64_t c : centers) {
            Vec2 x = level.points[c];
            std::size_t count = 0;
            if (level.spec.collinear()) {
                auto lo = std::lower_bound(level.points.begin(), level.points.end(), x.x - rho,
                                           [](const Vec2& p, double v) { return p.x < v; });
                auto hi = std::upper_bound(level.points.begin(), level.points.end(), x.x + rho,
                                           [](double v, const Vec2& p) { return v < p.x; });
                count = static_cast<std::size_t>(hi - lo);
            } else {
                for (const Vec2& p : level.points)
                    if (dist(p, x) <= rho) ++count;
            }
            double ratio = (static_cast<double>(count) * w) / std::pow(rho, delta);
            row.min_ratio = std::min(row.min_ratio, ratio);
            row.max_ratio = std::max(row.max_ratio, ratio);
        }
        rep.rows.push_back(row);
        rep.min_ratio = std::min(rep.min_ratio, row.min_ratio);
        rep.max_ratio = std::max(rep.max_ratio, row.max_ratio);
    }
    rep.c0_squared = rep.max_ratio / rep.min_ratio;
    return rep;
}

}  // namespace cantor
