#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cantor/calibrate.hpp"
#include "cantor/common.hpp"
#include "cantor/generator.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// Closed-form majorants for the per-step perturbations Delta2 and Delta3,
// summed over annuli with an explicit geometric tail so the reported values
// are upper bounds. Counts per annulus l: N^{l-1}(N-1) points at separation
// at least (1 - ar/(1-r)) r^{n-l-1}; the N = 2 case reproduces the line
// formulas term by term.
// ---------------------------------------------------------------------------

namespace detail {

struct SeriesSpec {
    double a, r, q2;   // q2 = 2(1 - ar/(1-r))
    int n_symbols;
    int order;         // 1 for Delta2 (first derivative), 2 for Delta3
};

inline double bound_series(const SeriesSpec& s, double tail_eps = 1e-15) {
    const double N = static_cast<double>(s.n_symbols);
    const double lead = s.order == 1 ? N : 1.0;
    double total = 0.0;
    double count = (N - 1.0);  // N^{l-1}(N-1) at l = 1
    double rl = s.r;
    for (int l = 1; l <= 4000; ++l) {
        double num, den;
        if (s.order == 1) {
            num = s.a * rl;
            den = s.q2 - s.a * rl;
        } else {
            num = s.a * s.a * rl * rl;
            den = s.q2 * s.q2 - s.a * s.a * rl * rl;
        }
        if (den <= 0.0)
            throw domain_error("feasibility bound: window violated, denominator <= 0 at annulus " +
                               std::to_string(l));
        double term = lead * count * num / den;
        if (!std::isfinite(term) || !std::isfinite(total))
            throw domain_error("feasibility bound: series diverges outside the window");
        total += term;
        // consecutive-term ratio is below rho (den grows with l); add the tail
        double den_cap = s.order == 1 ? s.q2 : s.q2 * s.q2;
        double rho = (s.order == 1 ? N * s.r : N * s.r * s.r) * den_cap / den;
        if (rho < 1.0 && term * rho / (1.0 - rho) < tail_eps) {
            total += term * rho / (1.0 - rho);
            break;
        }
        if (rho >= 1.0 && l > 64)
            throw domain_error("feasibility bound: series diverges outside the window");
        count *= N;
        rl *= s.r;
    }
    return total;
}

}  // namespace detail

inline double bound_delta2(double a, double r, int n_symbols = 2, double tail_eps = 1e-15) {
    double q = 1.0 - a * r / (1.0 - r);
    return detail::bound_series({a, r, 2.0 * q, n_symbols, 1}, tail_eps);
}

inline double bound_delta3(double a, double r, int n_symbols = 2, double tail_eps = 1e-15) {
    double q = 1.0 - a * r / (1.0 - r);
    return detail::bound_series({a, r, 2.0 * q, n_symbols, 2}, tail_eps);
}

// Evaluated analytic bounds, the per-step threshold W/(2N), and the implied
// dimension. margin >= 0 is the feasibility claim for exact calibration.
struct FeasibilityReport {
    double a = 0.0;
    double r = 0.0;
    std::string alphabet;
    double b2 = std::numeric_limits<double>::infinity();
    double b3 = std::numeric_limits<double>::infinity();
    double width = 0.0;       // W
    double threshold = 0.0;   // W / (2 |alphabet|)
    double margin = -std::numeric_limits<double>::infinity();
    bool window_ok = false;
    double delta = 0.0;
    bool feasible = false;
    // RingAxis majorants rescale the log-kernel series by fitted derivative
    // constants; they are advisory, the calibration run is the real test.
    bool empirical_constants = false;
    // alternative (3/32) ln a normalization of the N=4 threshold, reported
    // for comparison alongside the generic W/(2N)
    double alt_n4_threshold = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Fitted first/second derivative scale of the ring kernel near the ring,
// relative to the log kernel's 1/d and 1/d^2. Sampled once per report.
inline double ring_gradient_scale(int ambient, double tol) {
    double c = 0.0;
    for (double t = 1e-3; t <= 0.1; t *= 2.0) {
        double h = 1e-3 * t;
        double g = std::abs(ring_kernel(t + h, 1.0, ambient, tol) -
                            ring_kernel(t - h, 1.0, ambient, tol)) / (2.0 * h);
        c = std::max(c, g * t);
    }
    return 1.25 * c;  // 25% headroom over the sampled maximum
}

}  // namespace detail

inline FeasibilityReport feasible(const GeneratorSpec& spec, double ring_tol = 1e-10) {
    FeasibilityReport rep;
    rep.a = spec.ceiling;
    rep.r = spec.ratio;
    rep.alphabet = spec.alphabet_label();
    rep.window_ok = spec.window_ok() && spec.condition_a_value() > 0.0;
    rep.delta = spec.delta();
    const int N = spec.alphabet_size();
    KernelSpec kernel = kernel_for(spec, ring_tol);
    rep.width = increment_width(spec, kernel);
    rep.threshold = rep.width / (2.0 * N);
    try {
        double b2 = bound_delta2(spec.ceiling, spec.ratio, N);
        double b3 = bound_delta3(spec.ceiling, spec.ratio, N);
        if (spec.kind == AlphabetKind::RingAxis) {
            double scale = detail::ring_gradient_scale(spec.ambient_dim, ring_tol);
            b2 *= scale;
            b3 *= scale;
            rep.empirical_constants = true;
        }
        rep.b2 = b2;
        rep.b3 = b3;
        rep.margin = rep.threshold - (b2 + b3);
    } catch (const domain_error&) {
        // outside the window: bounds diverge, margin stays -inf
    }
    if (spec.kind == AlphabetKind::RootsOfUnity && spec.symbols == 4)
        rep.alt_n4_threshold = 3.0 / 32.0 * std::log(spec.ceiling);
    rep.feasible = rep.window_ok && rep.margin >= 0.0;
    return rep;
}

inline FeasibilityReport feasible(double a, double r, const std::string& alphabet = "line",
                                  double ring_tol = 1e-10) {
    // Out-of-window inputs must yield margin < 0, not errors; bypass the
    // GeneratorSpec window validation with a raw spec.
    GeneratorSpec s;
    if (alphabet == "line") {
        s.kind = AlphabetKind::LineBinary;
        s.symbols = 2;
    } else if (alphabet.rfind("roots:", 0) == 0) {
        s.kind = AlphabetKind::RootsOfUnity;
        s.symbols = std::stoi(alphabet.substr(6));
    } else if (alphabet.rfind("ring:", 0) == 0) {
        s.kind = AlphabetKind::RingAxis;
        s.symbols = 2;
        s.ambient_dim = std::stoi(alphabet.substr(5));
    } else {
        throw usage_error("unknown alphabet '" + alphabet + "'");
    }
    s.ratio = r;
    s.ceiling = a;
    return feasible(s, ring_tol);
}

// ---------------------------------------------------------------------------
// Grid search maximizing the implied dimension over the window. delta is
// monotone in r, so this finds the largest feasible r per a. Deterministic;
// argmax ties break toward smaller a, then smaller r.
// ---------------------------------------------------------------------------

struct SearchResult {
    FeasibilityReport best;
    bool found = false;
    int evaluations = 0;
};

inline SearchResult search_max_delta(const std::string& alphabet, int grid = 200, int rounds = 3,
                                     double a_low = 1.0, double a_high = 3.0) {
    SearchResult res;
    double a_lo = a_low, a_hi = a_high;
    double r_lo = 1e-4, r_hi = 1.0 / 16.0;
    for (int round = 0; round <= rounds; ++round) {
        double best_a = 0.0, best_r = 0.0;
        bool found_round = false;
        FeasibilityReport best_rep;
        for (int i = 0; i < grid; ++i) {
            double fa = grid == 1 ? 0.0 : static_cast<double>(i) / (grid - 1);
            double a = a_lo * std::pow(a_hi / a_lo, fa);
            for (int j = 0; j < grid; ++j) {
                double fr = grid == 1 ? 0.0 : static_cast<double>(j) / (grid - 1);
                double r = r_lo * std::pow(r_hi / r_lo, fr);
                FeasibilityReport rep = feasible(a, r, alphabet);
                ++res.evaluations;
                if (!rep.feasible) continue;
                bool better = !found_round || rep.delta > best_rep.delta + 1e-15 ||
                              (std::abs(rep.delta - best_rep.delta) <= 1e-15 &&
                               (a < best_a || (a == best_a && r < best_r)));
                if (better) {
                    best_rep = rep;
                    best_a = a;
                    best_r = r;
                    found_round = true;
                }
            }
        }
        if (!found_round) break;
        res.best = best_rep;
        res.found = true;
        if (round == rounds) break;
        // refine around the incumbent
        double a_span = (a_hi - a_lo) * 0.12;
        double r_span = (r_hi / r_lo);
        double r_factor = std::pow(r_span, 0.12);
        a_lo = std::max(a_low, best_a - a_span);
        a_hi = std::min(a_high, best_a + a_span);
        r_lo = std::max(1e-4, best_r / r_factor);
        r_hi = std::min(1.0 / 16.0, best_r * r_factor);
    }
    return res;
}

}  // namespace cantor
