#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <cmath>
#include <vector>

#include "cantor/generator.hpp"
#include "cantor/level.hpp"

namespace oracles {

// Complete elliptic integral of the first kind via the arithmetic-geometric
// mean; accurate to machine precision.
inline double elliptic_k(double k) {
    double a = 1.0, b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-17 * a; ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return M_PI / (2.0 * a);
}

// Closed form of the ring kernel for ambient n = 3:
//   e(t,R) = (2/pi) K(k) / sqrt(t^2 + (R+1)^2),  k^2 = 4R / (t^2 + (R+1)^2).
inline double ring_kernel_n3(double t, double R) {
    double denom = t * t + (R + 1.0) * (R + 1.0);
    double k = std::sqrt(4.0 * R / denom);
    return (2.0 / M_PI) * elliptic_k(k) / std::sqrt(denom);
}

// Long-double evaluation of the annulus series for Delta2/Delta3 bounds
// (50 terms; the geometric tail is below 1e-30 at in-window parameters).
inline long double series_delta2_ld(long double a, long double r, int n_symbols = 2) {
    long double q2 = 2.0L * (1.0L - a * r / (1.0L - r));
    long double total = 0.0L;
    long double count = n_symbols - 1.0L;
    long double rl = r;
    for (int l = 1; l <= 50; ++l) {
        total += count * a * rl / (q2 - a * rl);
        count *= n_symbols;
        rl *= r;
    }
    return static_cast<long double>(n_symbols) * total;
}

inline long double series_delta3_ld(long double a, long double r, int n_symbols = 2) {
    long double q2 = 2.0L * (1.0L - a * r / (1.0L - r));
    long double total = 0.0L;
    long double count = n_symbols - 1.0L;
    long double rl = r;
    for (int l = 1; l <= 50; ++l) {
        total += count * a * a * rl * rl / (q2 * q2 - a * a * rl * rl);
        count *= n_symbols;
        rl *= r;
    }
    return total;
}

// Plain left-to-right log-potential loop over stored coordinates; an
// independent path for potential_at checks at off-set targets.
inline double naive_potential_at(cantor::Vec2 y, const cantor::Level& level) {
    double s = 0.0;
    for (const auto& p : level.points) s += std::log(std::hypot(y.x - p.x, y.y - p.y));
    return level.weight() * s;
}

// Direct sibling-increment at spacing a_val placed the way expand_level
// places children, summed over the alphabet letters.
inline double direct_sibling_sum(const cantor::GeneratorSpec& spec, double a_val, int n,
                                 int own_letter) {
    auto dirs = spec.letter_dirs();
    double step = 0.5 * a_val * cantor::ipow(spec.ratio, n - 1);
    double s = 0.0;
    for (int j = 0; j < spec.alphabet_size(); ++j) {
        if (j == own_letter) continue;
        cantor::Vec2 d = step * (dirs[j] - dirs[own_letter]);
        s += std::log(d.norm());
    }
    return s;
}

// Re-solve one parent's spacing by bisection on the directly-summed
// increment difference; tolerance 1e-12 on the increment.
inline double resolve_spacing(const cantor::GeneratorSpec& spec, int n, double width,
                              double deviation) {
    double target = width - cantor::ipow(static_cast<double>(spec.alphabet_size()), n) * deviation;
    auto diff = [&](double a_val) {
        return direct_sibling_sum(spec, a_val, n, 0) - direct_sibling_sum(spec, 1.0, n, 0);
    };
    double lo = 1.0, hi = spec.ceiling;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double f = diff(mid) - target;
        if (std::abs(f) < 1e-12) return mid;
        if (f < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracles
