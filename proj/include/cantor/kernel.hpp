#pragma once

#include <cmath>
#include <vector>

#include "cantor/common.hpp"
#include "cantor/generator.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// Kernels. Log is the planar fundamental solution e(x) = ln|x| and is exact;
// Ring averages the inverse-distance^{n-2} potential of a unit (n-2)-sphere
// over the sphere and carries a certified quadrature error <= tol.
// ---------------------------------------------------------------------------

struct KernelSpec {
    enum class Kind { Log, Ring };
    Kind kind = Kind::Log;
    int ambient = 3;        // ambient dimension n >= 3 for Ring
    double quad_tol = 1e-10;  // relative tolerance for Ring evaluations

    static KernelSpec log_kernel_spec() { return KernelSpec{}; }
    static KernelSpec ring_kernel_spec(int ambient, double tol = 1e-10) {
        if (ambient < 3) throw usage_error("ring kernel needs ambient dimension >= 3");
        if (!(tol > 0.0)) throw usage_error("ring kernel tolerance must be positive");
        return KernelSpec{Kind::Ring, ambient, tol};
    }
    bool is_log() const { return kind == Kind::Log; }
};

inline double log_kernel(double d) {
    if (!(d > 0.0)) throw domain_error("log_kernel: argument must be positive");
    return std::log(d);
}

// ---------------------------------------------------------------------------
// Adaptive Gauss7/Kronrod15 on an interval stack. The integrand here is
// strictly positive, so per-interval relative acceptance bounds the total
// relative error by tol.
// ---------------------------------------------------------------------------

namespace detail {

// abscissa, Gauss weight, Kronrod weight
inline constexpr double kGk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class F>
void gk15(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double y0 = f(c);
    double g7 = kGk15[0][1] * y0;
    double k15 = kGk15[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        double dx = h * kGk15[i][0];
        double yi = f(c + dx) + f(c - dx);
        g7 += kGk15[i][1] * yi;
        k15 += kGk15[i][2] * yi;
    }
    g7 *= h;
    k15 *= h;
    value = k15;
    err = std::abs(k15 - g7);
}

struct QuadOutcome {
    double value = 0.0;
    double err = 0.0;
    int intervals = 0;
};

// Positive integrands only. Throws numeric_error at the subdivision cap
// rather than returning an inaccurate value.
template <class F>
QuadOutcome adaptive_gk15(const F& f, double a, double b, double rel_tol, int max_intervals) {
    struct Seg { double a, b; };
    std::vector<Seg> stack{{a, b}};
    QuadOutcome out;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        double v, e;
        gk15(f, s.a, s.b, v, e);
        ++out.intervals;
        if (out.intervals > max_intervals)
            throw numeric_error("adaptive quadrature hit its subdivision cap");
        if (e <= rel_tol * std::abs(v) || (s.b - s.a) < 1e-300) {
            out.value += v;
            out.err += e;
        } else {
            double mid = 0.5 * (s.a + s.b);
            stack.push_back({mid, s.b});
            stack.push_back({s.a, mid});
        }
    }
    return out;
}

inline double sphere_area(int m) {
    // area of the unit m-sphere S^m in R^{m+1}
    if (m == 0) return 2.0;
    return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

}  // namespace detail

struct RingValue {
    double value = 0.0;
    double err = 0.0;
};

// e(t,R) = C(n)^{-1} \int_{S^{n-2}} (t^2 + |x'-y|^2)^{-(n-2)/2} dH^{n-2}(y),
// |x'| = R. Symmetry-reduces to one polar angle:
//   e(t,R) = (|S^{n-3}|/|S^{n-2}|) \int_0^pi (s^2 + 4R sin^2(th/2))^{-(n-2)/2} sin^{n-3}th dth
// with s^2 = t^2 + (R-1)^2. Even in t; singular exactly at (t,R) = (0,1).
inline RingValue ring_kernel_ex(double t, double R, int ambient, double tol) {
    if (ambient < 3) throw usage_error("ring kernel needs ambient dimension >= 3");
    if (!(R >= 0.0)) throw domain_error("ring kernel: R must be nonnegative");
    t = std::abs(t);
    const double s2 = t * t + (R - 1.0) * (R - 1.0);
    if (s2 == 0.0)
        throw singularity_error("ring kernel singular at (t,R) = (0,1)");
    const double p = 0.5 * (ambient - 2);
    const int sin_pow = ambient - 3;
    const double fourR = 4.0 * R;
    auto integrand = [&](double th) {
        double sh = std::sin(0.5 * th);
        double base = s2 + fourR * sh * sh;
        double v = std::pow(base, -p);
        if (sin_pow > 0) v *= std::pow(std::sin(th), sin_pow);
        return v;
    };

    const double prefactor = detail::sphere_area(ambient - 3) / detail::sphere_area(ambient - 2);
    const int cap = 200000;
    double seg_tol = 0.5 * tol;

    detail::QuadOutcome total;
    if (R == 0.0 || s2 >= 0.25) {
        total = detail::adaptive_gk15(integrand, 0.0, M_PI, seg_tol, cap);
    } else {
        // geometric pre-split toward the near-singular corner at th = 0
        double s = std::sqrt(s2);
        std::vector<double> cuts{0.0};
        for (double edge = s; edge < M_PI; edge *= 2.0) cuts.push_back(edge);
        cuts.push_back(M_PI);
        int used = 0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            auto part = detail::adaptive_gk15(integrand, cuts[i], cuts[i + 1], seg_tol, cap - used);
            used += part.intervals;
            total.value += part.value;
            total.err += part.err;
        }
    }
    RingValue rv;
    rv.value = prefactor * total.value;
    rv.err = prefactor * total.err;
    return rv;
}

inline double ring_kernel(double t, double R, int ambient, double tol = 1e-10) {
    return ring_kernel_ex(t, R, ambient, tol).value;
}

// Kernel value for a set-point pair given their displacement.
inline double disp_kernel(const KernelSpec& k, Vec2 d,
                          std::uint64_t cell_p, std::uint64_t cell_q) {
    if (k.is_log()) {
        double r = d.norm();
        if (r <= 0.0)
            throw degenerate_geometry_error(
                "coincident points at cells " + std::to_string(cell_p) + " and " +
                    std::to_string(cell_q),
                cell_p, cell_q);
        return std::log(r);
    }
    if (d.x == 0.0)
        throw degenerate_geometry_error(
            "coincident axis pair at cells " + std::to_string(cell_p) + " and " +
                std::to_string(cell_q),
            cell_p, cell_q);
    return ring_kernel(d.x, 1.0, k.ambient, k.quad_tol);
}

// Kernel value between two set points (coarse path; fine pairs go through
// PairGeometry displacements).
inline double pair_kernel(const KernelSpec& k, Vec2 p, Vec2 q,
                          std::uint64_t cell_p, std::uint64_t cell_q) {
    return disp_kernel(k, p - q, cell_p, cell_q);
}

// Kernel value from a set point to an off-set target. Log targets are planar
// points; Ring targets are read as (axis offset, radial distance).
inline double target_kernel(const KernelSpec& k, Vec2 target, Vec2 set_point) {
    if (k.is_log()) {
        double d = dist(target, set_point);
        if (d <= 0.0) throw domain_error("potential_at: target coincides with a set point");
        return std::log(d);
    }
    return ring_kernel(target.x - set_point.x, target.y, k.ambient, k.quad_tol);
}

}  // namespace cantor
