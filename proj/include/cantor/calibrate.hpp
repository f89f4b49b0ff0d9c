#pragma once

#include <cmath>
#include <vector>

#include "cantor/common.hpp"
#include "cantor/kernel.hpp"
#include "cantor/level.hpp"
#include "cantor/potential.hpp"

namespace cantor {

inline KernelSpec kernel_for(const GeneratorSpec& spec, double ring_tol = 1e-10) {
    if (spec.kind == AlphabetKind::RingAxis)
        return KernelSpec::ring_kernel_spec(spec.ambient_dim, ring_tol);
    return KernelSpec::log_kernel_spec();
}

// Sibling-increment contribution Delta1 as a function of the spacing value.
//   LineBinary:      ln(a_val r^{n-1} / 2)
//   RootsOfUnity(N): (N-1) ln(a_val r^{n-1} / 2) + ln N
//   RingAxis:        e(a_val r^{n-1}, 1)
// Increasing in a_val for the log alphabets, strictly decreasing for RingAxis.
inline double sibling_increment(const GeneratorSpec& spec, const KernelSpec& kernel,
                                double a_val, int n) {
    if (!(a_val >= 1.0 && a_val <= spec.ceiling))
        throw domain_error("sibling_increment: a_val outside [1, a]");
    double half_step = 0.5 * a_val * ipow(spec.ratio, n - 1);
    switch (spec.kind) {
        case AlphabetKind::LineBinary:
            return std::log(half_step);
        case AlphabetKind::RootsOfUnity:
            // product of |1 - zeta| over the nontrivial N-th roots equals N
            return (spec.symbols - 1) * std::log(half_step) +
                   std::log(static_cast<double>(spec.symbols));
        case AlphabetKind::RingAxis:
            return ring_kernel(2.0 * half_step, 1.0, kernel.ambient, kernel.quad_tol);
    }
    throw usage_error("sibling_increment: unknown alphabet");
}

// Width W of the attainable Delta1 range.
//   LineBinary: ln a.  RootsOfUnity: (N-1) ln a.
//   RingAxis: inf_m [ e(r^{m-1},1) - e(a r^{m-1},1) ]  (>= 2A, Prop (i)),
//   evaluated over m = 1..20 plus the deeper monotone tail.
inline double increment_width(const GeneratorSpec& spec, const KernelSpec& kernel) {
    switch (spec.kind) {
        case AlphabetKind::LineBinary:
            return std::log(spec.ceiling);
        case AlphabetKind::RootsOfUnity:
            return (spec.symbols - 1) * std::log(spec.ceiling);
        case AlphabetKind::RingAxis: {
            int m_max = std::max(20, spec.max_generation + 2);
            double w = std::numeric_limits<double>::infinity();
            for (int m = 1; m <= m_max; ++m) {
                double t = ipow(spec.ratio, m - 1);
                double gap = ring_kernel(t, 1.0, kernel.ambient, kernel.quad_tol) -
                             ring_kernel(spec.ceiling * t, 1.0, kernel.ambient, kernel.quad_tol);
                w = std::min(w, gap);
            }
            return w;
        }
    }
    throw usage_error("increment_width: unknown alphabet");
}

// Admissible oscillation at generation n: |alphabet|^{-n} W / 2.
// For LineBinary this is 2^{-n} ln(a)/2.
inline double oscillation_budget(const GeneratorSpec& spec, const KernelSpec& kernel, int n) {
    return 0.5 * spec.weight(n) * increment_width(spec, kernel);
}

inline double oscillation_budget(const GeneratorSpec& spec, const KernelSpec& kernel, int n,
                                 double width) {
    return 0.5 * spec.weight(n) * width;
}

// ---------------------------------------------------------------------------
// Main Lemma step: pick each a_{n-1}(word) so the sibling increment
// compensates the parent's deviation from the profile minimum exactly.
// Siblings share the same value because the key is the parent word.
// ---------------------------------------------------------------------------

struct ChosenParams {
    std::vector<double> values;
    int clamped = 0;           // parents forced back into [1, a] (force mode)
    double pre_oscillation = 0.0;
    double pre_limit = 0.0;    // |alphabet|^{-n} W, the exact-compensation window
};

inline ChosenParams choose_parameters(const PotentialProfile& profile, const GeneratorSpec& spec,
                                      const KernelSpec& kernel, bool force = false,
                                      double width = -1.0) {
    const int n = profile.generation + 1;
    const int N = spec.alphabet_size();
    const double W = width > 0.0 ? width : increment_width(spec, kernel);
    const double Nn = static_cast<double>(ipow_u64(static_cast<std::uint64_t>(N), n));

    ChosenParams out;
    out.pre_oscillation = profile.oscillation;
    out.pre_limit = W / Nn;
    if (!(profile.oscillation <= out.pre_limit * (1.0 + 1e-12)) && !force)
        throw infeasibility_error(
            "choose_parameters: oscillation " + to_decimal_string(profile.oscillation) +
                " exceeds the compensation window " + to_decimal_string(out.pre_limit) +
                " at generation " + std::to_string(profile.generation),
            profile.generation, 0, profile.oscillation, out.pre_limit);

    const double a = spec.ceiling;
    out.values.resize(profile.values.size());

    // RingAxis solves on the strictly decreasing increment by bisection,
    // matched to 1e-3 of the oscillation budget at generation n.
    double ring_top = 0.0, ring_tol = 0.0;
    if (spec.kind == AlphabetKind::RingAxis) {
        ring_top = sibling_increment(spec, kernel, 1.0, n);
        ring_tol = 1e-3 * oscillation_budget(spec, kernel, n, W);
    }

    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        double dev = profile.values[i] - profile.c_n;
        double a_sol;
        if (spec.kind == AlphabetKind::RingAxis) {
            double target = ring_top - Nn * dev;
            double lo = 1.0, hi = a;
            double f_lo = ring_top - target;  // >= 0
            a_sol = a;
            if (f_lo <= 0.0) {
                a_sol = 1.0;
            } else {
                bool done = false;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double f = sibling_increment(spec, kernel, mid, n) - target;
                    if (std::abs(f) <= ring_tol) { a_sol = mid; done = true; break; }
                    if (f > 0.0) lo = mid; else hi = mid;
                }
                if (!done) {
                    a_sol = 0.5 * (lo + hi);
                    double f = sibling_increment(spec, kernel, a_sol, n) - target;
                    if (std::abs(f) > 1e3 * ring_tol)
                        throw numeric_error("choose_parameters: ring bisection did not converge");
                }
            }
        } else {
            // closed form: exponential of an affine expression
            a_sol = a * std::exp(-Nn * dev / (N - 1));
        }
        if (a_sol > a) {
            if (a_sol <= a * (1.0 + 1e-9)) a_sol = a;
            else if (force) { a_sol = a; ++out.clamped; }
            else throw infeasibility_error("choose_parameters: solved value above the ceiling",
                                           n - 1, i, a_sol, a);
        }
        if (a_sol < 1.0) {
            if (a_sol >= 1.0 - 1e-9) a_sol = 1.0;
            else if (force) { a_sol = 1.0; ++out.clamped; }
            else throw infeasibility_error("choose_parameters: solved value below 1",
                                           n - 1, i, a_sol, a);
        }
        out.values[i] = a_sol;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-point decomposition g_n(x) = g_{n-1}(parent) + w_n (D1 + D2 + D3),
// with terms grouped by the annulus index l (first disagreement n - l).
// The reconstruction residual checks the identity numerically.
// ---------------------------------------------------------------------------

struct DeltaDiagnostics {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double residual = 0.0;
    double g_n = 0.0;
    double g_prev = 0.0;
    std::vector<double> delta2_by_annulus;  // index l-1, l = 1..n-1
    std::vector<double> delta3_by_annulus;
};

namespace detail {

inline void check_level_pair(const Level& prev, const Level& cur) {
    if (cur.generation != prev.generation + 1)
        throw usage_error("delta diagnostics: levels must be consecutive generations");
    if (!prev.params->is_prefix_of(*cur.params))
        throw usage_error("delta diagnostics: levels built from different ParamTrees");
}

struct LevelPairGeo {
    PairGeometry prev;
    PairGeometry cur;
    LevelPairGeo(const Level& p, const Level& c) : prev(p), cur(c) {}
};

// Delta2/Delta3 sums for one point; residual-free fast path for sup scans.
inline void delta23_for_point(const Word& x, const Level& prev, const Level& cur,
                              const KernelSpec& kernel, const LevelPairGeo& geo,
                              double& d2, double& d3,
                              std::vector<double>* d2_ann, std::vector<double>* d3_ann) {
    const int N = cur.spec.alphabet_size();
    const int n = cur.generation;
    const Word parent = x.parent(N);
    if (d2_ann) d2_ann->assign(std::max(n - 1, 0), 0.0);
    if (d3_ann) d3_ann->assign(std::max(n - 1, 0), 0.0);
    d2 = 0.0;
    d3 = 0.0;
    for (std::uint64_t yi = 0; yi < prev.size(); ++yi) {
        if (yi == parent.index) continue;
        Word yw{n - 1, yi};
        int m = first_disagreement(parent, yw, N);
        int l = n - m;  // annulus index
        double e_yx = disp_kernel(kernel, geo.prev.cross_disp(yi, geo.cur, x.index), yi, x.index);
        double e_yparent = disp_kernel(kernel, geo.prev.disp(yi, parent.index), yi, parent.index);
        double t2 = static_cast<double>(N) * (e_yx - e_yparent);
        d2 += t2;
        if (d2_ann) (*d2_ann)[static_cast<std::size_t>(l - 1)] += t2;
        double t3 = 0.0;
        for (int c = 0; c < N; ++c) {
            Word zw = yw.child(c, N);
            t3 += disp_kernel(kernel, geo.cur.disp(zw.index, x.index), zw.index, x.index) - e_yx;
        }
        d3 += t3;
        if (d3_ann) (*d3_ann)[static_cast<std::size_t>(l - 1)] += t3;
    }
}

}  // namespace detail

inline DeltaDiagnostics delta_diagnostics(const Word& x, const Level& prev, const Level& cur,
                                          const KernelSpec& kernel) {
    detail::check_level_pair(prev, cur);
    if (x.generation != cur.generation)
        throw usage_error("delta_diagnostics: word generation does not match the level");
    const int N = cur.spec.alphabet_size();
    const Word parent = x.parent(N);
    detail::LevelPairGeo geo(prev, cur);

    DeltaDiagnostics d;
    detail::delta23_for_point(x, prev, cur, kernel, geo, d.delta2, d.delta3,
                              &d.delta2_by_annulus, &d.delta3_by_annulus);
    for (int c = 0; c < N; ++c) {
        Word sib = parent.child(c, N);
        if (sib.index == x.index) continue;
        d.delta1 += disp_kernel(kernel, geo.cur.disp(sib.index, x.index), sib.index, x.index);
    }

    // direct potentials for the reconstruction residual
    auto g_of = [&](const Level& lvl, const PairGeometry& g, std::uint64_t idx) {
        std::vector<double> terms;
        terms.reserve(lvl.size() - 1);
        for (std::uint64_t j = 0; j < lvl.size(); ++j) {
            if (j == idx) continue;
            terms.push_back(disp_kernel(kernel, g.disp(j, idx), j, idx));
        }
        return lvl.weight() * pairwise_sum(terms);
    };
    d.g_n = cur.size() > 1 ? g_of(cur, geo.cur, x.index) : 0.0;
    d.g_prev = prev.size() > 1 ? g_of(prev, geo.prev, parent.index) : 0.0;
    d.residual = d.g_n - d.g_prev - cur.weight() * (d.delta1 + d.delta2 + d.delta3);
    return d;
}

// sup over points of |Delta2| + |Delta3| between two consecutive levels.
inline double sup_delta23(const Level& prev, const Level& cur, const KernelSpec& kernel) {
    detail::check_level_pair(prev, cur);
    detail::LevelPairGeo geo(prev, cur);
    std::vector<double> per_point(cur.size());
    parallel_for(cur.size(), [&](std::size_t i) {
        double d2, d3;
        detail::delta23_for_point(Word{cur.generation, i}, prev, cur, kernel, geo, d2, d3,
                                  nullptr, nullptr);
        per_point[i] = std::abs(d2) + std::abs(d3);
    });
    double s = 0.0;
    for (double v : per_point) s = std::max(s, v);
    return s;
}

}  // namespace cantor
