#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "cantor/common.hpp"
#include "cantor/kernel.hpp"
#include "cantor/level.hpp"
#include "cantor/potential.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// Cell-tree accelerated profile for the log kernel. Far cells (separation
// at least 4x the cell diameter) are replaced by their weighted centroid;
// the remainder bound per cell is count * u^2 / (2(1-u)), u = radius/dist,
// from ln prod|1 - w_i| with sum w_i = 0. Near cells are summed exactly.
// All geometry is anchor-relative (word displacements), so deep generations
// keep full relative precision. Ring-kernel levels take the exact path
// (no rigorous far-field derivative constant is available).
// ---------------------------------------------------------------------------

namespace detail {

struct LocalCellTree {
    int n_symbols = 2;
    int depth = 0;
    std::vector<std::vector<Vec2>> centroid;  // offset from the cell anchor
    std::vector<std::vector<double>> radius;  // max leaf distance bound
    std::vector<std::vector<Vec2>> child_off; // anchor offset to each child
    std::vector<double> counts;               // leaves per cell at each gen
};

inline LocalCellTree build_local_tree(const Level& level) {
    const GeneratorSpec& spec = level.spec;
    const ParamTree& params = *level.params;
    const std::vector<Vec2> dirs = spec.letter_dirs();
    LocalCellTree t;
    t.n_symbols = spec.alphabet_size();
    t.depth = level.generation;
    t.centroid.resize(t.depth + 1);
    t.radius.resize(t.depth + 1);
    t.child_off.resize(t.depth + 1);
    t.counts.resize(t.depth + 1);
    t.centroid[t.depth].assign(level.size(), Vec2{0.0, 0.0});
    t.radius[t.depth].assign(level.size(), 0.0);
    for (int k = 0; k <= t.depth; ++k)
        t.counts[k] = static_cast<double>(ipow_u64(t.n_symbols, t.depth - k));
    for (int k = t.depth - 1; k >= 0; --k) {
        std::size_t cells = t.centroid[k + 1].size() / t.n_symbols;
        double scale_base = 0.5 * ipow(spec.ratio, k);
        t.centroid[k].resize(cells);
        t.radius[k].resize(cells);
        t.child_off[k].resize(cells * t.n_symbols);
        const std::vector<double>& a_vals = params.generation(k);
        for (std::size_t c = 0; c < cells; ++c) {
            double scale = scale_base * a_vals[c];
            Vec2 acc{0.0, 0.0};
            for (int j = 0; j < t.n_symbols; ++j) {
                std::size_t ci = c * t.n_symbols + j;
                Vec2 off = scale * dirs[static_cast<std::size_t>(j)];
                t.child_off[k][ci] = off;
                acc = acc + off + t.centroid[k + 1][ci];
            }
            Vec2 ctr = (1.0 / t.n_symbols) * acc;
            double rad = 0.0;
            for (int j = 0; j < t.n_symbols; ++j) {
                std::size_t ci = c * t.n_symbols + j;
                Vec2 v = t.child_off[k][ci] + t.centroid[k + 1][ci];
                rad = std::max(rad, dist(ctr, v) + t.radius[k + 1][ci]);
            }
            t.centroid[k][c] = ctr;
            t.radius[k][c] = rad;
        }
    }
    return t;
}

}  // namespace detail

inline PotentialProfile hier_potential_profile(const Level& level, const KernelSpec& kernel,
                                               double err_budget) {
    if (!(err_budget > 0.0))
        throw usage_error("hier_potential_profile: err_budget must be positive");
    if (!std::isfinite(err_budget) || !kernel.is_log()) {
        // infinite budget or ring kernel: exact fallback
        PotentialProfile p = potential_profile(level, kernel);
        p.err_budget = err_budget;
        return p;
    }
    const std::size_t M = level.size();
    if (M < 2) throw usage_error("hier_potential_profile: level needs at least 2 points");

    // the floating-point floor cannot be beaten by descending deeper
    double scale = std::abs(std::log(ipow(level.spec.ratio, level.generation))) + 2.0;
    double fp_floor = detail::accumulation_bound(scale * static_cast<double>(M), M) * level.weight();
    if (err_budget < fp_floor)
        throw budget_error("hier_potential_profile: budget below the accumulation floor",
                           fp_floor * 4.0);

    const detail::LocalCellTree tree = detail::build_local_tree(level);
    const PairGeometry geo(level);
    const int N = tree.n_symbols;
    const int depth = tree.depth;
    const double w = level.weight();
    const double per_leaf_budget = err_budget / static_cast<double>(M);

    // i / ancestor_div[k] is the generation-k ancestor cell of leaf i
    std::vector<std::uint64_t> ancestor_div(depth + 1);
    for (int k = 0; k <= depth; ++k)
        ancestor_div[k] = ipow_u64(static_cast<std::uint64_t>(N), depth - k);

    PotentialProfile prof;
    prof.generation = level.generation;
    prof.method = "hier";
    prof.err_budget = err_budget;
    prof.values.resize(M);
    prof.err_bounds.resize(M);

    parallel_for(M, [&](std::size_t i) {
        std::vector<double> terms;
        double trunc_err = 0.0;
        double abs_sum = 0.0;
        struct Node {
            int gen;
            std::uint64_t cell;
            Vec2 rel;  // cell anchor minus the target point
        };
        std::vector<Node> stack{{0, 0, -1.0 * geo.suffix(0, i)}};
        while (!stack.empty()) {
            Node nd = stack.back();
            stack.pop_back();
            if (nd.gen == depth) {
                if (nd.cell != i) {
                    double v = disp_kernel(kernel, nd.rel, nd.cell, i);
                    terms.push_back(v);
                    abs_sum += std::abs(v);
                }
                continue;
            }
            double rad = tree.radius[nd.gen][nd.cell];
            double d = (nd.rel + tree.centroid[nd.gen][nd.cell]).norm();
            bool far = d >= 8.0 * rad && d > 0.0;  // 4x cell diameter
            if (far) {
                double u = rad / d;
                double node_err = u * u / (2.0 * (1.0 - u));
                if (w * node_err <= per_leaf_budget) {
                    double cnt = tree.counts[nd.gen];
                    double v = cnt * std::log(d);
                    terms.push_back(v);
                    abs_sum += std::abs(v);
                    trunc_err += w * cnt * node_err;
                    continue;
                }
            }
            std::uint64_t anc = i / ancestor_div[nd.gen + 1];
            for (int c = N - 1; c >= 0; --c) {
                std::uint64_t child = nd.cell * N + static_cast<std::uint64_t>(c);
                Vec2 rel = child == anc
                               ? -1.0 * geo.suffix(nd.gen + 1, i)
                               : nd.rel + tree.child_off[nd.gen][child];
                stack.push_back({nd.gen + 1, child, rel});
            }
        }
        prof.values[i] = w * pairwise_sum(terms);
        prof.err_bounds[i] = trunc_err + w * detail::accumulation_bound(abs_sum, terms.size());
    });
    prof.finalize();
    return prof;
}

}  // namespace cantor
