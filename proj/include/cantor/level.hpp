#pragma once

#include <memory>
#include <vector>

#include "cantor/common.hpp"
#include "cantor/generator.hpp"
#include "cantor/params.hpp"
#include "cantor/word.hpp"

namespace cantor {

// f_n(word) = sum_{k=1..n} (a_{k-1}(word)/2) r^{k-1} letter_k.
// Terms are summed smallest-first so rebuilding a level from a persisted
// ParamTree reproduces coordinates bit-identically.
inline Vec2 point_of_word(const Word& w, const ParamTree& params, const GeneratorSpec& spec) {
    if (w.generation > 0 && params.depth() < w.generation)
        throw usage_error("point_of_word: ParamTree misses a prefix parameter");
    const std::vector<Vec2> dirs = spec.letter_dirs();
    const int N = spec.alphabet_size();
    double x = 0.0, y = 0.0;
    double rpow = ipow(spec.ratio, w.generation - 1);
    for (int k = w.generation; k >= 1; --k) {
        Word pre = w.prefix(k - 1, N);
        double a_val = params.value(pre, N);
        int digit = w.letter_at(k, N);
        double scale = 0.5 * a_val * rpow;
        x += scale * dirs[static_cast<std::size_t>(digit)].x;
        y += scale * dirs[static_cast<std::size_t>(digit)].y;
        rpow /= spec.ratio;
    }
    return {x, y};
}

// The finite approximation K_n: one coordinate per word of length n,
// uniform weight |alphabet|^{-n} per point. Immutable after construction.
struct Level {
    GeneratorSpec spec;
    int generation = 0;
    std::vector<Vec2> points;
    std::shared_ptr<const ParamTree> params;

    double weight() const { return spec.weight(generation); }
    std::size_t size() const { return points.size(); }
    Word word_of(std::uint64_t cell) const { return Word{generation, cell}; }
};

inline Level build_level(const GeneratorSpec& spec, std::shared_ptr<const ParamTree> params, int n) {
    if (n < 0) throw usage_error("build_level: negative generation");
    if (n > 0 && params->depth() < n)
        throw usage_error("build_level: ParamTree depth " + std::to_string(params->depth()) +
                          " cannot build generation " + std::to_string(n));
    Level lvl;
    lvl.spec = spec;
    lvl.generation = n;
    lvl.params = std::move(params);
    std::uint64_t count = ipow_u64(static_cast<std::uint64_t>(spec.alphabet_size()), n);
    lvl.points.resize(count);
    const ParamTree& pt = *lvl.params;
    parallel_for(count, [&](std::size_t i) {
        lvl.points[i] = point_of_word(Word{n, i}, pt, spec);
    });
    return lvl;
}

inline Level root_level(const GeneratorSpec& spec) {
    return build_level(spec, std::make_shared<ParamTree>(), 0);
}

// Each parent spawns |alphabet| children at offsets (a_{n-1}/2) r^{n-1} letter.
// new_params holds one value per parent word, in lexicographic order.
inline Level expand_level(const Level& parent, const std::vector<double>& new_params,
                          const GeneratorSpec& spec) {
    if (parent.params->depth() != parent.generation)
        throw usage_error("expand_level: parent ParamTree depth does not match its generation");
    auto next = std::make_shared<ParamTree>(*parent.params);
    next->append_generation(new_params, spec);  // throws infeasibility_error on bad values
    return build_level(spec, std::move(next), parent.generation + 1);
}

// Containment slack: descendants of a generation-m point stay within
// a r^m/(1-r) of it (used to bracket dist(y,K) by dist(y,K_m)).
inline double descendant_slack(const GeneratorSpec& spec, int m) {
    return spec.ceiling * ipow(spec.ratio, m) / (1.0 - spec.ratio);
}

// ---------------------------------------------------------------------------
// Word-based pair displacements. Absolute coordinates lose the separation of
// deep siblings (r^{n-1} drops below one ulp of an O(1) coordinate near
// n ~ 14 at the default r), so every kernel summation computes displacements
// from the common ancestor instead: x - y = S[m-1][x] - S[m-1][y], where
// S[k][i] is the offset of point i from its generation-k ancestor anchor.
// This keeps full relative precision at every generation.
// ---------------------------------------------------------------------------

class PairGeometry {
public:
    PairGeometry() = default;

    explicit PairGeometry(const Level& level)
        : n_(level.generation),
          n_sym_(level.spec.alphabet_size()),
          count_(level.size()) {
        const GeneratorSpec& spec = level.spec;
        const ParamTree& params = *level.params;
        const std::vector<Vec2> dirs = spec.letter_dirs();
        suffix_.resize(static_cast<std::size_t>(n_ + 1) * count_);
        digits_.resize(static_cast<std::size_t>(std::max(n_, 1)) * count_);
        std::vector<double> rpow(static_cast<std::size_t>(n_ + 1), 1.0);
        for (int k = 1; k <= n_; ++k) rpow[k] = rpow[k - 1] * spec.ratio;
        parallel_for(count_, [&](std::size_t i) {
            Word w{n_, i};
            suffix_[static_cast<std::size_t>(n_) * count_ + i] = {0.0, 0.0};
            for (int k = n_; k >= 1; --k) {
                int digit = w.letter_at(k, n_sym_);
                digits_[i * static_cast<std::size_t>(n_) + (k - 1)] =
                    static_cast<std::uint8_t>(digit);
                double a_val = params.value(w.prefix(k - 1, n_sym_), n_sym_);
                double scale = 0.5 * a_val * rpow[k - 1];
                Vec2 up = suffix_[static_cast<std::size_t>(k) * count_ + i];
                suffix_[static_cast<std::size_t>(k - 1) * count_ + i] =
                    up + scale * dirs[static_cast<std::size_t>(digit)];
            }
        });
    }

    int generation() const { return n_; }

    // first disagreement index (1-based), 0 for identical indices
    int disagreement(std::uint64_t i, std::uint64_t j) const {
        if (i == j) return 0;
        const std::uint8_t* di = digits_.data() + i * static_cast<std::size_t>(n_);
        const std::uint8_t* dj = digits_.data() + j * static_cast<std::size_t>(n_);
        for (int k = 0; k < n_; ++k)
            if (di[k] != dj[k]) return k + 1;
        return 0;
    }

    // displacement point_i - point_j, exact relative to the common ancestor
    Vec2 disp(std::uint64_t i, std::uint64_t j) const {
        int m = disagreement(i, j);
        if (m == 0) return {0.0, 0.0};
        const std::size_t base = static_cast<std::size_t>(m - 1) * count_;
        return suffix_[base + i] - suffix_[base + j];
    }

    // offset of point i from its generation-k ancestor anchor
    Vec2 suffix(int k, std::uint64_t i) const {
        return suffix_[static_cast<std::size_t>(k) * count_ + i];
    }

    // cross-generation displacement (point of this) - (point of other), where
    // both levels share the ParamTree prefix; words may differ in length.
    Vec2 cross_disp(std::uint64_t i, const PairGeometry& other, std::uint64_t j) const {
        int shared = std::min(n_, other.n_);
        int m = shared + 1;
        const std::uint8_t* di = digits_.data() + i * static_cast<std::size_t>(n_);
        const std::uint8_t* dj = other.digits_.data() + j * static_cast<std::size_t>(other.n_);
        for (int k = 0; k < shared; ++k) {
            if (di[k] != dj[k]) { m = k + 1; break; }
        }
        return suffix(m - 1, i) - other.suffix(m - 1, j);
    }

private:
    int n_ = 0;
    int n_sym_ = 2;
    std::size_t count_ = 0;
    std::vector<Vec2> suffix_;
    std::vector<std::uint8_t> digits_;
};

// Exact nearest point of the level; collinear variants use the fact that
// lexicographic order equals coordinate order on the axis.
inline std::pair<double, std::uint64_t> nearest_point(const Level& lvl, Vec2 y) {
    const auto& pts = lvl.points;
    if (pts.empty()) throw usage_error("nearest_point: empty level");
    if (lvl.spec.collinear() && pts.size() > 8) {
        // binary search on x; nearest in the plane is nearest in x
        std::size_t lo = 0, hi = pts.size();
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (pts[mid].x <= y.x) lo = mid; else hi = mid;
        }
        double best = dist(pts[lo], y);
        std::uint64_t best_i = lo;
        if (hi < pts.size()) {
            double d2 = dist(pts[hi], y);
            if (d2 < best) { best = d2; best_i = hi; }
        }
        return {best, best_i};
    }
    double best = dist(pts[0], y);
    std::uint64_t best_i = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double d = dist(pts[i], y);
        if (d < best) { best = d; best_i = i; }
    }
    return {best, best_i};
}

}  // namespace cantor
