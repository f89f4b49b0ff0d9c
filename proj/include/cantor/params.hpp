#pragma once

#include <vector>

#include "cantor/common.hpp"
#include "cantor/generator.hpp"
#include "cantor/word.hpp"

namespace cantor {

// Spacing coefficients a_k(word), one per cell of each generation k.
// a_k depends only on the first k letters, enforced by keying on words.
// Building K_n needs a_0..a_{n-1}, i.e. depth >= n. The root value a_0 = 1
// is the construction's normalization (the driver passes it); it stays
// implicit in serialized form.
class ParamTree {
public:
    ParamTree() = default;

    int depth() const { return static_cast<int>(levels_.size()); }

    // values for all words of generation k (lexicographic order)
    const std::vector<double>& generation(int k) const {
        if (k < 0 || k >= depth())
            throw usage_error("ParamTree: no parameters stored for generation " + std::to_string(k));
        return levels_[static_cast<std::size_t>(k)];
    }

    double value(const Word& w, int n_symbols) const {
        if (w.generation >= depth())
            throw usage_error("ParamTree: missing parameter for a prefix at generation " +
                              std::to_string(w.generation));
        (void)n_symbols;
        return levels_[static_cast<std::size_t>(w.generation)][w.index];
    }

    // Append the coefficients a_k for every word of generation k = depth().
    void append_generation(const std::vector<double>& values, const GeneratorSpec& spec) {
        int k = depth();
        std::uint64_t expected = ipow_u64(static_cast<std::uint64_t>(spec.alphabet_size()), k);
        if (values.size() != expected)
            throw usage_error("ParamTree: generation " + std::to_string(k) + " expects " +
                              std::to_string(expected) + " values");
        for (std::uint64_t i = 0; i < expected; ++i) {
            double v = values[i];
            if (!(v >= 1.0 && v <= spec.ceiling))
                throw infeasibility_error(
                    "spacing parameter outside [1, a] at generation " + std::to_string(k) +
                        ", cell " + std::to_string(i) + ": " + to_decimal_string(v),
                    k, i, v, spec.ceiling);
        }
        levels_.push_back(values);
    }

    friend bool operator==(const ParamTree& a, const ParamTree& b) {
        return a.levels_ == b.levels_;
    }

    // True when `longer` stores exactly this tree plus possibly more levels.
    bool is_prefix_of(const ParamTree& longer) const {
        if (depth() > longer.depth()) return false;
        for (int k = 0; k < depth(); ++k)
            if (levels_[static_cast<std::size_t>(k)] != longer.levels_[static_cast<std::size_t>(k)])
                return false;
        return true;
    }

private:
    std::vector<std::vector<double>> levels_;
};

}  // namespace cantor
