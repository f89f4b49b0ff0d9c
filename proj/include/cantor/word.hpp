#pragma once

#include <cstdint>

#include "cantor/common.hpp"
#include "cantor/generator.hpp"

namespace cantor {

// A word of the universal Cantor set, stored as packed letter indices.
// Cells are addressed by (generation, index in lexicographic order):
// index = sum_i digit_i * N^(generation-1-i), digit_0 the first letter.
struct Word {
    int generation = 0;
    std::uint64_t index = 0;

    friend bool operator==(const Word& a, const Word& b) {
        return a.generation == b.generation && a.index == b.index;
    }

    // 1-based position i -> letter digit in [0, N).
    int letter_at(int i, int n_symbols) const {
        std::uint64_t div = ipow_u64(static_cast<std::uint64_t>(n_symbols), generation - i);
        return static_cast<int>((index / div) % static_cast<std::uint64_t>(n_symbols));
    }

    Word prefix(int k, int n_symbols) const {
        std::uint64_t div = ipow_u64(static_cast<std::uint64_t>(n_symbols), generation - k);
        return Word{k, index / div};
    }

    Word parent(int n_symbols) const {
        return prefix(generation - 1, n_symbols);
    }

    Word child(int digit, int n_symbols) const {
        return Word{generation + 1,
                    index * static_cast<std::uint64_t>(n_symbols) + static_cast<std::uint64_t>(digit)};
    }
};

// First index of disagreement (1-based); 0 when the words coincide.
inline int first_disagreement(const Word& w1, const Word& w2, int n_symbols) {
    if (w1.generation != w2.generation)
        throw usage_error("first_disagreement: words of different generations");
    if (w1.index == w2.index) return 0;
    for (int i = 1; i <= w1.generation; ++i) {
        if (w1.letter_at(i, n_symbols) != w2.letter_at(i, n_symbols)) return i;
    }
    return 0;
}

// Ultrametric dist_r: r^(m-1) with m the first disagreement, 0 if equal.
inline double word_distance(const Word& w1, const Word& w2, double r, int n_symbols) {
    int m = first_disagreement(w1, w2, n_symbols);
    if (m == 0) return 0.0;
    return ipow(r, m - 1);
}

// Bi-Lipschitz brackets for the realized separation of two distinct cells:
// (1 - ar/(1-r)) r^(m-1)  <=  |f(w1) - f(w2)|  <=  a r^(m-1) / (1-r).
inline std::pair<double, double> cell_separation_bounds(const Word& w1, const Word& w2,
                                                        const GeneratorSpec& spec) {
    int m = first_disagreement(w1, w2, spec.alphabet_size());
    if (m == 0) throw usage_error("cell_separation_bounds: identical words");
    double rm = ipow(spec.ratio, m - 1);
    double lower = spec.condition_a_value() * rm;
    double upper = spec.ceiling * rm / (1.0 - spec.ratio);
    return {lower, upper};
}

}  // namespace cantor
