#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cantor/common.hpp"

namespace cantor {

enum class AlphabetKind {
    LineBinary,    // letters {-1,+1} on the line
    RootsOfUnity,  // letters = N-th roots of unity in the plane, N >= 3
    RingAxis,      // letters {-1,+1} on the axis, each point carries S^{n-2}
};

inline const char* to_string(AlphabetKind k) {
    switch (k) {
        case AlphabetKind::LineBinary: return "line";
        case AlphabetKind::RootsOfUnity: return "roots";
        case AlphabetKind::RingAxis: return "ring";
    }
    return "?";
}

// The construction recipe: alphabet, contraction ratio r, spacing ceiling a.
struct GeneratorSpec {
    AlphabetKind kind = AlphabetKind::LineBinary;
    int symbols = 2;         // |alphabet|
    int ambient_dim = 2;     // ambient n for RingAxis (>= 3)
    double ratio = 0.0623;   // r
    double ceiling = 2.217;  // a
    int max_generation = 20;

    static GeneratorSpec line(double a, double r, int max_gen = 20) {
        GeneratorSpec s;
        s.kind = AlphabetKind::LineBinary;
        s.symbols = 2;
        s.ambient_dim = 2;
        s.ratio = r;
        s.ceiling = a;
        s.max_generation = max_gen;
        s.validate();
        return s;
    }

    static GeneratorSpec roots(int n_roots, double a, double r, int max_gen = 20) {
        GeneratorSpec s;
        s.kind = AlphabetKind::RootsOfUnity;
        s.symbols = n_roots;
        s.ambient_dim = 2;
        s.ratio = r;
        s.ceiling = a;
        s.max_generation = max_gen;
        s.validate();
        return s;
    }

    static GeneratorSpec ring(int ambient, double a, double r, int max_gen = 20) {
        GeneratorSpec s;
        s.kind = AlphabetKind::RingAxis;
        s.symbols = 2;
        s.ambient_dim = ambient;
        s.ratio = r;
        s.ceiling = a;
        s.max_generation = max_gen;
        s.validate();
        return s;
    }

    int alphabet_size() const { return symbols; }

    double weight(int generation) const {
        return 1.0 / static_cast<double>(ipow_u64(static_cast<std::uint64_t>(symbols), generation));
    }

    // Cantor-factor dimension ln|alphabet| / (-ln r).
    double delta() const { return std::log(static_cast<double>(symbols)) / (-std::log(ratio)); }

    // Left side of the separation condition: 1 - ar/(1-r).
    double condition_a_value() const { return 1.0 - ceiling * ratio / (1.0 - ratio); }

    // Parameter window: a in [1,3], r in (0, 1/16].
    bool window_ok() const {
        return ceiling >= 1.0 && ceiling <= 3.0 && ratio > 0.0 && ratio <= 1.0 / 16.0;
    }

    void validate() const {
        if (!(ratio > 0.0) || !(ratio < 1.0))
            throw usage_error("ratio r must lie in (0,1)");
        if (!(ceiling >= 1.0))
            throw usage_error("spacing ceiling a must satisfy a >= 1");
        if (max_generation < 1)
            throw usage_error("max_generation must be positive");
        switch (kind) {
            case AlphabetKind::LineBinary:
                if (!window_ok())
                    throw usage_error("LineBinary requires a in [1,3] and r in (0,1/16]");
                break;
            case AlphabetKind::RootsOfUnity:
                if (symbols < 3)
                    throw usage_error("RootsOfUnity requires N >= 3");
                if (!window_ok())
                    throw usage_error("RootsOfUnity requires a in [1,3] and r in (0,1/16]");
                if (!(delta() < 1.0))
                    throw usage_error("implied dimension must stay below 1 for planar alphabets");
                break;
            case AlphabetKind::RingAxis:
                if (ambient_dim < 3)
                    throw usage_error("RingAxis requires ambient dimension >= 3");
                // The sibling-increment gap needs spacing ratio >= 2.
                if (!(ceiling >= 2.0))
                    throw usage_error("RingAxis requires a >= 2");
                if (!(ceiling <= 3.0) || !(ratio <= 1.0 / 16.0))
                    throw usage_error("RingAxis requires a in [2,3] and r in (0,1/16]");
                break;
        }
        // Cell indices are packed into 64 bits.
        double bits = max_generation * std::log2(static_cast<double>(symbols));
        if (bits > 62)
            throw usage_error("max_generation too deep for packed 64-bit cell indices");
    }

    // Unit letter directions, indexed lexicographically.
    std::vector<Vec2> letter_dirs() const {
        std::vector<Vec2> dirs;
        if (kind == AlphabetKind::RootsOfUnity) {
            dirs.reserve(symbols);
            for (int j = 0; j < symbols; ++j) {
                double t = 2.0 * M_PI * j / symbols;
                dirs.push_back({std::cos(t), std::sin(t)});
            }
        } else {
            dirs = {{-1.0, 0.0}, {+1.0, 0.0}};
        }
        return dirs;
    }

    bool planar() const { return kind == AlphabetKind::RootsOfUnity; }
    bool collinear() const { return kind != AlphabetKind::RootsOfUnity; }

    std::string alphabet_label() const {
        switch (kind) {
            case AlphabetKind::LineBinary: return "line";
            case AlphabetKind::RootsOfUnity: return "roots:" + std::to_string(symbols);
            case AlphabetKind::RingAxis: return "ring:" + std::to_string(ambient_dim);
        }
        return "?";
    }
};

inline GeneratorSpec parse_alphabet(const std::string& label, double a, double r, int max_gen = 20) {
    if (label == "line") return GeneratorSpec::line(a, r, max_gen);
    if (label.rfind("roots:", 0) == 0)
        return GeneratorSpec::roots(std::stoi(label.substr(6)), a, r, max_gen);
    if (label.rfind("ring:", 0) == 0)
        return GeneratorSpec::ring(std::stoi(label.substr(5)), a, r, max_gen);
    throw usage_error("unknown alphabet '" + label + "' (expected line | roots:N | ring:n)");
}

}  // namespace cantor
