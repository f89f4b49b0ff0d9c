#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cantor {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors. The CLI maps usage_error -> exit 2, infeasibility/assertion -> 1.
// ---------------------------------------------------------------------------

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Ring kernel evaluated at its (t,R)=(0,1) singularity.
struct singularity_error : domain_error {
    using domain_error::domain_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A spacing parameter left [1,a], or an oscillation exceeded its budget.
struct infeasibility_error : std::runtime_error {
    int generation = -1;
    std::uint64_t cell = 0;
    double oscillation = 0.0;
    double budget = 0.0;
    infeasibility_error(const std::string& msg, int gen, std::uint64_t cell_idx,
                        double osc, double bud)
        : std::runtime_error(msg), generation(gen), cell(cell_idx),
          oscillation(osc), budget(bud) {}
};

// Requested certified-error budget cannot be attained; carries what can.
struct budget_error : std::runtime_error {
    double attainable = 0.0;
    budget_error(const std::string& msg, double att)
        : std::runtime_error(msg), attainable(att) {}
};

struct degenerate_geometry_error : std::runtime_error {
    std::uint64_t cell_a = 0;
    std::uint64_t cell_b = 0;
    degenerate_geometry_error(const std::string& msg, std::uint64_t a, std::uint64_t b)
        : std::runtime_error(msg), cell_a(a), cell_b(b) {}
};

// ---------------------------------------------------------------------------
// Small vector type. Planar points use (x, y); axis variants keep y = 0.
// For the ring kernel a coordinate is read as (axis offset, radial distance).
// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double norm() const { return std::hypot(x, y); }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// Integer powers (exact for results below 2^53).
// ---------------------------------------------------------------------------

inline std::uint64_t ipow_u64(std::uint64_t base, int e) {
    std::uint64_t v = 1;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

inline double ipow(double base, int e) {
    double v = 1.0;
    bool inv = e < 0;
    for (int i = 0, m = inv ? -e : e; i < m; ++i) v *= base;
    return inv ? 1.0 / v : v;
}

// ---------------------------------------------------------------------------
// Deterministic summation: fixed-shape pairwise reduction. The result does
// not depend on thread count because the tree shape depends only on n.
// ---------------------------------------------------------------------------

inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

// ---------------------------------------------------------------------------
// Thread pool-free parallel loop with static partitioning. Writes to
// disjoint slots keep results independent of the worker count.
// CANTOR_THREADS caps the worker count.
// ---------------------------------------------------------------------------

inline unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CANTOR_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v < 1024) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

template <class F>
void parallel_for(std::size_t n, F&& body, unsigned workers = 0) {
    if (workers == 0) workers = thread_cap();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = static_cast<std::size_t>(w) * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, w, &body, &errors] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Counter-based RNG streams: one independent stream per walk index, so
// Monte Carlo results are reproducible and thread-count invariant.
// ---------------------------------------------------------------------------

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // in [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
};

inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
    mix.next();
    return mix;
}

// ---------------------------------------------------------------------------
// Round-trip exact decimal serialization for doubles.
// ---------------------------------------------------------------------------

inline std::string to_decimal_string(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_decimal(const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
}

// FNV-1a, used for run-manifest content hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace cantor
