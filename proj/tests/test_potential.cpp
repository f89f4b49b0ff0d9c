#include <doctest.h>

#include "cantor/hier.hpp"
#include "cantor/construct.hpp"
#include "cantor/potential.hpp"

#include "oracles.hpp"

using namespace cantor;

namespace {

Level line_level(double a, double r, int n, double a_vals = 1.0) {
    GeneratorSpec spec = GeneratorSpec::line(a, r, 16);
    auto tree = std::make_shared<ParamTree>();
    for (int k = 0; k < n; ++k)
        tree->append_generation(std::vector<double>(ipow_u64(2, k), k == 0 ? 1.0 : a_vals), spec);
    return build_level(spec, tree, n);
}

}  // namespace

TEST_CASE("K_1 potential vanishes (unit sibling distance)") {
    Level k1 = line_level(2.217, 0.0623, 1);
    PotentialProfile prof = potential_profile(k1, KernelSpec::log_kernel_spec());
    CHECK(prof.values[0] == doctest::Approx(0.0).epsilon(1e-16));
    CHECK(prof.values[1] == doctest::Approx(0.0).epsilon(1e-16));
    CHECK(prof.oscillation == 0.0);
}

TEST_CASE("K_2 all-ones profile against the 12-term hand expansion") {
    const double r = 0.0623;
    Level k2 = line_level(2.217, r, 2);
    PotentialProfile prof = potential_profile(k2, KernelSpec::log_kernel_spec());
    // outer points see distances r, 1, 1+r; inner points r, 1-r, 1
    long double g_outer = 0.25L * (logl((long double)r) + logl(1.0L) + logl(1.0L + r));
    long double g_inner = 0.25L * (logl((long double)r) + logl(1.0L - r) + logl(1.0L));
    CHECK(prof.values[0] == doctest::Approx((double)g_outer).epsilon(1e-14));
    CHECK(prof.values[1] == doctest::Approx((double)g_inner).epsilon(1e-14));
    CHECK(prof.values[2] == doctest::Approx((double)g_inner).epsilon(1e-14));
    CHECK(prof.values[3] == doctest::Approx((double)g_outer).epsilon(1e-14));
    CHECK(prof.c_n == doctest::Approx((double)g_inner).epsilon(1e-14));
    CHECK(prof.oscillation == doctest::Approx((double)(g_outer - g_inner)).epsilon(1e-12));
}

TEST_CASE("profile invariants: c_n bounds every value") {
    Level lvl = line_level(2.217, 0.0623, 6);
    PotentialProfile prof = potential_profile(lvl, KernelSpec::log_kernel_spec());
    CHECK(prof.oscillation >= 0.0);
    for (double v : prof.values) {
        REQUIRE(v >= prof.c_n);
        REQUIRE(v <= prof.c_n + prof.oscillation);
    }
    CHECK_THROWS_AS(potential_profile(root_level(GeneratorSpec::line(2.0, 0.05)),
                                      KernelSpec::log_kernel_spec()),
                    usage_error);
}

TEST_CASE("translation invariance of the log profile") {
    Level lvl = line_level(2.217, 0.0623, 6);
    PotentialProfile base = potential_profile(lvl, KernelSpec::log_kernel_spec());
    Level shifted = lvl;
    for (auto& p : shifted.points) p = p + Vec2{17.25, -3.5};
    // shifted coordinates, same words: displacements are unchanged, so the
    // word-geometry path is exactly invariant; also check the coordinate path
    PotentialProfile moved = potential_profile(shifted, KernelSpec::log_kernel_spec());
    for (std::size_t i = 0; i < base.values.size(); ++i)
        REQUIRE(std::abs(base.values[i] - moved.values[i]) <= 1e-12);
}

TEST_CASE("potential_at agrees with an independent naive loop") {
    Level lvl = line_level(2.217, 0.0623, 7);
    KernelSpec lk = KernelSpec::log_kernel_spec();
    SplitMix64 rng = stream_for(42, 0);
    for (int s = 0; s < 20; ++s) {
        Vec2 y{2.0 * rng.uniform() - 1.0, 0.3 + rng.uniform()};
        REQUIRE(potential_at(y, lvl, lk) ==
                doctest::Approx(oracles::naive_potential_at(y, lvl)).epsilon(1e-12));
    }
    // K_0 as a single unit mass: |y| = 1 gives 0
    Level k0 = root_level(GeneratorSpec::line(2.217, 0.0623));
    CHECK(potential_at({std::cos(0.3), std::sin(0.3)}, k0, lk) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(potential_at(lvl.points[3], lvl, lk), domain_error);
}

TEST_CASE("profiles are bit-identical across thread counts") {
    Level lvl = line_level(2.217, 0.0623, 8);
    KernelSpec lk = KernelSpec::log_kernel_spec();
    setenv("CANTOR_THREADS", "1", 1);
    PotentialProfile one = potential_profile(lvl, lk);
    setenv("CANTOR_THREADS", "7", 1);
    PotentialProfile seven = potential_profile(lvl, lk);
    unsetenv("CANTOR_THREADS");
    for (std::size_t i = 0; i < one.values.size(); ++i)
        REQUIRE(one.values[i] == seven.values[i]);
}

TEST_CASE("ring-kernel profile on a small axis level") {
    GeneratorSpec spec = GeneratorSpec::ring(3, 2.5, 0.01, 6);
    auto tree = std::make_shared<ParamTree>();
    tree->append_generation({1.0}, spec);
    tree->append_generation({2.0, 2.0}, spec);
    Level lvl = build_level(spec, tree, 2);
    KernelSpec rk = KernelSpec::ring_kernel_spec(3, 1e-11);
    PotentialProfile prof = potential_profile(lvl, rk);
    // reflection symmetry of the axis construction
    CHECK(prof.values[0] == doctest::Approx(prof.values[3]).epsilon(1e-12));
    CHECK(prof.values[1] == doctest::Approx(prof.values[2]).epsilon(1e-12));
    // against the elliptic oracle, pair by pair
    double w = lvl.weight();
    double expect = 0.0;
    for (int j = 1; j < 4; ++j)
        expect += oracles::ring_kernel_n3(lvl.points[j].x - lvl.points[0].x, 1.0);
    CHECK(prof.values[0] == doctest::Approx(w * expect).epsilon(1e-9));
    // certified error bound covers the quadrature tolerance
    CHECK(prof.max_err <= 1e-9);
}

TEST_CASE("hier profile within its certified budget, n <= 10 (log kernel)") {
    GeneratorSpec spec = GeneratorSpec::line(2.217, 0.0623, 12);
    RunOptions opt;
    RunResult run = run_construction(spec, 10, opt);
    KernelSpec lk = KernelSpec::log_kernel_spec();
    for (int n = 2; n <= 10; ++n) {
        Level lvl = build_level(spec, run.params, n);
        PotentialProfile naive = potential_profile(lvl, lk);
        PotentialProfile hier = hier_potential_profile(lvl, lk, 1e-9);
        double dev = 0.0;
        for (std::size_t i = 0; i < naive.values.size(); ++i)
            dev = std::max(dev, std::abs(naive.values[i] - hier.values[i]));
        REQUIRE(dev <= 1e-9);
        REQUIRE(hier.max_err <= 1e-9);
    }
}

TEST_CASE("hier with infinite budget falls back to the exact path") {
    Level lvl = line_level(2.217, 0.0623, 6);
    KernelSpec lk = KernelSpec::log_kernel_spec();
    PotentialProfile naive = potential_profile(lvl, lk);
    PotentialProfile inf = hier_potential_profile(lvl, lk,
                                                  std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < naive.values.size(); ++i)
        REQUIRE(naive.values[i] == inf.values[i]);
}

TEST_CASE("hier rejects unattainable budgets with the attainable bound") {
    Level lvl = line_level(2.217, 0.0623, 8);
    KernelSpec lk = KernelSpec::log_kernel_spec();
    CHECK_THROWS_AS(hier_potential_profile(lvl, lk, 0.0), usage_error);
    try {
        hier_potential_profile(lvl, lk, 1e-18);
        FAIL("expected budget_error");
    } catch (const budget_error& e) {
        CHECK(e.attainable > 1e-18);
    }
}
