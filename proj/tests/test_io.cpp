#include <doctest.h>

#include <filesystem>

#include "cantor/construct.hpp"
#include "cantor/io.hpp"

using namespace cantor;

TEST_CASE("decimal strings round-trip doubles exactly") {
    SplitMix64 rng = stream_for(3, 3);
    for (int i = 0; i < 2000; ++i) {
        double v = (rng.uniform() - 0.5) * std::pow(10.0, 30.0 * (rng.uniform() - 0.5));
        REQUIRE(parse_decimal(to_decimal_string(v)) == v);
    }
    CHECK(parse_decimal(to_decimal_string(2.217)) == 2.217);
}

TEST_CASE("params JSON schema: spec block plus per-generation arrays") {
    GeneratorSpec spec = GeneratorSpec::line(2.217, 0.0623, 8);
    RunResult run = run_construction(spec, 4, RunOptions{});
    json j = params_to_json(spec, *run.params);
    CHECK(j["spec"]["alphabet"] == "line");
    CHECK(j["params"].contains("1"));
    CHECK(j["params"]["2"].size() == 4);
    CHECK_FALSE(j["params"].contains("0"));  // implicit root
    auto [spec2, tree2] = params_from_json(j);
    CHECK(*tree2 == *run.params);
    CHECK(spec2.ceiling == spec.ceiling);
}

TEST_CASE("level CSV carries the documented columns") {
    GeneratorSpec spec = GeneratorSpec::line(2.217, 0.0623, 8);
    Level k1 = expand_level(root_level(spec), {1.0}, spec);
    std::string csv = level_csv(k1);
    CHECK(csv.rfind("generation,cell_index,coord_x,weight\n", 0) == 0);
    CHECK(csv.find("1,0,-0.5,0.5\n") != std::string::npos);

    GeneratorSpec quad = GeneratorSpec::roots(4, 2.63, 0.033, 8);
    Level q1 = expand_level(root_level(quad), {1.0}, quad);
    CHECK(level_csv(q1).rfind("generation,cell_index,coord_x,coord_y,weight\n", 0) == 0);
}

TEST_CASE("trace CSV has the contracted column order") {
    GeneratorSpec spec = GeneratorSpec::line(2.217, 0.0623, 8);
    RunResult run = run_construction(spec, 3, RunOptions{});
    std::string csv = trace_csv(run.trace);
    CHECK(csv.rfind("n,c_n,osc,osc_normalized,a_min,a_max,sup_delta23,drift,budget,", 0) == 0);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 4);  // header + 3 generations
}

TEST_CASE("manifest content hash is stable and content-sensitive") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cantor_io_test";
    fs::create_directories(dir);
    write_file(dir / "a.txt", "hello\n");
    std::string h1 = content_hash(dir / "a.txt");
    CHECK(h1 == content_hash(dir / "a.txt"));
    write_file(dir / "a.txt", "hello!\n");
    CHECK(h1 != content_hash(dir / "a.txt"));
    fs::remove_all(dir);
}

TEST_CASE("directory lock blocks concurrent runs") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "cantor_lock_test";
    fs::remove_all(dir);
    {
        DirLock lock(dir);
        CHECK_THROWS_AS(DirLock{dir}, usage_error);
    }
    {
        DirLock relock(dir);  // released on scope exit above
    }
    fs::remove_all(dir);
}

TEST_CASE("profile summary JSON fields") {
    GeneratorSpec spec = GeneratorSpec::line(2.217, 0.0623, 8);
    RunResult run = run_construction(spec, 3, RunOptions{});
    json j = profile_summary_json(run.final_profile);
    CHECK(j["n"] == 3);
    CHECK(j["method"] == "naive");
    CHECK(j.contains("c_n"));
    CHECK(j.contains("oscillation"));
}
