// Command-line driver: reproducible construction, feasibility, and
// verification experiments. See FORMATS.md for the artifact contracts.

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cantor/construct.hpp"
#include "cantor/feasibility.hpp"
#include "cantor/io.hpp"
#include "cantor/verify.hpp"
#include "cantor/wos.hpp"

using namespace cantor;
using Clock = std::chrono::steady_clock;

namespace {

struct CommonArgs {
    double a = 2.217;  // the headline line construction by default
    double r = 0.0623;
    std::string alphabet = "line";
    int n = 12;
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(read_file(path));
}

// --config supplies defaults; explicit flags win; CANTOR_SEED overrides both.
void merge_config(CLI::App* cmd, CommonArgs& c, const json& cfg) {
    auto take = [&](const char* flag, const char* key, auto& slot) {
        using T = std::decay_t<decltype(slot)>;
        if (cmd->count(flag) == 0 && cfg.contains(key)) slot = cfg.at(key).get<T>();
    };
    take("--a", "a", c.a);
    take("--r", "r", c.r);
    take("--alphabet", "alphabet", c.alphabet);
    take("--n", "n", c.n);
    take("--seed", "seed", c.seed);
    take("--out", "out", c.out);
    if (const char* env = std::getenv("CANTOR_SEED"))
        c.seed = std::strtoull(env, nullptr, 10);
}

void add_common(CLI::App* cmd, CommonArgs& c, const std::string& default_out) {
    c.out = default_out;
    cmd->add_option("--a", c.a, "spacing ceiling a");
    cmd->add_option("--r", c.r, "contraction ratio r");
    cmd->add_option("--alphabet", c.alphabet, "line | roots:N | ring:n");
    cmd->add_option("--n", c.n, "generation depth");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--config", c.config, "JSON config merged under explicit-flag precedence");
}

RunManifest start_manifest(const std::string& sub, const GeneratorSpec& spec,
                           std::uint64_t seed, int argc, char** argv) {
    RunManifest man;
    man.subcommand = sub;
    man.spec = spec_to_json(spec);
    man.seed = seed;
    for (int i = 1; i < argc; ++i) man.args.push_back(argv[i]);
    return man;
}

void emit(RunManifest& man, const fs::path& dir, const std::string& name,
          const std::string& content) {
    write_file(dir / name, content);
    man.artifacts.emplace_back(name, content_hash(dir / name));
}

void finish_manifest(RunManifest& man, const fs::path& dir, Clock::time_point t0) {
    man.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    write_file(dir / "manifest.json", man.to_json().dump(2) + "\n");
}

RunResult construct_or_load(const CommonArgs& c, const std::string& params_path, bool control,
                            const std::string& method, double err_budget, bool diagnostics,
                            bool force) {
    if (!params_path.empty()) {
        auto [spec, tree] = params_from_json(json::parse(read_file(params_path)));
        RunResult res;
        res.spec = spec;
        res.params = tree;
        res.final_level = build_level(spec, tree, tree->depth());
        res.final_profile = potential_profile(res.final_level, kernel_for(spec));
        res.feasibility = feasible(spec);
        res.width = increment_width(spec, kernel_for(spec));
        return res;
    }
    GeneratorSpec spec = parse_alphabet(c.alphabet, c.a, c.r, std::max(c.n, 1));
    RunOptions opt;
    opt.hier = method == "hier";
    opt.err_budget = err_budget;
    opt.diagnostics = diagnostics;
    opt.force = force;
    opt.calibrate = !control;
    opt.progress = [](int n) { std::fprintf(stderr, "generation %d\n", n); };
    return run_construction(spec, c.n, opt);
}

int run_calibrate(const CommonArgs& c, const std::string& method, double err_budget,
                  bool diagnostics, bool force, int argc, char** argv, bool control) {
    auto t0 = Clock::now();
    fs::path dir = c.out;
    DirLock lock(dir);
    RunResult run = construct_or_load(c, "", control, method, err_budget, diagnostics, force);
    RunManifest man = start_manifest(control ? "calibrate(control)" : "calibrate", run.spec,
                                     c.seed, argc, argv);
    emit(man, dir, "params.json", params_to_json(run.spec, *run.params).dump(2) + "\n");
    emit(man, dir, "trace.csv", trace_csv(run.trace));
    emit(man, dir, "level.csv", level_csv(run.final_level));
    emit(man, dir, "profile.csv", profile_csv(run.final_profile));
    json summary;
    summary["ok"] = run.ok;
    summary["precheck_pass"] = run.precheck_pass;
    summary["width"] = run.width;
    summary["feasibility"] = feasibility_json(run.feasibility);
    summary["final"] = profile_summary_json(run.final_profile);
    emit(man, dir, "summary.json", summary.dump(2) + "\n");
    finish_manifest(man, dir, t0);
    std::cout << summary.dump(2) << std::endl;
    return run.ok ? 0 : 1;
}

int run_bounds(const CommonArgs& c, bool search, int grid, int rounds, bool raster,
               int argc, char** argv) {
    auto t0 = Clock::now();
    json out_json;
    if (search) {
        SearchResult res = search_max_delta(c.alphabet, grid, rounds);
        out_json["search"] = true;
        out_json["found"] = res.found;
        out_json["evaluations"] = res.evaluations;
        if (res.found) out_json["best"] = feasibility_json(res.best);
        out_json["reference_point"] = feasibility_json(feasible(c.a, c.r, c.alphabet));
    } else {
        FeasibilityReport rep = feasible(c.a, c.r, c.alphabet);
        out_json = feasibility_json(rep);
    }
    std::cout << out_json.dump(2) << std::endl;
    if (!c.out.empty()) {
        fs::path dir = c.out;
        DirLock lock(dir);
        RunManifest man;
        man.subcommand = "bounds";
        man.spec = {{"alphabet", c.alphabet}, {"a", to_decimal_string(c.a)},
                    {"r", to_decimal_string(c.r)}};
        man.seed = c.seed;
        for (int i = 1; i < argc; ++i) man.args.push_back(argv[i]);
        emit(man, dir, "bounds.json", out_json.dump(2) + "\n");
        if (raster) {
            std::ostringstream csv;
            csv << "a,r,delta,margin,feasible\n";
            for (int i = 0; i < grid; ++i) {
                double a = 1.0 + (3.0 - 1.0) * i / (grid - 1);
                for (int j = 0; j < grid; ++j) {
                    double r = 1e-4 * std::pow((1.0 / 16.0) / 1e-4,
                                               static_cast<double>(j) / (grid - 1));
                    FeasibilityReport rep = feasible(a, r, c.alphabet);
                    csv << to_decimal_string(a) << ',' << to_decimal_string(r) << ','
                        << to_decimal_string(rep.delta) << ',' << to_decimal_string(rep.margin)
                        << ',' << (rep.feasible ? 1 : 0) << '\n';
                }
            }
            emit(man, dir, "margin_raster.csv", csv.str());
        }
        finish_manifest(man, dir, t0);
    }
    return 0;
}

int run_green(const CommonArgs& c, const std::string& params_path, int samples,
              int argc, char** argv) {
    auto t0 = Clock::now();
    fs::path dir = c.out;
    DirLock lock(dir);
    RunResult run = construct_or_load(c, params_path, false, "naive", 1e-9, false, false);
    const GeneratorSpec& spec = run.spec;
    KernelSpec lk = KernelSpec::log_kernel_spec();
    RunManifest man = start_manifest("green", spec, c.seed, argc, argv);

    // ring estimate: fitted constant per generation 4..min(10, n)
    std::ostringstream ring_csv;
    ring_csv << "n,c_fit,base\n";
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (int k = 4; k <= std::min(10, run.final_level.generation); ++k) {
        Level lvl = build_level(spec, run.params, k);
        PotentialProfile prof = potential_profile(lvl, lk);
        double rad = 0.5 * ipow(spec.ratio, k - 1);
        double base = prof.c_n + lvl.weight() * std::log(rad);
        SplitMix64 rng = stream_for(c.seed, static_cast<std::uint64_t>(k));
        double worst = 0.0;
        for (int s = 0; s < 64; ++s) {
            std::uint64_t pick = rng.next() % lvl.size();
            double ang = 2.0 * M_PI * rng.uniform();
            Vec2 y = lvl.points[pick] + Vec2{rad * std::cos(ang), rad * std::sin(ang)};
            worst = std::max(worst, std::abs(potential_at(y, lvl, lk) - base) / lvl.weight());
        }
        ring_csv << k << ',' << to_decimal_string(worst) << ',' << to_decimal_string(base) << '\n';
        cmin = std::min(cmin, worst);
        cmax = std::max(cmax, worst);
    }
    emit(man, dir, "ring_estimate.csv", ring_csv.str());

    std::vector<double> scales;
    for (int e = 2; e <= 10; ++e) scales.push_back(std::pow(2.0, -e));
    GreenSweep sweep = green_ratio_sweep(run.final_level, run.final_profile, scales, samples, c.seed);
    emit(man, dir, "green_ratios.csv", green_sweep_csv(sweep));

    json summary;
    summary["ring_c_min"] = cmin;
    summary["ring_c_max"] = cmax;
    summary["ring_c_variation"] = (cmax - cmin) / cmin;
    summary["ratio_global_min"] = sweep.global_min;
    summary["ratio_global_max"] = sweep.global_max;
    summary["ratio_band"] = sweep.global_max / sweep.global_min;
    summary["seed"] = c.seed;
    emit(man, dir, "summary.json", summary.dump(2) + "\n");
    finish_manifest(man, dir, t0);
    std::cout << summary.dump(2) << std::endl;
    return 0;
}

int run_ahlfors(const CommonArgs& c, const std::string& params_path, int samples,
                int argc, char** argv) {
    auto t0 = Clock::now();
    fs::path dir = c.out;
    DirLock lock(dir);
    RunResult run = construct_or_load(c, params_path, false, "naive", 1e-9, false, false);
    AhlforsReport rep = ahlfors_report(run.final_level, run.spec, samples, c.seed);
    RunManifest man = start_manifest("ahlfors", run.spec, c.seed, argc, argv);
    emit(man, dir, "ahlfors.csv", ahlfors_csv(rep));
    json summary;
    summary["min_ratio"] = rep.min_ratio;
    summary["max_ratio"] = rep.max_ratio;
    summary["c0_squared"] = rep.c0_squared;
    summary["degenerate"] = rep.degenerate;
    summary["seed"] = c.seed;
    emit(man, dir, "summary.json", summary.dump(2) + "\n");
    finish_manifest(man, dir, t0);
    std::cout << summary.dump(2) << std::endl;
    return 0;
}

int run_wos(const CommonArgs& c, bool control, double eps, std::uint64_t walks, int depth,
            double pole_x, double pole_y, int argc, char** argv) {
    auto t0 = Clock::now();
    fs::path dir = c.out;
    DirLock lock(dir);
    RunResult run = construct_or_load(c, "", control, "naive", 1e-9, false, false);
    if (eps <= 0.0) eps = 10.0 * ipow(run.spec.ratio, run.final_level.generation);
    WosResult wos = wos_sample({pole_x, pole_y}, run.final_level, run.spec, eps, walks, depth,
                               c.seed);
    MeasureComparison cmp = measure_comparison(wos, depth);
    RunManifest man = start_manifest(control ? "wos(control)" : "wos", run.spec, c.seed,
                                     argc, argv);
    emit(man, dir, "wos.csv", wos_csv(cmp));
    emit(man, dir, "summary.json", wos_summary_json(wos, cmp).dump(2) + "\n");
    finish_manifest(man, dir, t0);
    std::cout << wos_summary_json(wos, cmp).dump(2) << std::endl;
    return wos.ok ? 0 : 1;
}

// Plot-ready exports from completed run directories.
int run_export(const std::string& run_dir, const std::string& run2, const std::string& what,
               const std::string& out_dir) {
    fs::path src = run_dir;
    fs::path dst = out_dir;
    fs::create_directories(dst);
    auto need = [&](const fs::path& p) {
        if (!fs::exists(p)) throw usage_error("export: missing artifact " + p.string());
        return p;
    };
    auto parse_trace = [&](const fs::path& p) {
        std::istringstream in(read_file(need(p)));
        std::string line;
        std::getline(in, line);  // header
        std::vector<std::array<std::string, 4>> rows;  // n, osc, osc_norm, budget
        while (std::getline(in, line)) {
            std::vector<std::string> cols;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cols.push_back(cell);
            if (cols.size() >= 9) rows.push_back({cols[0], cols[2], cols[3], cols[8]});
        }
        return rows;
    };
    if (what == "oscillation") {
        auto rows = parse_trace(src / "trace.csv");
        std::ostringstream out;
        out << "n,osc,osc_normalized,budget\n";
        for (auto& r : rows) out << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << '\n';
        write_file(dst / "oscillation.csv", out.str());
    } else if (what == "compare") {
        if (run2.empty()) throw usage_error("export compare needs --run2");
        auto a = parse_trace(src / "trace.csv");
        auto b = parse_trace(fs::path(run2) / "trace.csv");
        if (a.size() != b.size())
            throw usage_error("export compare: traces have different generation counts");
        std::ostringstream out;
        out << "n,osc_norm_run1,osc_norm_run2\n";
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i][0] != b[i][0]) throw usage_error("export compare: n columns do not match");
            out << a[i][0] << ',' << a[i][2] << ',' << b[i][2] << '\n';
        }
        write_file(dst / "oscillation_compare.csv", out.str());
    } else if (what == "margin") {
        fs::copy_file(need(src / "margin_raster.csv"), dst / "margin_raster.csv",
                      fs::copy_options::overwrite_existing);
    } else if (what == "green") {
        fs::copy_file(need(src / "green_ratios.csv"), dst / "green_ratios.csv",
                      fs::copy_options::overwrite_existing);
    } else if (what == "wos") {
        fs::copy_file(need(src / "wos.csv"), dst / "wos_band.csv",
                      fs::copy_options::overwrite_existing);
    } else {
        throw usage_error("export: unknown --what '" + what + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptively spaced Cantor sets with flattened discrete potential"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonArgs cal_args, bnd_args, grn_args, ahl_args, wos_args;
    std::string method = "naive";
    double err_budget = 1e-9;
    bool diagnostics = false, force = false, control = false;

    CLI::App* cal = app.add_subcommand("calibrate", "run the adaptive construction");
    add_common(cal, cal_args, "out/calibrate");
    cal->add_option("--method", method, "naive | hier");
    cal->add_option("--budget", err_budget, "certified error budget for hier");
    cal->add_flag("--diagnostics", diagnostics, "record sup |D2|+|D3| per generation");
    cal->add_flag("--force", force, "continue past infeasibility, mark the trace");
    cal->add_flag("--control", control, "self-similar control (a_k = 1)");

    bool search = false, raster = false;
    int grid = 200, rounds = 3;
    CLI::App* bnd = app.add_subcommand("bounds", "feasibility bounds and dimension search");
    add_common(bnd, bnd_args, "");
    bnd->add_flag("--search", search, "grid search maximizing delta");
    bnd->add_option("--grid", grid, "grid resolution per round");
    bnd->add_option("--rounds", rounds, "refinement rounds");
    bnd->add_flag("--raster", raster, "emit margin raster CSV");

    std::string grn_params, ahl_params;
    int grn_samples = 32, ahl_samples = 1000;
    CLI::App* grn = app.add_subcommand("green", "Green-function ratio sweep and ring estimate");
    add_common(grn, grn_args, "out/green");
    grn->add_option("--params", grn_params, "reuse a persisted params.json");
    grn->add_option("--samples", grn_samples, "corkscrew samples per scale");

    CLI::App* ahl = app.add_subcommand("ahlfors", "Ahlfors regularity audit");
    add_common(ahl, ahl_args, "out/ahlfors");
    ahl->add_option("--params", ahl_params, "reuse a persisted params.json");
    ahl->add_option("--samples", ahl_samples, "sampled centers");

    double eps = 0.0, pole_x = 0.0, pole_y = 3.0;
    std::uint64_t walks = 100000;
    int depth = 3;
    bool wos_control = false;
    CLI::App* wos = app.add_subcommand("wos", "walk-on-spheres harmonic measure estimate");
    add_common(wos, wos_args, "out/wos");
    wos->add_option("--walks", walks, "number of walks");
    wos->add_option("--depth", depth, "cell attribution depth");
    wos->add_option("--eps", eps, "termination tolerance (default 10 r^m)");
    wos->add_option("--pole-x", pole_x, "pole x coordinate");
    wos->add_option("--pole-y", pole_y, "pole y coordinate");
    wos->add_flag("--control", wos_control, "self-similar control set");

    std::string exp_run, exp_run2, exp_what = "oscillation", exp_out = "out/export";
    CLI::App* exp = app.add_subcommand("export", "plot-ready CSVs from a completed run");
    exp->add_option("--run", exp_run, "source run directory")->required();
    exp->add_option("--run2", exp_run2, "second run directory (compare)");
    exp->add_option("--what", exp_what, "oscillation | margin | green | wos | compare");
    exp->add_option("--out", exp_out, "output directory");

    wos_args.n = 6;  // depth-3 attribution needs modest resolution

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (cal->parsed()) {
            merge_config(cal, cal_args, load_config(cal_args.config));
            return run_calibrate(cal_args, method, err_budget, diagnostics, force, argc, argv,
                                 control);
        }
        if (bnd->parsed()) {
            merge_config(bnd, bnd_args, load_config(bnd_args.config));
            return run_bounds(bnd_args, search, grid, rounds, raster, argc, argv);
        }
        if (grn->parsed()) {
            merge_config(grn, grn_args, load_config(grn_args.config));
            return run_green(grn_args, grn_params, grn_samples, argc, argv);
        }
        if (ahl->parsed()) {
            merge_config(ahl, ahl_args, load_config(ahl_args.config));
            return run_ahlfors(ahl_args, ahl_params, ahl_samples, argc, argv);
        }
        if (wos->parsed()) {
            merge_config(wos, wos_args, load_config(wos_args.config));
            return run_wos(wos_args, wos_control, eps, walks, depth, pole_x, pole_y, argc, argv);
        }
        if (exp->parsed()) return run_export(exp_run, exp_run2, exp_what, exp_out);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return 2;
    } catch (const infeasibility_error& e) {
        std::cerr << "infeasible: " << e.what() << std::endl;
        return 1;
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << " (attainable " << e.attainable << ")"
                  << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
