#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cantor/common.hpp"
#include "cantor/construct.hpp"
#include "cantor/feasibility.hpp"
#include "cantor/level.hpp"
#include "cantor/verify.hpp"
#include "cantor/wos.hpp"

namespace cantor {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// GeneratorSpec + ParamTree <-> JSON. Parameters serialize as decimal strings
// ("%.17g") keyed by generation then lexicographic cell index, so round-trips
// are bit-exact. The implicit root entry a_0 = 1 is not written.
// ---------------------------------------------------------------------------

inline json spec_to_json(const GeneratorSpec& spec) {
    json j;
    j["alphabet"] = spec.alphabet_label();
    j["a"] = to_decimal_string(spec.ceiling);
    j["r"] = to_decimal_string(spec.ratio);
    j["max_generation"] = spec.max_generation;
    return j;
}

inline GeneratorSpec spec_from_json(const json& j) {
    return parse_alphabet(j.at("alphabet").get<std::string>(),
                          parse_decimal(j.at("a").get<std::string>()),
                          parse_decimal(j.at("r").get<std::string>()),
                          j.value("max_generation", 20));
}

inline json params_to_json(const GeneratorSpec& spec, const ParamTree& params) {
    json j;
    j["spec"] = spec_to_json(spec);
    j["depth"] = params.depth();
    json p = json::object();
    for (int k = 0; k < params.depth(); ++k) {
        const auto& vals = params.generation(k);
        if (k == 0 && vals.size() == 1 && vals[0] == 1.0) continue;  // implicit root
        json arr = json::array();
        for (double v : vals) arr.push_back(to_decimal_string(v));
        p[std::to_string(k)] = std::move(arr);
    }
    j["params"] = std::move(p);
    return j;
}

inline std::pair<GeneratorSpec, std::shared_ptr<ParamTree>> params_from_json(const json& j) {
    GeneratorSpec spec = spec_from_json(j.at("spec"));
    auto tree = std::make_shared<ParamTree>();
    const json& p = j.at("params");
    int depth = j.value("depth", 0);
    if (depth == 0)
        for (const auto& item : p.items())
            depth = std::max(depth, std::stoi(item.key()) + 1);
    for (int k = 0; k < depth; ++k) {
        std::vector<double> vals;
        if (p.contains(std::to_string(k))) {
            for (const auto& s : p.at(std::to_string(k)))
                vals.push_back(parse_decimal(s.get<std::string>()));
        } else if (k == 0) {
            vals = {1.0};
        } else {
            throw usage_error("params JSON misses generation " + std::to_string(k));
        }
        tree->append_generation(vals, spec);
    }
    return {spec, tree};
}

// ---------------------------------------------------------------------------
// CSV writers. Column contracts live in FORMATS.md.
// ---------------------------------------------------------------------------

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw usage_error("cannot write " + path.string());
    out << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string level_csv(const Level& level) {
    std::ostringstream out;
    bool planar = level.spec.planar();
    out << (planar ? "generation,cell_index,coord_x,coord_y,weight\n"
                   : "generation,cell_index,coord_x,weight\n");
    double w = level.weight();
    for (std::size_t i = 0; i < level.size(); ++i) {
        out << level.generation << ',' << i << ',' << to_decimal_string(level.points[i].x);
        if (planar) out << ',' << to_decimal_string(level.points[i].y);
        out << ',' << to_decimal_string(w) << '\n';
    }
    return out.str();
}

inline std::string profile_csv(const PotentialProfile& prof) {
    std::ostringstream out;
    out << "generation,cell_index,g_value,err_bound\n";
    for (std::size_t i = 0; i < prof.values.size(); ++i)
        out << prof.generation << ',' << i << ',' << to_decimal_string(prof.values[i]) << ','
            << to_decimal_string(prof.err_bounds[i]) << '\n';
    return out.str();
}

inline json profile_summary_json(const PotentialProfile& prof) {
    json j;
    j["n"] = prof.generation;
    j["c_n"] = prof.c_n;
    j["oscillation"] = prof.oscillation;
    j["method"] = prof.method;
    j["err_budget"] = std::isnan(prof.err_budget) ? json() : json(prof.err_budget);
    j["max_err"] = prof.max_err;
    return j;
}

inline std::string trace_csv(const CalibrationTrace& trace) {
    std::ostringstream out;
    out << "n,c_n,osc,osc_normalized,a_min,a_max,sup_delta23,drift,budget,budget_ok,a_mean,"
           "clamped,wall_ms\n";
    for (const TraceRow& r : trace) {
        out << r.n << ',' << to_decimal_string(r.c_n) << ',' << to_decimal_string(r.osc) << ','
            << to_decimal_string(r.osc_norm) << ',' << to_decimal_string(r.a_min) << ','
            << to_decimal_string(r.a_max) << ','
            << (std::isnan(r.sup_d23) ? "" : to_decimal_string(r.sup_d23)) << ','
            << to_decimal_string(r.drift) << ',' << to_decimal_string(r.budget) << ','
            << (r.budget_ok ? 1 : 0) << ',' << to_decimal_string(r.a_mean) << ',' << r.clamped
            << ',' << to_decimal_string(r.wall_ms) << '\n';
    }
    return out.str();
}

inline json feasibility_json(const FeasibilityReport& rep) {
    json j;
    j["a"] = rep.a;
    j["r"] = rep.r;
    j["alphabet"] = rep.alphabet;
    j["B2"] = rep.b2;
    j["B3"] = rep.b3;
    j["width"] = rep.width;
    j["threshold"] = rep.threshold;
    j["margin"] = rep.margin;
    j["window_ok"] = rep.window_ok;
    j["delta"] = rep.delta;
    j["feasible"] = rep.feasible;
    j["empirical_constants"] = rep.empirical_constants;
    if (!std::isnan(rep.alt_n4_threshold)) j["alt_n4_threshold"] = rep.alt_n4_threshold;
    return j;
}

inline std::string green_sweep_csv(const GreenSweep& sweep) {
    std::ostringstream out;
    out << "scale,min_ratio,median_ratio,max_ratio\n";
    for (const auto& r : sweep.rows)
        out << to_decimal_string(r.scale) << ',' << to_decimal_string(r.min_ratio) << ','
            << to_decimal_string(r.median_ratio) << ',' << to_decimal_string(r.max_ratio) << '\n';
    return out.str();
}

inline std::string ahlfors_csv(const AhlforsReport& rep) {
    std::ostringstream out;
    out << "rho,min_ratio,max_ratio\n";
    for (const auto& r : rep.rows)
        out << to_decimal_string(r.rho) << ',' << to_decimal_string(r.min_ratio) << ','
            << to_decimal_string(r.max_ratio) << '\n';
    return out.str();
}

inline std::string wos_csv(const MeasureComparison& cmp) {
    std::ostringstream out;
    out << "depth,cell,count,ratio,ci_lo,ci_hi,excluded\n";
    for (const auto& r : cmp.rows)
        out << cmp.depth << ',' << r.cell << ',' << r.count << ',' << to_decimal_string(r.ratio)
            << ',' << to_decimal_string(r.ci_lo) << ',' << to_decimal_string(r.ci_hi) << ','
            << (r.excluded ? 1 : 0) << '\n';
    return out.str();
}

inline json wos_summary_json(const WosResult& wos, const MeasureComparison& cmp) {
    json j;
    j["pole"] = {wos.pole.x, wos.pole.y};
    j["eps"] = wos.eps;
    j["depth"] = wos.depth;
    j["walks"] = wos.walks;
    j["seed"] = wos.seed;
    j["r_out"] = wos.r_out;
    j["censored"] = wos.censored;
    j["censored_fraction"] = wos.censored_fraction();
    j["reentries"] = wos.reentries;
    j["total_steps"] = wos.total_steps;
    j["ok"] = wos.ok;
    j["band"] = cmp.band;
    j["band_min"] = cmp.band_min;
    j["band_max"] = cmp.band_max;
    j["excluded_cells"] = cmp.excluded_cells;
    return j;
}

// ---------------------------------------------------------------------------
// Run manifests: tool version, spec, invocation, seed, and a content hash
// per produced artifact.
// ---------------------------------------------------------------------------

inline std::string content_hash(const fs::path& path) {
    std::string data = read_file(path);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data.data(), data.size())));
    return buf;
}

struct RunManifest {
    std::string version = kVersion;
    json spec;
    std::string subcommand;
    std::vector<std::string> args;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> artifacts;  // (file, hash)

    json to_json() const {
        json j;
        j["version"] = version;
        j["spec"] = spec;
        j["subcommand"] = subcommand;
        j["args"] = args;
        j["seed"] = seed;
        j["wall_seconds"] = wall_seconds;
        json arts = json::object();
        for (const auto& [f, h] : artifacts) arts[f] = h;
        j["artifacts"] = std::move(arts);
        return j;
    }
};

// One run per output directory.
class DirLock {
public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
        fs::create_directories(dir);
        if (fs::exists(path_))
            throw usage_error("output directory is locked by another run: " + path_.string());
        std::ofstream(path_) << "locked\n";
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    fs::path path_;
};

}  // namespace cantor
