#include "choquard/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace choquard {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where.empty() ? what : where + ": " + what);
}

void check_keys(const json& obj, const std::string& pointer,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) {
            std::ostringstream os;
            os << pointer << "/" << key << ": unknown key (allowed:";
            for (const auto& k : allowed) os << " " << k;
            os << ")";
            throw ConfigError(os.str());
        }
    }
}

template <typename T>
T fetch(const json& obj, const std::string& pointer, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(pointer + "/" + key, e.what());
    }
}

Vec3 fetch_vec3(const json& obj, const std::string& pointer, const char* key, Vec3 fallback) {
    if (!obj.contains(key)) return fallback;
    const auto v = obj.at(key);
    if (!v.is_array() || v.size() != 3)
        fail(pointer + "/" + key, "expected an array of 3 numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

int line_of_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

Grid RunConfig::make_grid() const {
    if (backend == "radial") return radial;
    if (backend == "box") return box;
    throw ConfigError("/grid/backend: must be \"radial\" or \"box\" (got \"" + backend + "\")");
}

PotentialSpec RunConfig::make_potential() const {
    if (potential_kind == "default") return default_potential(potential_center);
    if (potential_kind == "constant") return constant_potential(potential_value, potential_center);
    throw ConfigError("/potential/kind: must be \"default\" or \"constant\" (got \"" +
                      potential_kind + "\")");
}

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << "config line " << line_of_offset(text, e.byte) << ": " << e.what();
        throw ConfigError(os.str());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j, "", {"problem", "grid", "solver", "potential", "semiclassical", "output_dir"});

    RunConfig cfg;
    try {
        if (j.contains("problem")) {
            const json& p = j.at("problem");
            check_keys(p, "/problem", {"N", "alpha", "mu", "q", "a"});
            cfg.problem.N = fetch(p, "/problem", "N", cfg.problem.N);
            cfg.problem.alpha = fetch(p, "/problem", "alpha", cfg.problem.alpha);
            cfg.problem.mu = fetch(p, "/problem", "mu", cfg.problem.mu);
            cfg.problem.q = fetch(p, "/problem", "q", cfg.problem.q);
            cfg.problem.a = fetch(p, "/problem", "a", cfg.problem.a);
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            check_keys(g, "/grid", {"backend", "r_max", "n", "L", "auto"});
            cfg.backend = fetch<std::string>(g, "/grid", "backend", cfg.backend);
            cfg.grid_auto = fetch(g, "/grid", "auto", cfg.grid_auto);
            if (cfg.backend == "radial") {
                cfg.radial.r_max = fetch(g, "/grid", "r_max", cfg.radial.r_max);
                cfg.radial.n = fetch(g, "/grid", "n", cfg.radial.n);
            } else {
                cfg.box.L = fetch(g, "/grid", "L", cfg.box.L);
                cfg.box.n_per_axis = fetch(g, "/grid", "n", cfg.box.n_per_axis);
            }
        }
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            check_keys(s, "/solver",
                       {"tol_grad", "max_iter", "step_rule", "fixed_step", "precondition",
                        "seed_profile", "seed_file"});
            cfg.solver.tol_grad = fetch(s, "/solver", "tol_grad", cfg.solver.tol_grad);
            cfg.solver.max_iter = fetch(s, "/solver", "max_iter", cfg.solver.max_iter);
            cfg.solver.fixed_step = fetch(s, "/solver", "fixed_step", cfg.solver.fixed_step);
            cfg.solver.precondition = fetch(s, "/solver", "precondition", cfg.solver.precondition);
            const std::string rule =
                fetch<std::string>(s, "/solver", "step_rule", "adaptive-backtracking");
            if (rule == "fixed")
                cfg.solver.step_rule = SolverConfig::StepRule::fixed;
            else if (rule == "adaptive-backtracking")
                cfg.solver.step_rule = SolverConfig::StepRule::adaptive_backtracking;
            else
                fail("/solver/step_rule", "must be \"fixed\" or \"adaptive-backtracking\"");
            const std::string seed = fetch<std::string>(s, "/solver", "seed_profile", "gaussian");
            if (seed == "gaussian")
                cfg.solver.seed_profile = SolverConfig::SeedProfile::gaussian;
            else if (seed == "instanton")
                cfg.solver.seed_profile = SolverConfig::SeedProfile::instanton;
            else if (seed == "file")
                cfg.solver.seed_profile = SolverConfig::SeedProfile::file;
            else
                fail("/solver/seed_profile", "must be \"gaussian\", \"instanton\" or \"file\"");
            cfg.seed_file = fetch<std::string>(s, "/solver", "seed_file", "");
            if (cfg.solver.seed_profile == SolverConfig::SeedProfile::file && cfg.seed_file.empty())
                fail("/solver/seed_file", "required when seed_profile is \"file\"");
        }
        if (j.contains("potential")) {
            const json& p = j.at("potential");
            check_keys(p, "/potential", {"kind", "center", "value"});
            cfg.potential_kind = fetch<std::string>(p, "/potential", "kind", cfg.potential_kind);
            cfg.potential_center = fetch_vec3(p, "/potential", "center", cfg.potential_center);
            cfg.potential_value = fetch(p, "/potential", "value", cfg.potential_value);
        }
        if (j.contains("semiclassical")) {
            const json& s = j.at("semiclassical");
            check_keys(s, "/semiclassical",
                       {"eps", "nu", "kappa", "k", "box_margin", "penalty_disabled",
                        "target_spacing", "max_nodes", "reference_r_max", "reference_n"});
            SemiclassicalRunConfig sc;
            if (!s.contains("eps")) fail("/semiclassical/eps", "required");
            if (s.at("eps").is_array())
                sc.eps_list = s.at("eps").get<std::vector<double>>();
            else
                sc.eps_list = {s.at("eps").get<double>()};
            for (double e : sc.eps_list)
                if (!(e > 0.0)) fail("/semiclassical/eps", "entries must be positive");
            sc.nu = fetch(s, "/semiclassical", "nu", sc.nu);
            if (!(sc.nu > 0.0)) fail("/semiclassical/nu", "must be positive");
            sc.kappa = fetch(s, "/semiclassical", "kappa", sc.kappa);
            sc.k = fetch(s, "/semiclassical", "k", sc.k);
            sc.box_margin = fetch(s, "/semiclassical", "box_margin", sc.box_margin);
            sc.penalty_disabled = fetch(s, "/semiclassical", "penalty_disabled", sc.penalty_disabled);
            sc.target_spacing = fetch(s, "/semiclassical", "target_spacing", sc.target_spacing);
            sc.max_nodes = fetch(s, "/semiclassical", "max_nodes", sc.max_nodes);
            sc.reference_grid.r_max = fetch(s, "/semiclassical", "reference_r_max", 30.0);
            sc.reference_grid.n = fetch(s, "/semiclassical", "reference_n", 2048);
            cfg.semiclassical = sc;
        }
        cfg.output_dir = fetch<std::string>(j, "", "output_dir", cfg.output_dir);

        cfg.problem.validate();
        cfg.solver.validate();
        if (cfg.backend == "radial")
            cfg.radial.validate();
        else if (cfg.backend == "box")
            cfg.box.validate();
        else
            fail("/grid/backend", "must be \"radial\" or \"box\"");
        cfg.make_potential().validate();
        if (cfg.semiclassical) cfg.semiclassical->reference_grid.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::string default_config_json() {
    return R"({
  "problem": {"N": 3, "alpha": 2.0, "mu": 10.0, "q": 4.0, "a": 1.0},
  "grid": {"backend": "radial", "r_max": 30.0, "n": 4096},
  "solver": {"tol_grad": 1e-7, "max_iter": 2000, "step_rule": "adaptive-backtracking",
             "precondition": true, "seed_profile": "gaussian"},
  "potential": {"kind": "default"},
  "output_dir": "out"
}
)";
}

}  // namespace choquard
