#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/potential.hpp"
#include "choquard/solver.hpp"

namespace choquard {

/// Invalid configuration (parse failure, unknown key, violated invariant);
/// the CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SemiclassicalRunConfig {
    std::vector<double> eps_list;
    double nu = 1.0;
    double kappa = 0.0;  // 0 → derived from the reference ground state
    double k = 0.0;      // 0 → derived as f(κ) + 1
    double box_margin = 6.0;
    bool penalty_disabled = false;
    double target_spacing = 0.3;  // auto-sized box resolution
    int max_nodes = 128;
    RadialGrid reference_grid{30.0, 2048};  // limit ground state for κ and the initializer
};

struct RunConfig {
    ProblemParams problem;
    std::string backend = "radial";  // "radial" | "box"
    RadialGrid radial{30.0, 4096};
    BoxGrid box{20.0, 128};
    bool grid_auto = false;  // semiclassical sweeps may size the box per ε
    SolverConfig solver;
    std::string potential_kind = "default";  // "default" | "constant"
    Vec3 potential_center{};
    double potential_value = 1.0;
    std::optional<SemiclassicalRunConfig> semiclassical;
    std::string output_dir = "out";
    std::string seed_file;

    Grid make_grid() const;
    PotentialSpec make_potential() const;
};

/// Strict parse: unknown keys are errors, messages carry the JSON pointer and
/// the line when derivable. Validates every sub-config.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// The shipped default configuration (groundstate on the radial backend).
std::string default_config_json();

}  // namespace choquard
