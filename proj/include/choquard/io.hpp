#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "choquard/diagnostics.hpp"
#include "choquard/energy.hpp"
#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/solver.hpp"

namespace choquard {

/// Flat little-endian layout: u64 backend tag (1 radial, 2 box), grid
/// descriptor (radial: f64 r_max, u64 n; box: f64 L, u64 n_per_axis), then
/// f64 samples in grid order. A text sidecar `<path>.meta` carries the same
/// descriptor for humans.
void save_field(const std::string& path, const Field& f);
Field load_field(const std::string& path);

/// Everything one run produces, serialized to result.json and report.txt.
struct ResultRecord {
    ProblemParams problem;
    std::string backend;  // "radial" | "box"
    double grid_extent = 0.0;
    int grid_nodes = 0;
    double eps = 0.0;  // 0 for limit runs
    double total = 0.0, kinetic = 0.0, mass_term = 0.0, nonlocal = 0.0, penalty = 0.0;
    double lambda = 1.0;
    double grad_norm = 0.0;
    double pohozaev_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool possible_nonexistence = false;
    bool penalty_active = false;
    bool truncation_active = false;
    std::vector<double> peak_position;  // 3 components
    double peak_value = 0.0;
    double q_value = 0.0;
    double threshold = 0.0;
    double threshold_margin = 0.0;
    std::map<std::string, double> diagnostics;  // flat key-value extras

    bool operator==(const ResultRecord&) const = default;
};

ResultRecord make_record(const ProblemParams& params, const Grid& grid, const SolveResult& res);

void save_result_json(const std::string& path, const ResultRecord& rec);
ResultRecord load_result_json(const std::string& path);
void save_report_txt(const std::string& path, const ResultRecord& rec);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    bool operator==(const CsvTable&) const = default;
};
void save_csv(const std::string& path, const CsvTable& table);
CsvTable load_csv(const std::string& path);

/// Minimal self-contained SVG line plot; y may be drawn in log10.
struct SvgSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};
void save_svg_lines(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, bool log_y);

}  // namespace choquard
