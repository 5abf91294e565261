#include "choquard/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace choquard {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("field file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void save_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    std::ostringstream meta;
    if (const auto* r = std::get_if<RadialGrid>(&f.grid)) {
        put_u64(os, 1);
        put_f64(os, r->r_max);
        put_u64(os, static_cast<std::uint64_t>(r->n));
        meta << "backend = radial\nr_max = " << r->r_max << "\nn = " << r->n << "\n";
    } else {
        const BoxGrid& b = std::get<BoxGrid>(f.grid);
        put_u64(os, 2);
        put_f64(os, b.L);
        put_u64(os, static_cast<std::uint64_t>(b.n_per_axis));
        meta << "backend = box\nL = " << b.L << "\nn_per_axis = " << b.n_per_axis << "\n";
    }
    for (double v : f.values) put_f64(os, v);
    meta << "values = " << f.values.size() << "\n";
    std::ofstream ms(path + ".meta");
    ms << meta.str();
}

Field load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    const std::uint64_t tag = get_u64(is);
    Grid grid;
    if (tag == 1) {
        RadialGrid g;
        g.r_max = get_f64(is);
        g.n = static_cast<int>(get_u64(is));
        g.validate();
        grid = g;
    } else if (tag == 2) {
        BoxGrid g;
        g.L = get_f64(is);
        g.n_per_axis = static_cast<int>(get_u64(is));
        g.validate();
        grid = g;
    } else {
        throw std::runtime_error("unknown field backend tag in " + path);
    }
    Field f = make_field(grid);
    for (double& v : f.values) v = get_f64(is);
    return f;
}

namespace {

using nlohmann::json;

json to_json(const ResultRecord& r) {
    json j;
    j["problem"] = {{"N", r.problem.N}, {"alpha", r.problem.alpha}, {"mu", r.problem.mu},
                    {"q", r.problem.q}, {"a", r.problem.a}};
    j["backend"] = r.backend;
    j["grid_extent"] = r.grid_extent;
    j["grid_nodes"] = r.grid_nodes;
    j["eps"] = r.eps;
    j["energy"] = {{"total", r.total},       {"kinetic", r.kinetic},
                   {"mass_term", r.mass_term}, {"nonlocal", r.nonlocal},
                   {"penalty", r.penalty},   {"lambda", r.lambda}};
    j["grad_norm"] = r.grad_norm;
    j["pohozaev_residual"] = r.pohozaev_residual;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["possible_nonexistence"] = r.possible_nonexistence;
    j["penalty_active"] = r.penalty_active;
    j["truncation_active"] = r.truncation_active;
    j["peak_position"] = r.peak_position;
    j["peak_value"] = r.peak_value;
    j["q_value"] = r.q_value;
    j["threshold"] = r.threshold;
    j["threshold_margin"] = r.threshold_margin;
    j["diagnostics"] = r.diagnostics;
    return j;
}

ResultRecord record_from_json(const json& j) {
    ResultRecord r;
    r.problem.N = j.at("problem").at("N").get<int>();
    r.problem.alpha = j.at("problem").at("alpha").get<double>();
    r.problem.mu = j.at("problem").at("mu").get<double>();
    r.problem.q = j.at("problem").at("q").get<double>();
    r.problem.a = j.at("problem").at("a").get<double>();
    r.backend = j.at("backend").get<std::string>();
    r.grid_extent = j.at("grid_extent").get<double>();
    r.grid_nodes = j.at("grid_nodes").get<int>();
    r.eps = j.at("eps").get<double>();
    r.total = j.at("energy").at("total").get<double>();
    r.kinetic = j.at("energy").at("kinetic").get<double>();
    r.mass_term = j.at("energy").at("mass_term").get<double>();
    r.nonlocal = j.at("energy").at("nonlocal").get<double>();
    r.penalty = j.at("energy").at("penalty").get<double>();
    r.lambda = j.at("energy").at("lambda").get<double>();
    r.grad_norm = j.at("grad_norm").get<double>();
    r.pohozaev_residual = j.at("pohozaev_residual").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.possible_nonexistence = j.at("possible_nonexistence").get<bool>();
    r.penalty_active = j.at("penalty_active").get<bool>();
    r.truncation_active = j.at("truncation_active").get<bool>();
    r.peak_position = j.at("peak_position").get<std::vector<double>>();
    r.peak_value = j.at("peak_value").get<double>();
    r.q_value = j.at("q_value").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.threshold_margin = j.at("threshold_margin").get<double>();
    r.diagnostics = j.at("diagnostics").get<std::map<std::string, double>>();
    return r;
}

}  // namespace

ResultRecord make_record(const ProblemParams& params, const Grid& grid, const SolveResult& res) {
    ResultRecord r;
    r.problem = params;
    if (const auto* rg = std::get_if<RadialGrid>(&grid)) {
        r.backend = "radial";
        r.grid_extent = rg->r_max;
        r.grid_nodes = rg->n;
    } else {
        const BoxGrid& bg = std::get<BoxGrid>(grid);
        r.backend = "box";
        r.grid_extent = bg.L;
        r.grid_nodes = bg.n_per_axis;
    }
    r.total = res.energy.total;
    r.kinetic = res.energy.kinetic;
    r.mass_term = res.energy.mass_term;
    r.nonlocal = res.energy.nonlocal;
    r.penalty = res.energy.penalty;
    r.lambda = res.energy.lambda;
    r.grad_norm = res.grad_norm;
    r.pohozaev_residual = res.pohozaev_residual;
    r.iterations = res.iterations;
    r.converged = res.converged;
    r.possible_nonexistence = res.possible_nonexistence;
    r.penalty_active = res.penalty_active;
    r.truncation_active = res.truncation_active;
    r.peak_position = {res.peak_position.x, res.peak_position.y, res.peak_position.z};
    r.peak_value = res.peak_value;
    r.q_value = res.q_value;
    return r;
}

void save_result_json(const std::string& path, const ResultRecord& rec) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << to_json(rec).dump(2) << "\n";
}

ResultRecord load_result_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    json j;
    is >> j;
    return record_from_json(j);
}

void save_report_txt(const std::string& path, const ResultRecord& rec) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << std::setprecision(17);
    os << "backend = " << rec.backend << "\n";
    os << "grid_extent = " << rec.grid_extent << "\n";
    os << "grid_nodes = " << rec.grid_nodes << "\n";
    if (rec.eps > 0.0) os << "eps = " << rec.eps << "\n";
    os << "energy_total = " << rec.total << "\n";
    os << "energy_kinetic = " << rec.kinetic << "\n";
    os << "energy_mass_term = " << rec.mass_term << "\n";
    os << "energy_nonlocal = " << rec.nonlocal << "\n";
    os << "energy_penalty = " << rec.penalty << "\n";
    os << "grad_norm = " << rec.grad_norm << "\n";
    os << "pohozaev_residual = " << rec.pohozaev_residual << "\n";
    os << "iterations = " << rec.iterations << "\n";
    os << "converged = " << (rec.converged ? 1 : 0) << "\n";
    os << "possible_nonexistence = " << (rec.possible_nonexistence ? 1 : 0) << "\n";
    os << "penalty_active = " << (rec.penalty_active ? 1 : 0) << "\n";
    os << "truncation_active = " << (rec.truncation_active ? 1 : 0) << "\n";
    os << "peak_value = " << rec.peak_value << "\n";
    os << "peak_x = " << rec.peak_position[0] << "\n";
    os << "peak_y = " << rec.peak_position[1] << "\n";
    os << "peak_z = " << rec.peak_position[2] << "\n";
    os << "q_value = " << rec.q_value << "\n";
    os << "threshold = " << rec.threshold << "\n";
    os << "threshold_margin = " << rec.threshold_margin << "\n";
    for (const auto& [k, v] : rec.diagnostics) os << k << " = " << v << "\n";
}

void save_csv(const std::string& path, const CsvTable& table) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
    os << std::setprecision(17);
    for (const auto& row : table.rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
}

CsvTable load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty csv " + path);
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) t.columns.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        t.rows.push_back(std::move(vals));
    }
    return t;
}

void save_svg_lines(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, bool log_y) {
    const int W = 800, H = 500, ML = 70, MR = 20, MT = 40, MB = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto ty = [log_y](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            xmin = std::min(xmin, s.xs[i]);
            xmax = std::max(xmax, s.xs[i]);
            ymin = std::min(ymin, ty(s.ys[i]));
            ymax = std::max(ymax, ty(s.ys[i]));
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (ty(y) - ymin) / (ymax - ymin) * (H - MT - MB); };
    static const char* colors[] = {"#1f6fb2", "#c0392b", "#27845b", "#8e5fb0"};

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << std::setprecision(10);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
       << H - MB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ML << "\" y=\"" << H - MB + 20 << "\" font-size=\"12\">" << xmin
       << "</text>\n";
    os << "<text x=\"" << W - MR << "\" y=\"" << H - MB + 20
       << "\" text-anchor=\"end\" font-size=\"12\">" << xmax << "</text>\n";
    os << "<text x=\"" << ML - 6 << "\" y=\"" << H - MB << "\" text-anchor=\"end\" font-size=\"12\">"
       << (log_y ? std::pow(10.0, ymin) : ymin) << "</text>\n";
    os << "<text x=\"" << ML - 6 << "\" y=\"" << MT + 4
       << "\" text-anchor=\"end\" font-size=\"12\">" << (log_y ? std::pow(10.0, ymax) : ymax)
       << "</text>\n";
    int ci = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i)
            os << px(s.xs[i]) << "," << py(s.ys[i]) << " ";
        os << "\"/>\n";
        os << "<text x=\"" << W - MR - 6 << "\" y=\"" << MT + 16 * (ci + 1)
           << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[ci % 4] << "\">"
           << s.label << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
}

}  // namespace choquard
