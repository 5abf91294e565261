#include "choquard/grid.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace choquard {

void RadialGrid::validate() const {
    if (!(r_max > 0.0)) throw std::invalid_argument("radial grid requires r_max > 0");
    if (n < 16) throw std::invalid_argument("radial grid requires n >= 16");
}

void BoxGrid::validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("box grid requires L > 0");
    if (n_per_axis < 8 || (n_per_axis & (n_per_axis - 1)) != 0) {
        std::ostringstream os;
        os << "box grid requires n_per_axis a power of two >= 8 (got " << n_per_axis << ")";
        throw std::invalid_argument(os.str());
    }
}

std::size_t node_count(const Grid& g) {
    if (const auto* r = std::get_if<RadialGrid>(&g)) return static_cast<std::size_t>(r->n);
    return std::get<BoxGrid>(g).size();
}

bool same_grid(const Grid& a, const Grid& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ra = std::get_if<RadialGrid>(&a)) return *ra == std::get<RadialGrid>(b);
    return std::get<BoxGrid>(a) == std::get<BoxGrid>(b);
}

Field make_field(const Grid& g) { return Field{g, std::vector<double>(node_count(g), 0.0)}; }

Field sample_radial(const RadialGrid& g, const std::function<double(double)>& fn) {
    Field f = make_field(g);
    for (int i = 0; i < g.n; ++i) f.values[i] = fn(g.node(i));
    return f;
}

Field sample_box(const BoxGrid& g, const std::function<double(const Vec3&)>& fn) {
    Field f = make_field(g);
    std::size_t idx = 0;
    for (int i = 0; i < g.n_per_axis; ++i)
        for (int j = 0; j < g.n_per_axis; ++j)
            for (int k = 0; k < g.n_per_axis; ++k) f.values[idx++] = fn(g.node(i, j, k));
    return f;
}

double quad_weight(const Grid& g, std::size_t i) {
    if (const auto* r = std::get_if<RadialGrid>(&g)) return r->cell_volume(static_cast<int>(i));
    return std::get<BoxGrid>(g).cell_volume();
}

double integrate(const Field& f) {
    double s = 0.0;
    if (const auto* r = std::get_if<RadialGrid>(&f.grid)) {
        const double h = r->spacing();
        for (int i = 0; i < r->n; ++i) {
            const double ri = r->node(i);
            s += f.values[i] * ri * ri;
        }
        return 4.0 * M_PI * h * s;
    }
    for (double v : f.values) s += v;
    return std::get<BoxGrid>(f.grid).cell_volume() * s;
}

double dot_quad(const Field& f, const Field& g) {
    if (!same_grid(f.grid, g.grid)) throw std::invalid_argument("grid mismatch in dot_quad");
    double s = 0.0;
    if (const auto* r = std::get_if<RadialGrid>(&f.grid)) {
        const double h = r->spacing();
        for (int i = 0; i < r->n; ++i) {
            const double ri = r->node(i);
            s += f.values[i] * g.values[i] * ri * ri;
        }
        return 4.0 * M_PI * h * s;
    }
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
    return std::get<BoxGrid>(f.grid).cell_volume() * s;
}

double norm_l2(const Field& f) { return std::sqrt(dot_quad(f, f)); }

double lp_norm(const Field& f, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s += quad_weight(f.grid, i) * std::pow(std::abs(f.values[i]), p);
    return std::pow(s, 1.0 / p);
}

bool all_finite(const Field& f) {
    return std::all_of(f.values.begin(), f.values.end(),
                       [](double v) { return std::isfinite(v); });
}

void require_finite(const Field& f, const char* what) {
    if (!all_finite(f)) {
        std::ostringstream os;
        os << "non-finite values in " << what;
        throw std::invalid_argument(os.str());
    }
}

std::size_t argmax(const Field& f) {
    return static_cast<std::size_t>(
        std::max_element(f.values.begin(), f.values.end()) - f.values.begin());
}

double max_value(const Field& f) { return f.values[argmax(f)]; }

Vec3 node_position(const Grid& g, std::size_t i) {
    if (const auto* r = std::get_if<RadialGrid>(&g)) return {r->node(static_cast<int>(i)), 0.0, 0.0};
    const BoxGrid& b = std::get<BoxGrid>(g);
    const int n = b.n_per_axis;
    const int k = static_cast<int>(i % n);
    const int j = static_cast<int>((i / n) % n);
    const int ii = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
    return b.node(ii, j, k);
}

double boundary_amplitude_ratio(const Field& f) {
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double edge = 0.0;
    if (const auto* r = std::get_if<RadialGrid>(&f.grid)) {
        edge = std::abs(f.values[r->n - 1]);
    } else {
        const BoxGrid& b = std::get<BoxGrid>(f.grid);
        const int n = b.n_per_axis;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                edge = std::max(edge, std::abs(f.values[b.index(0, i, j)]));
                edge = std::max(edge, std::abs(f.values[b.index(i, 0, j)]));
                edge = std::max(edge, std::abs(f.values[b.index(i, j, 0)]));
            }
    }
    return edge / peak;
}

namespace {

int run_above_half(const std::vector<double>& line, int peak, double half) {
    int lo = peak, hi = peak;
    while (lo > 0 && line[lo - 1] >= half) --lo;
    while (hi + 1 < static_cast<int>(line.size()) && line[hi + 1] >= half) ++hi;
    return hi - lo + 1;
}

}  // namespace

int peak_width_cells(const Field& f) {
    const std::size_t pk = argmax(f);
    const double half = 0.5 * f.values[pk];
    if (!(half > 0.0)) return 0;
    if (std::holds_alternative<RadialGrid>(f.grid))
        return run_above_half(f.values, static_cast<int>(pk), half);
    const BoxGrid& b = std::get<BoxGrid>(f.grid);
    const int n = b.n_per_axis;
    const int k = static_cast<int>(pk % n);
    const int j = static_cast<int>((pk / n) % n);
    const int i = static_cast<int>(pk / (static_cast<std::size_t>(n) * n));
    std::vector<double> line(n);
    int width = n;
    for (int t = 0; t < n; ++t) line[t] = f.values[b.index(t, j, k)];
    width = std::min(width, run_above_half(line, i, half));
    for (int t = 0; t < n; ++t) line[t] = f.values[b.index(i, t, k)];
    width = std::min(width, run_above_half(line, j, half));
    for (int t = 0; t < n; ++t) line[t] = f.values[b.index(i, j, t)];
    width = std::min(width, run_above_half(line, k, half));
    return width;
}

double radial_value_at(const Field& radial, double r) {
    const RadialGrid& g = std::get<RadialGrid>(radial.grid);
    const double h = g.spacing();
    const double s = r / h - 0.5;  // fractional cell index
    if (s <= 0.0) return radial.values[0];
    const int i = static_cast<int>(s);
    if (i + 1 >= g.n) return 0.0;
    const double w = s - i;
    return (1.0 - w) * radial.values[i] + w * radial.values[i + 1];
}

Field circular_shift(const Field& box, int di, int dj, int dk) {
    const BoxGrid& b = std::get<BoxGrid>(box.grid);
    const int n = b.n_per_axis;
    auto wrap = [n](int v) { return ((v % n) + n) % n; };
    Field out = make_field(box.grid);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                out.values[b.index(i, j, k)] = box.values[b.index(wrap(i - di), wrap(j - dj), wrap(k - dk))];
    return out;
}

}  // namespace choquard
