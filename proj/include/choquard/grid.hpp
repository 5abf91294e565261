#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

namespace choquard {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

/// Cell-centered radial mesh on (0, r_max]: node r_i = (i+1/2) h, h = r_max/n.
/// All nodes are strictly positive, so 1/r never hits the coordinate singularity.
struct RadialGrid {
    double r_max = 30.0;
    int n = 1024;

    double spacing() const { return r_max / n; }
    double node(int i) const { return (i + 0.5) * spacing(); }
    /// Midpoint cell measure 4π r_i² h (N = 3).
    double cell_volume(int i) const {
        const double r = node(i);
        return 4.0 * M_PI * r * r * spacing();
    }
    void validate() const;
    bool operator==(const RadialGrid&) const = default;
};

/// Uniform periodic mesh on the cube [-L, L)³; node x_i = -L + i h, h = 2L/n.
struct BoxGrid {
    double L = 16.0;
    int n_per_axis = 64;

    double spacing() const { return 2.0 * L / n_per_axis; }
    double coord(int i) const { return -L + i * spacing(); }
    Vec3 node(int i, int j, int k) const { return {coord(i), coord(j), coord(k)}; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_per_axis + j) * n_per_axis + k;
    }
    std::size_t size() const {
        return static_cast<std::size_t>(n_per_axis) * n_per_axis * n_per_axis;
    }
    double cell_volume() const {
        const double h = spacing();
        return h * h * h;
    }
    void validate() const;
    bool operator==(const BoxGrid&) const = default;
};

using Grid = std::variant<RadialGrid, BoxGrid>;

std::size_t node_count(const Grid& g);
bool same_grid(const Grid& a, const Grid& b);

/// Scalar samples aligned with a grid; the universal state of the solvers.
struct Field {
    Grid grid;
    std::vector<double> values;
};

Field make_field(const Grid& g);
Field sample_radial(const RadialGrid& g, const std::function<double(double)>& fn);
Field sample_box(const BoxGrid& g, const std::function<double(const Vec3&)>& fn);

double quad_weight(const Grid& g, std::size_t i);
double integrate(const Field& f);
/// L²(grid) pairing Σ w_i f_i g_i.
double dot_quad(const Field& f, const Field& g);
double norm_l2(const Field& f);
double lp_norm(const Field& f, double p);

bool all_finite(const Field& f);
void require_finite(const Field& f, const char* what);

std::size_t argmax(const Field& f);
double max_value(const Field& f);
Vec3 node_position(const Grid& g, std::size_t i);

/// Largest |value| on the outermost grid shell, relative to max |value|;
/// the domain-size check compares this against 1e-8.
double boundary_amplitude_ratio(const Field& f);

/// Number of cells around the peak with value >= max/2 (box: minimum over the
/// three axis lines through the peak). The collapse detector compares against 2.
int peak_width_cells(const Field& f);

/// Linear interpolation of a radial field at radius r, 0 beyond the mesh.
double radial_value_at(const Field& radial, double r);

/// Circular shift of a box field by whole cells.
Field circular_shift(const Field& box, int di, int dj, int dk);

}  // namespace choquard
