#include "choquard/riesz.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "choquard/model.hpp"

namespace choquard {

namespace {

// Nodes and weights of 16-point Gauss-Legendre on [0, 1].
constexpr int kGL = 16;
struct GaussLegendre01 {
    double x[kGL], w[kGL];
    GaussLegendre01() {
        // Newton iteration on Legendre polynomials, standard [-1,1] rule mapped to [0,1].
        for (int i = 0; i < kGL; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (kGL + 0.5));
            double p0, p1;
            for (int it = 0; it < 100; ++it) {
                p0 = 1.0;
                p1 = t;
                for (int k = 2; k <= kGL; ++k) {
                    const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                const double dp = kGL * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= kGL; ++k) {
                const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double dp = kGL * (t * p1 - p0) / (t * t - 1.0);
            x[i] = 0.5 * (1.0 + t);
            w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};
const GaussLegendre01& gl16() {
    static const GaussLegendre01 rule;
    return rule;
}

// Mean of |x|^{α-3} over the cube cell of side h centered at the origin,
// by the Duffy split of each octant into three pyramids:
//   ∫_cell |x|^{α-3} dx = 24 (h/2)^α / α · ∫₀¹∫₀¹ (1+u²+v²)^{(α-3)/2} du dv.
double singular_cell_mean(double alpha, double h) {
    const GaussLegendre01& g = gl16();
    double G = 0.0;
    for (int i = 0; i < kGL; ++i)
        for (int j = 0; j < kGL; ++j) {
            const double u = g.x[i], v = g.x[j];
            G += g.w[i] * g.w[j] * std::pow(1.0 + u * u + v * v, (alpha - 3.0) / 2.0);
        }
    const double a = 0.5 * h;
    return 24.0 * std::pow(a, alpha) * G / (alpha * h * h * h);
}

// Mean of |x|^{α-3} over the cube cell of side h centered at c (singularity outside).
double near_cell_mean(double alpha, double h, const Vec3& c) {
    const GaussLegendre01& g = gl16();
    double s = 0.0;
    for (int i = 0; i < kGL; ++i)
        for (int j = 0; j < kGL; ++j)
            for (int k = 0; k < kGL; ++k) {
                const double x = c.x + h * (g.x[i] - 0.5);
                const double y = c.y + h * (g.x[j] - 0.5);
                const double z = c.z + h * (g.x[k] - 0.5);
                s += g.w[i] * g.w[j] * g.w[k] *
                     std::pow(x * x + y * y + z * z, (alpha - 3.0) / 2.0);
            }
    return s;
}

double bracket(double alpha, double r, double s) {
    if (alpha == 1.0) return std::log((r + s) / std::abs(r - s));
    return std::pow(r + s, alpha - 1.0) - std::pow(std::abs(r - s), alpha - 1.0);
}

// ∫ over the cell s ∈ [r-h/2, r+h/2] of the bracket at its own node (the
// |r-s| factor is only Hölder across s = r, so the cell is done analytically).
double diagonal_bracket_integral(double alpha, double r, double h) {
    if (alpha == 1.0) {
        const double hi = 2.0 * r + 0.5 * h, lo = 2.0 * r - 0.5 * h;
        return hi * std::log(hi) - lo * std::log(lo) - h * std::log(0.5 * h);
    }
    const double plus =
        (std::pow(2.0 * r + 0.5 * h, alpha) - std::pow(2.0 * r - 0.5 * h, alpha)) / alpha;
    const double minus = 2.0 * std::pow(0.5 * h, alpha) / alpha;
    return plus - minus;
}

}  // namespace

struct RieszOperator::Impl {
    Grid grid;
    double alpha = 2.0;
    double sign = 1.0;

    // Radial backend.
    double prefactor = 0.0;                // A_α 2π/(α-1), or A_α 2π at α = 1
    std::vector<double> weight_matrix;     // dense n×n, empty on the α = 2 fast path
    mutable std::atomic<bool> tail_warned{false};

    // Box backend.
    int padded = 0;
    std::vector<std::complex<double>> kernel_hat;  // real-valued spectrum
    fftw_plan plan_fwd = nullptr;
    fftw_plan plan_bwd = nullptr;

    ~Impl() {
        if (plan_fwd) fftw_destroy_plan(plan_fwd);
        if (plan_bwd) fftw_destroy_plan(plan_bwd);
    }

    void build_radial(const RadialGrid& g);
    void build_box(const BoxGrid& g);
    Field apply_radial(const Field& f) const;
    Field apply_box(const Field& f) const;
};

void RieszOperator::Impl::build_radial(const RadialGrid& g) {
    g.validate();
    const double A = riesz_normalization(3, alpha);
    prefactor = sign * (alpha == 1.0 ? 2.0 * M_PI * A : 2.0 * M_PI * A / (alpha - 1.0));
    if (alpha == 2.0) return;  // prefix-sum path, no matrix
    if (g.n > 4096)
        throw std::invalid_argument("radial backend with alpha != 2 is limited to n <= 4096");
    const int n = g.n;
    const double h = g.spacing();
    weight_matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
    // Symmetric cell weights M_ij: midpoint off the diagonal, analytic on it.
    for (int i = 0; i < n; ++i) {
        const double ri = g.node(i);
        for (int j = i; j < n; ++j) {
            const double m = (i == j) ? diagonal_bracket_integral(alpha, ri, h)
                                      : h * bracket(alpha, ri, g.node(j));
            weight_matrix[static_cast<std::size_t>(i) * n + j] = m;
            weight_matrix[static_cast<std::size_t>(j) * n + i] = m;
        }
    }
}

Field RieszOperator::Impl::apply_radial(const Field& f) const {
    const RadialGrid& g = std::get<RadialGrid>(grid);
    const int n = g.n;
    const double h = g.spacing();
    double peak = 0.0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    if (peak > 0.0 && std::abs(f.values[n - 1]) > 1e-8 * peak &&
        !tail_warned.exchange(true)) {
        std::fprintf(stderr,
                     "choquard: warning: radial Riesz input not decayed below 1e-8 of its peak "
                     "at r_max = %g; the truncated tail is dropped\n",
                     g.r_max);
    }
    Field out = make_field(grid);
    if (alpha == 2.0) {
        // (I_2 ∗ g)(r) = (1/r) [∫₀^r g s² ds + r ∫_r^∞ g s ds] on cell sums,
        // with the diagonal cell's analytic |r-s| correction.
        std::vector<double> below(n + 1, 0.0), above(n + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            const double ri = g.node(i);
            below[i + 1] = below[i] + f.values[i] * ri * ri * h;
        }
        for (int i = n - 1; i >= 0; --i) above[i] = above[i + 1] + f.values[i] * g.node(i) * h;
        for (int i = 0; i < n; ++i) {
            const double ri = g.node(i);
            const double diag = f.values[i] * ri * (ri * h - h * h / 8.0);
            out.values[i] = sign * (below[i] + ri * above[i + 1] + diag) / ri;
        }
        return out;
    }
    for (int i = 0; i < n; ++i) {
        const double* row = &weight_matrix[static_cast<std::size_t>(i) * n];
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += f.values[j] * g.node(j) * row[j];
        out.values[i] = prefactor * s / g.node(i);
    }
    return out;
}

void RieszOperator::Impl::build_box(const BoxGrid& g) {
    g.validate();
    const double A = riesz_normalization(3, alpha);
    const int M = 2 * g.n_per_axis;
    padded = M;
    const double h = g.spacing();
    const std::size_t nreal = static_cast<std::size_t>(M) * M * M;
    const std::size_t ncplx = static_cast<std::size_t>(M) * M * (M / 2 + 1);

    double* kernel = fftw_alloc_real(nreal);
    fftw_complex* spec = fftw_alloc_complex(ncplx);
    plan_fwd = fftw_plan_dft_r2c_3d(M, M, M, kernel, spec, FFTW_ESTIMATE);
    plan_bwd = fftw_plan_dft_c2r_3d(M, M, M, spec, kernel, FFTW_ESTIMATE);

    auto offset = [M, h](int t) { return h * (t <= M / 2 ? t : t - M); };
    std::size_t idx = 0;
    for (int i = 0; i < M; ++i) {
        const double dx = offset(i);
        for (int j = 0; j < M; ++j) {
            const double dy = offset(j);
            for (int k = 0; k < M; ++k, ++idx) {
                const double dz = offset(k);
                const double r2 = dx * dx + dy * dy + dz * dz;
                kernel[idx] = (r2 == 0.0) ? 0.0 : A * std::pow(r2, (alpha - 3.0) / 2.0);
            }
        }
    }
    // Cells at min-image distance <= 2h from the singularity carry the exact
    // cell mean of the kernel; the midpoint sample misrepresents them.
    auto at = [M](int i, int j, int k) {
        auto wrap = [M](int t) { return (t + M) % M; };
        return (static_cast<std::size_t>(wrap(i)) * M + wrap(j)) * M + wrap(k);
    };
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j)
            for (int k = -2; k <= 2; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                kernel[at(i, j, k)] = A * near_cell_mean(alpha, h, {i * h, j * h, k * h});
            }
    kernel[0] = A * singular_cell_mean(alpha, h);
    if (sign < 0.0)
        for (std::size_t t = 0; t < nreal; ++t) kernel[t] = -kernel[t];

    fftw_execute_dft_r2c(plan_fwd, kernel, spec);
    kernel_hat.resize(ncplx);
    // The kernel is even under min-image indexing, so its spectrum is real;
    // dropping the roundoff imaginary part keeps the pairing exactly symmetric.
    for (std::size_t t = 0; t < ncplx; ++t) kernel_hat[t] = {spec[t][0], 0.0};
    fftw_free(kernel);
    fftw_free(spec);
}

Field RieszOperator::Impl::apply_box(const Field& f) const {
    const BoxGrid& g = std::get<BoxGrid>(grid);
    const int n = g.n_per_axis;
    const int M = padded;
    const double h = g.spacing();
    const std::size_t nreal = static_cast<std::size_t>(M) * M * M;
    const std::size_t ncplx = static_cast<std::size_t>(M) * M * (M / 2 + 1);

    double* work = fftw_alloc_real(nreal);
    fftw_complex* spec = fftw_alloc_complex(ncplx);
    std::memset(work, 0, nreal * sizeof(double));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            std::memcpy(&work[(static_cast<std::size_t>(i) * M + j) * M],
                        &f.values[g.index(i, j, 0)], static_cast<std::size_t>(n) * sizeof(double));

    fftw_execute_dft_r2c(plan_fwd, work, spec);
    const double scale = h * h * h / static_cast<double>(nreal);
    for (std::size_t t = 0; t < ncplx; ++t) {
        const double m = kernel_hat[t].real() * scale;
        spec[t][0] *= m;
        spec[t][1] *= m;
    }
    fftw_execute_dft_c2r(plan_bwd, spec, work);

    Field out = make_field(grid);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            std::memcpy(&out.values[g.index(i, j, 0)],
                        &work[(static_cast<std::size_t>(i) * M + j) * M],
                        static_cast<std::size_t>(n) * sizeof(double));
    fftw_free(work);
    fftw_free(spec);
    return out;
}

RieszOperator::RieszOperator(int N, double alpha, const Grid& grid, RieszFaultInjection fault)
    : impl_(std::make_unique<Impl>()) {
    if (N != 3) {
        std::ostringstream os;
        os << "unsupported backend: Riesz convolution is implemented for N = 3 only (got N = "
           << N << ")";
        throw std::invalid_argument(os.str());
    }
    if (!(alpha > 0.0 && alpha < 3.0))
        throw std::domain_error("Riesz operator requires alpha in (0, N)");
    impl_->grid = grid;
    impl_->alpha = alpha;
    impl_->sign = fault.negate_kernel ? -1.0 : 1.0;
    if (const auto* r = std::get_if<RadialGrid>(&grid))
        impl_->build_radial(*r);
    else
        impl_->build_box(std::get<BoxGrid>(grid));
}

RieszOperator::~RieszOperator() = default;
RieszOperator::RieszOperator(RieszOperator&&) noexcept = default;
RieszOperator& RieszOperator::operator=(RieszOperator&&) noexcept = default;

const Grid& RieszOperator::grid() const { return impl_->grid; }
double RieszOperator::alpha() const { return impl_->alpha; }

Field RieszOperator::apply(const Field& g) const {
    if (!same_grid(g.grid, impl_->grid))
        throw std::invalid_argument("field grid does not match the Riesz operator's grid");
    require_finite(g, "Riesz convolution input");
    if (std::holds_alternative<RadialGrid>(impl_->grid)) return impl_->apply_radial(g);
    return impl_->apply_box(g);
}

double RieszOperator::pairing(const Field& g, const Field& h) const {
    if (!same_grid(g.grid, h.grid))
        throw std::invalid_argument("grid mismatch between pairing arguments");
    return dot_quad(apply(g), h);
}

}  // namespace choquard
