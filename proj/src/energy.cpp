#include "choquard/energy.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace choquard {

struct BoxSpectral::Impl {
    BoxGrid grid;
    std::vector<double> ksq;  // |k|² on the r2c layout
    fftw_plan plan_fwd = nullptr;
    fftw_plan plan_bwd = nullptr;

    ~Impl() {
        if (plan_fwd) fftw_destroy_plan(plan_fwd);
        if (plan_bwd) fftw_destroy_plan(plan_bwd);
    }

    Field multiply(const Field& u, bool invert, double shift) const {
        const int n = grid.n_per_axis;
        const std::size_t nreal = grid.size();
        const std::size_t ncplx = static_cast<std::size_t>(n) * n * (n / 2 + 1);
        double* work = fftw_alloc_real(nreal);
        fftw_complex* spec = fftw_alloc_complex(ncplx);
        std::memcpy(work, u.values.data(), nreal * sizeof(double));
        fftw_execute_dft_r2c(plan_fwd, work, spec);
        const double norm = 1.0 / static_cast<double>(nreal);
        for (std::size_t t = 0; t < ncplx; ++t) {
            const double m = invert ? norm / (ksq[t] + shift) : norm * (ksq[t] + shift);
            spec[t][0] *= m;
            spec[t][1] *= m;
        }
        fftw_execute_dft_c2r(plan_bwd, spec, work);
        Field out = make_field(u.grid);
        std::memcpy(out.values.data(), work, nreal * sizeof(double));
        fftw_free(work);
        fftw_free(spec);
        return out;
    }
};

BoxSpectral::BoxSpectral(const BoxGrid& g) : impl_(std::make_unique<Impl>()) {
    g.validate();
    impl_->grid = g;
    const int n = g.n_per_axis;
    const double dk = M_PI / g.L;  // 2π / (2L)
    auto wavenumber = [n, dk](int t) { return dk * (t <= n / 2 ? t : t - n); };
    impl_->ksq.resize(static_cast<std::size_t>(n) * n * (n / 2 + 1));
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
        const double kx = wavenumber(i);
        for (int j = 0; j < n; ++j) {
            const double ky = wavenumber(j);
            for (int k = 0; k <= n / 2; ++k, ++idx) {
                const double kz = dk * k;
                impl_->ksq[idx] = kx * kx + ky * ky + kz * kz;
            }
        }
    }
    double* work = fftw_alloc_real(g.size());
    fftw_complex* spec = fftw_alloc_complex(impl_->ksq.size());
    impl_->plan_fwd = fftw_plan_dft_r2c_3d(n, n, n, work, spec, FFTW_ESTIMATE);
    impl_->plan_bwd = fftw_plan_dft_c2r_3d(n, n, n, spec, work, FFTW_ESTIMATE);
    fftw_free(work);
    fftw_free(spec);
}

BoxSpectral::~BoxSpectral() = default;
BoxSpectral::BoxSpectral(BoxSpectral&&) noexcept = default;
BoxSpectral& BoxSpectral::operator=(BoxSpectral&&) noexcept = default;

const BoxGrid& BoxSpectral::grid() const { return impl_->grid; }

Field BoxSpectral::neg_laplacian(const Field& u) const {
    if (!same_grid(u.grid, Grid{impl_->grid}))
        throw std::invalid_argument("field grid does not match the spectral workspace");
    return impl_->multiply(u, false, 0.0);
}

Field BoxSpectral::inverse_shifted(const Field& g, double a) const {
    if (!same_grid(g.grid, Grid{impl_->grid}))
        throw std::invalid_argument("field grid does not match the spectral workspace");
    if (!(a > 0.0)) throw std::invalid_argument("shift a must be positive");
    return impl_->multiply(g, true, a);
}

Field neg_laplacian_radial(const Field& u) {
    const RadialGrid& g = std::get<RadialGrid>(u.grid);
    const int n = g.n;
    const double h = g.spacing();
    Field out = make_field(u.grid);
    for (int i = 0; i < n; ++i) {
        const double ri = g.node(i);
        const double face_lo = i * h;        // r² weight at the inner face (0 at the center)
        const double face_hi = (i + 1) * h;  // outer face; Dirichlet ghost beyond r_max
        const double u_lo = (i > 0) ? u.values[i - 1] : 0.0;  // multiplied by face_lo² = 0 at i=0
        const double u_hi = (i + 1 < n) ? u.values[i + 1] : 0.0;
        out.values[i] = (face_hi * face_hi * (u.values[i] - u_hi) +
                         face_lo * face_lo * (u.values[i] - u_lo)) /
                        (ri * ri * h * h);
    }
    return out;
}

Field neg_laplacian(const Field& u, const BoxSpectral* ws) {
    if (std::holds_alternative<RadialGrid>(u.grid)) return neg_laplacian_radial(u);
    if (!ws) throw std::invalid_argument("box fields need a spectral workspace for -Δ");
    return ws->neg_laplacian(u);
}

Field map_f(const Nonlinearity& nl, const Field& u, bool truncated) {
    Field out = make_field(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        out.values[i] = truncated ? nl.f_truncated(u.values[i]) : nl.f(u.values[i]);
    return out;
}

Field map_F(const Nonlinearity& nl, const Field& u, bool truncated) {
    Field out = make_field(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        out.values[i] = truncated ? nl.F_truncated(u.values[i]) : nl.F(u.values[i]);
    return out;
}

namespace {

void require_lambda(double lambda) {
    if (!(lambda >= 0.5 && lambda <= 1.0)) {
        std::ostringstream os;
        os << "lambda must lie in [1/2, 1] (got " << lambda << ")";
        throw std::domain_error(os.str());
    }
}

}  // namespace

std::pair<EnergyReport, Field> energy_gradient_limit(const Field& u, const Nonlinearity& nl,
                                                     double a, double lambda,
                                                     const RieszOperator& R,
                                                     const BoxSpectral* ws, bool truncated) {
    require_lambda(lambda);
    const Field Fu = map_F(nl, u, truncated);
    const Field W = R.apply(Fu);  // I_α ∗ F(u)
    const Field Lu = neg_laplacian(u, ws);
    EnergyReport rep;
    rep.lambda = lambda;
    rep.kinetic = dot_quad(u, Lu);
    rep.mass_term = a * dot_quad(u, u);
    rep.nonlocal = dot_quad(W, Fu);
    rep.penalty = 0.0;
    rep.total = EnergyReport::combine(rep.kinetic, rep.mass_term, rep.nonlocal, rep.penalty,
                                      lambda);
    Field grad = make_field(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double fi = truncated ? nl.f_truncated(u.values[i]) : nl.f(u.values[i]);
        grad.values[i] = Lu.values[i] + a * u.values[i] - lambda * W.values[i] * fi;
    }
    return {rep, std::move(grad)};
}

EnergyReport energy_limit(const Field& u, const Nonlinearity& nl, double a, double lambda,
                          const RieszOperator& R, const BoxSpectral* ws, bool truncated) {
    require_lambda(lambda);
    const Field Fu = map_F(nl, u, truncated);
    const Field W = R.apply(Fu);
    EnergyReport rep;
    rep.lambda = lambda;
    rep.kinetic = dot_quad(u, neg_laplacian(u, ws));
    rep.mass_term = a * dot_quad(u, u);
    rep.nonlocal = dot_quad(W, Fu);
    rep.penalty = 0.0;
    rep.total = EnergyReport::combine(rep.kinetic, rep.mass_term, rep.nonlocal, rep.penalty,
                                      lambda);
    return rep;
}

Field gradient_limit(const Field& u, const Nonlinearity& nl, double a, double lambda,
                     const RieszOperator& R, const BoxSpectral* ws, bool truncated) {
    return energy_gradient_limit(u, nl, a, lambda, R, ws, truncated).second;
}

double pohozaev_residual(const EnergyReport& rep, int N, double alpha) {
    const double lhs = 0.5 * (N - 2.0) * rep.kinetic + 0.5 * N * rep.mass_term;
    const double rhs = 0.5 * (N + alpha) * rep.lambda * rep.nonlocal;
    return std::abs(lhs - rhs) / (1.0 + lhs);
}

PenaltyWeights make_penalty_weights(const BoxGrid& g, const Domain& O, double eps, double nu,
                                    bool disabled) {
    if (!(eps > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("penalty weights require eps > 0 and nu > 0");
    PenaltyWeights pw;
    pw.disabled = disabled;
    if (disabled) return pw;
    const double rate = std::pow(eps, -nu);
    pw.chi = sample_box(g, [&](const Vec3& y) {
        return O.contains(y * eps) ? 0.0 : rate;  // y lives in rescaled coordinates
    });
    return pw;
}

std::pair<double, Field> penalty_q(const Field& u, const PenaltyWeights& pw) {
    if (pw.disabled || pw.chi.values.empty()) return {0.0, make_field(u.grid)};
    if (!same_grid(u.grid, pw.chi.grid))
        throw std::invalid_argument("penalty weights live on a different grid");
    double mass = 0.0;
    const double w = std::get<BoxGrid>(u.grid).cell_volume();
    for (std::size_t i = 0; i < u.values.size(); ++i)
        mass += pw.chi.values[i] * u.values[i] * u.values[i];
    mass *= w;
    const double excess = std::max(mass - 1.0, 0.0);
    Field grad = make_field(u.grid);
    if (excess > 0.0)
        for (std::size_t i = 0; i < u.values.size(); ++i)
            grad.values[i] = 4.0 * excess * pw.chi.values[i] * u.values[i];
    return {excess * excess, std::move(grad)};
}

std::pair<double, Field> penalty_q(const Field& u, const SemiclassicalConfig& cfg,
                                   const Domain& O) {
    const BoxGrid& g = std::get<BoxGrid>(u.grid);
    return penalty_q(u, make_penalty_weights(g, O, cfg.eps, cfg.nu, cfg.penalty_disabled));
}

void require_box_covers(const BoxGrid& g, const Domain& O, double eps, double m,
                        double margin_lengths) {
    if (!O.bounded()) return;
    const double reach = (O.center.norm() + O.radius) / eps;
    const double margin = margin_lengths / std::sqrt(std::max(m, 1e-12));
    if (g.L < reach + margin) {
        std::ostringstream os;
        os << "box too small for O_eps: half-width L = " << g.L << " but O_eps reaches " << reach
           << " and needs a decay margin of " << margin << "; use L >= " << reach + margin;
        throw std::invalid_argument(os.str());
    }
}

std::pair<EnergyReport, Field> energy_gradient_semiclassical(const Field& u,
                                                             const Nonlinearity& nl,
                                                             const Field& v_eps,
                                                             const PenaltyWeights& chi,
                                                             const RieszOperator& R,
                                                             const BoxSpectral& ws) {
    if (!same_grid(u.grid, v_eps.grid))
        throw std::invalid_argument("potential field lives on a different grid");
    const Field Fu = map_F(nl, u, true);
    const Field W = R.apply(Fu);
    const Field Lu = ws.neg_laplacian(u);
    auto [qval, qgrad] = penalty_q(u, chi);

    EnergyReport rep;
    rep.lambda = 1.0;
    rep.kinetic = dot_quad(u, Lu);
    double mass = 0.0;
    const double w = std::get<BoxGrid>(u.grid).cell_volume();
    for (std::size_t i = 0; i < u.values.size(); ++i)
        mass += v_eps.values[i] * u.values[i] * u.values[i];
    rep.mass_term = mass * w;
    rep.nonlocal = dot_quad(W, Fu);
    rep.penalty = qval;
    rep.total = EnergyReport::combine(rep.kinetic, rep.mass_term, rep.nonlocal, rep.penalty, 1.0);

    Field grad = make_field(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double fi = nl.f_truncated(u.values[i]);
        grad.values[i] = Lu.values[i] + v_eps.values[i] * u.values[i] - W.values[i] * fi +
                         qgrad.values[i];
    }
    return {rep, std::move(grad)};
}

EnergyReport energy_semiclassical(const Field& u, const Nonlinearity& nl, const Field& v_eps,
                                  const PenaltyWeights& chi, const RieszOperator& R,
                                  const BoxSpectral& ws) {
    return energy_gradient_semiclassical(u, nl, v_eps, chi, R, ws).first;
}

Field gradient_semiclassical(const Field& u, const Nonlinearity& nl, const Field& v_eps,
                             const PenaltyWeights& chi, const RieszOperator& R,
                             const BoxSpectral& ws) {
    return energy_gradient_semiclassical(u, nl, v_eps, chi, R, ws).second;
}

}  // namespace choquard
