#include "choquard/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace choquard {

double pohozaev_residual_field(const Field& u, const ProblemParams& params,
                               const Nonlinearity& nl, double lambda, const RieszOperator& R,
                               const BoxSpectral* ws) {
    const EnergyReport rep = energy_limit(u, nl, params.a, lambda, R, ws);
    return pohozaev_residual(rep, params.N, params.alpha);
}

namespace {

double unit_sphere_area(int N) {
    return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0);
}

double bubble(int N, double r) { return instanton(N, 1.0, r); }

double bubble_derivative(int N, double r) {
    const double nm2 = N - 2.0;
    const double amp = std::pow(N * nm2, nm2 / 4.0);
    return -nm2 * amp * r * std::pow(1.0 + r * r, -N / 2.0);
}

// Rayleigh-quotient integrals of the bubble over [0, ∞) through r = s/(1-s);
// the substituted integrands stay bounded and smooth on [0, 1).
struct BubbleIntegrals {
    double kinetic;
    double critical_norm;
};
BubbleIntegrals bubble_integrals(int N, int nodes) {
    const double surf = unit_sphere_area(N);
    const double crit_exp = 2.0 * N / (N - 2.0);
    double kin = 0.0, crit = 0.0;
    const double h = 1.0 / nodes;
    for (int i = 0; i < nodes; ++i) {
        const double s = (i + 0.5) * h;
        const double r = s / (1.0 - s);
        const double jac = 1.0 / ((1.0 - s) * (1.0 - s));
        const double du = bubble_derivative(N, r);
        const double shell = surf * std::pow(r, N - 1.0) * jac;
        kin += du * du * shell;
        crit += std::pow(bubble(N, r), crit_exp) * shell;
    }
    return {kin * h, crit * h};
}

}  // namespace

SobolevConstants sobolev_constants(int N, double alpha, int resolution) {
    if (!(alpha > 0.0 && alpha < static_cast<double>(N)))
        throw std::domain_error("sobolev_constants requires alpha in (0, N)");
    const BubbleIntegrals coarse = bubble_integrals(N, resolution);
    const BubbleIntegrals fine = bubble_integrals(N, 2 * resolution);
    const double s_coarse = coarse.kinetic / std::pow(coarse.critical_norm, (N - 2.0) / N);
    const double s_fine = fine.kinetic / std::pow(fine.critical_norm, (N - 2.0) / N);
    if (std::abs(s_fine - s_coarse) > 1e-4 * std::abs(s_fine)) {
        std::ostringstream os;
        os << "Rayleigh quotient quadrature did not settle: S = " << s_coarse << " vs " << s_fine
           << " across a resolution doubling";
        throw std::runtime_error(os.str());
    }
    const double ac = riesz_normalization(N, alpha) * hls_sharp_constant(N, alpha);
    return {s_fine, s_fine / std::pow(ac, (N - 2.0) / (N + alpha))};
}

double mp_threshold(double lambda, int N, double alpha) {
    if (!(lambda >= 0.5 && lambda <= 1.0))
        throw std::domain_error("mp_threshold requires lambda in [1/2, 1]");
    const double s_alpha = sobolev_constants(N, alpha).S_alpha;
    return (2.0 + alpha) / (2.0 * (N + alpha)) *
           std::pow((N + alpha) / (N - 2.0), (N - 2.0) / (2.0 + alpha)) *
           std::pow(lambda, (2.0 - N) / (2.0 + alpha)) *
           std::pow(s_alpha, (N + alpha) / (2.0 + alpha));
}

namespace {

struct LogFit {
    double slope;
    double intercept;
    double max_abs_residual;
};

LogFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        resid = std::max(resid, std::abs(ys[i] - slope * xs[i] - intercept));
    return {slope, intercept, resid};
}

std::string render_table(const InstantonFixtures& fx) {
    std::ostringstream os;
    os << "eps kinetic critical_norm mass (S^{N/2} = " << fx.s_pow << ")";
    for (const auto& row : fx.rows)
        os << "\n  " << row.eps << " " << row.kinetic << " " << row.critical_norm << " "
           << row.mass;
    return os.str();
}

}  // namespace

InstantonFixtures instanton_fixtures(const std::vector<double>& eps_list, int N) {
    if (N != 3) throw std::invalid_argument("instanton fixtures are tabulated for N = 3 only");
    if (eps_list.size() < 3)
        throw std::invalid_argument("instanton fixtures need at least 3 epsilon values");
    for (double e : eps_list)
        if (!(e > 0.0 && e <= 0.5))
            throw std::invalid_argument("instanton fixtures need eps in (0, 1/2]");
    for (std::size_t i = 2; i < eps_list.size(); ++i) {
        const double r1 = eps_list[i - 1] / eps_list[i - 2];
        const double r2 = eps_list[i] / eps_list[i - 1];
        if (std::abs(r1 - r2) > 0.01 * std::abs(r1))
            throw std::invalid_argument("instanton fixtures need a geometric eps progression");
    }

    InstantonFixtures fx;
    const BubbleIntegrals ref = bubble_integrals(N, 200000);
    fx.s_pow = ref.kinetic;  // ∫|∇U|² = S^{N/2} for the normalized bubble

    // All three integrals in bubble coordinates y = x/ε over [0, 2/ε]:
    //   ∫|∇ψ_ε|²   = ∫ (ε φ'(εy) U + φ(εy) U')² 4π y² dy
    //   ∫ψ_ε^6     = ∫ (φ(εy) U)^6 4π y² dy
    //   ∫ψ_ε²      = ε² ∫ (φ(εy) U)² 4π y² dy
    for (double eps : eps_list) {
        const double span = 2.0 / eps;
        const int nodes = 400000;
        const double h = span / nodes;
        double kin = 0.0, crit = 0.0, mass = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double y = (i + 0.5) * h;
            const double shell = 4.0 * M_PI * y * y;
            const double phi = cutoff_profile(eps * y);
            const double dphi = eps * cutoff_profile_derivative(eps * y);
            const double U = bubble(N, y);
            const double dU = bubble_derivative(N, y);
            const double grad = dphi * U + phi * dU;
            kin += grad * grad * shell;
            crit += std::pow(phi * U, 6.0) * shell;
            mass += phi * U * phi * U * shell;
        }
        fx.rows.push_back({eps, kin * h, crit * h, eps * eps * mass * h});
    }

    std::vector<double> lx, kin_dev, mass_val, crit_dev;
    for (const auto& row : fx.rows) {
        lx.push_back(std::log(row.eps));
        kin_dev.push_back(std::log(std::abs(row.kinetic - fx.s_pow)));
        mass_val.push_back(std::log(row.mass));
        crit_dev.push_back(std::log(std::abs(row.critical_norm - fx.s_pow)));
    }
    const LogFit fk = fit_line(lx, kin_dev);
    const LogFit fm = fit_line(lx, mass_val);
    const LogFit fc = fit_line(lx, crit_dev);
    fx.kinetic_exponent = fk.slope;
    fx.mass_exponent = fm.slope;
    fx.critical_exponent = fc.slope;
    fx.kinetic_fit_residual = fk.max_abs_residual;
    fx.mass_fit_residual = fm.max_abs_residual;
    fx.critical_fit_residual = fc.max_abs_residual;
    const double worst =
        std::max({fk.max_abs_residual, fm.max_abs_residual, fc.max_abs_residual});
    if (worst > 0.25) {
        std::ostringstream os;
        os << "instanton fixture fit residual too large (" << worst << " in log units)\n"
           << render_table(fx);
        throw std::runtime_error(os.str());
    }
    return fx;
}

DecayFit decay_fit(const Field& u, const Vec3& peak) {
    const double peak_val = max_value(u);
    if (!(peak_val > 0.0)) throw std::invalid_argument("decay fit needs a positive peak");
    const double lo = 1e-8 * peak_val, hi = 1e-2 * peak_val;
    std::vector<double> dist, logu;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double v = u.values[i];
        if (v > lo && v < hi) {
            dist.push_back((node_position(u.grid, i) - peak).norm());
            logu.push_back(std::log(v));
        }
    }
    if (dist.size() < 20) {
        std::ostringstream os;
        os << "insufficient tail: only " << dist.size()
           << " nodes in the relative window (1e-8, 1e-2); need at least 20";
        throw std::runtime_error(os.str());
    }
    const std::size_t n = dist.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += dist[i];
        sy += logu[i];
        sxx += dist[i] * dist[i];
        sxy += dist[i] * logu[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = logu[i] - slope * dist[i] - intercept;
        ss += r * r;
    }
    DecayFit fit;
    fit.c = -slope;
    fit.C = std::exp(intercept);
    fit.r_lo = *std::min_element(dist.begin(), dist.end());
    fit.r_hi = *std::max_element(dist.begin(), dist.end());
    fit.residual = std::sqrt(ss / n);
    fit.points = static_cast<int>(n);
    return fit;
}

ConcentrationMetrics concentration_metrics(const SolveResult& result, const PotentialSpec& pot,
                                           const Field& limit_reference) {
    ConcentrationMetrics out;
    out.dist_to_M = std::numeric_limits<double>::infinity();
    for (const Vec3& x : pot.minimizers)
        out.dist_to_M = std::min(out.dist_to_M, (result.peak_position - x).norm());

    const BoxGrid& g = std::get<BoxGrid>(result.u.grid);
    const int n = g.n_per_axis;
    const Field ref = sample_box(g, [&](const Vec3& y) {
        return radial_value_at(limit_reference, y.norm());
    });
    const std::size_t pk = argmax(result.u);
    const int pk_k = static_cast<int>(pk % n);
    const int pk_j = static_cast<int>((pk / n) % n);
    const int pk_i = static_cast<int>(pk / (static_cast<std::size_t>(n) * n));
    const int c = n / 2;  // the origin's grid index, where the reference peaks
    // Integer-grid alignment: cross-correlation maximized over shifts near
    // the peak offset (the profiles are unimodal, so the optimum is local).
    double best = -std::numeric_limits<double>::infinity();
    Field best_shifted;
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
            for (int dk = -1; dk <= 1; ++dk) {
                Field w = circular_shift(result.u, c - pk_i + di, c - pk_j + dj, c - pk_k + dk);
                const double score = dot_quad(w, ref);
                if (score > best) {
                    best = score;
                    best_shifted = std::move(w);
                }
            }
    double gap2 = 0.0;
    const double w = g.cell_volume();
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
        const double d = best_shifted.values[i] - ref.values[i];
        gap2 += d * d;
    }
    out.profile_gap = std::sqrt(gap2 * w);
    return out;
}

}  // namespace choquard
