#include "choquard/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace choquard {

void SolverConfig::validate() const {
    if (!(tol_grad > 0.0)) throw std::invalid_argument("solver requires tol_grad > 0");
    if (max_iter < 1) throw std::invalid_argument("solver requires max_iter >= 1");
    if (step_rule == StepRule::fixed && !(fixed_step > 0.0))
        throw std::invalid_argument("fixed step rule requires fixed_step > 0");
}

Field invert_shifted_laplacian(const Field& g, double a, const BoxSpectral* ws) {
    if (!(a > 0.0)) throw std::invalid_argument("shift a must be positive");
    if (std::holds_alternative<BoxGrid>(g.grid)) {
        if (ws) return ws->inverse_shifted(g, a);
        return BoxSpectral(std::get<BoxGrid>(g.grid)).inverse_shifted(g, a);
    }
    const RadialGrid& rg = std::get<RadialGrid>(g.grid);
    const int n = rg.n;
    const double h = rg.spacing();
    // Thomas sweep on the same conservative stencil as neg_laplacian_radial.
    std::vector<double> diag(n), upper(n), rhs(g.values);
    for (int i = 0; i < n; ++i) {
        const double ri = rg.node(i);
        const double flo = i * h, fhi = (i + 1) * h;
        const double scale = 1.0 / (ri * ri * h * h);
        diag[i] = (flo * flo + fhi * fhi) * scale + a;
        upper[i] = -fhi * fhi * scale;
    }
    for (int i = 1; i < n; ++i) {
        const double ri = rg.node(i);
        const double flo = i * h;
        const double lower = -flo * flo / (ri * ri * h * h);
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    Field out = make_field(g.grid);
    out.values[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i)
        out.values[i] = (rhs[i] - upper[i] * out.values[i + 1]) / diag[i];
    return out;
}

namespace {

// Positive part with a tiny relative floor: exact zeros would put clip
// edges under the spectral Laplacian, whose ringing dithers the descent.
Field positive_part(Field u) {
    double peak = 0.0;
    for (double v : u.values) peak = std::max(peak, v);
    const double floor = 1e-14 * peak;
    for (double& v : u.values) v = std::max(v, floor);
    return u;
}

// First-order measure for the constrained set {u >= 0}: on the active set
// only components pointing out of the constraint count.
Field projected_gradient(const Field& g, const Field& u) {
    Field out = g;
    for (std::size_t i = 0; i < g.values.size(); ++i)
        if (u.values[i] <= 0.0) out.values[i] = std::min(g.values[i], 0.0);
    return out;
}

Field scaled_copy(const Field& u, double t) {
    Field out = u;
    for (double& v : out.values) v *= t;
    return out;
}

// The ray functions t ↦ N(t) = ∫(I_α∗F(tu)) f(tu) tu and the matching
// nonlocal energy ∫(I_α∗F(tu))F(tu). For pure power sums they reduce to
// polynomials in t through the pair matrix G_ij = ∫(I_α∗u^{e_i}) u^{e_j};
// a capped nonlinearity only falls off this path where the cap activates.
class NehariRay {
  public:
    NehariRay(const Field& u, const Nonlinearity& nl, bool truncated, const RieszOperator& R)
        : u_(u), nl_(nl), truncated_(truncated), R_(R) {
        const auto& terms = nl.terms();
        powers_.resize(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i) {
            powers_[i] = make_field(u.grid);
            for (std::size_t t = 0; t < u.values.size(); ++t)
                powers_[i].values[t] =
                    u.values[t] > 0.0 ? std::pow(u.values[t], terms[i].exponent) : 0.0;
        }
        G_.assign(terms.size() * terms.size(), 0.0);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const Field Ri = R.apply(powers_[i]);
            for (std::size_t j = i; j < terms.size(); ++j) {
                G_[i * terms.size() + j] = G_[j * terms.size() + i] = dot_quad(Ri, powers_[j]);
            }
        }
        max_u_ = max_value(u_);
    }

    bool polynomial_valid(double t) const {
        return !truncated_ || t * max_u_ <= nl_.cap_onset();
    }

    double pairing_deriv(double t) const {  // N(t)
        if (polynomial_valid(t)) {
            const auto& terms = nl_.terms();
            double s = 0.0;
            for (std::size_t i = 0; i < terms.size(); ++i)
                for (std::size_t j = 0; j < terms.size(); ++j)
                    s += terms[i].coef / terms[i].exponent * terms[j].coef *
                         std::pow(t, terms[i].exponent + terms[j].exponent) *
                         G_[i * terms.size() + j];
            return s;
        }
        const Field tu = scaled_copy(u_, t);
        const Field Ftu = map_F(nl_, tu, truncated_);
        const Field W = R_.apply(Ftu);
        double s = 0.0;
        for (std::size_t i = 0; i < tu.values.size(); ++i)
            s += quad_weight(tu.grid, i) * W.values[i] * nl_.f_truncated(tu.values[i]) *
                 tu.values[i];
        return s;
    }

  private:
    const Field& u_;
    const Nonlinearity& nl_;
    bool truncated_;
    const RieszOperator& R_;
    std::vector<Field> powers_;
    std::vector<double> G_;
    double max_u_ = 0.0;
};

NehariResult nehari_on_ray(const Field& u, const Nonlinearity& nl, bool truncated,
                           double quadratic, double lambda, const RieszOperator& R) {
    NehariRay ray(u, nl, truncated, R);
    if (!(ray.pairing_deriv(1.0) > 0.0))
        throw std::invalid_argument("degenerate input: nonlocal term is not positive");
    auto phi = [&](double t) { return t * t * quadratic - lambda * ray.pairing_deriv(t); };
    // Tight bracket growth keeps near-manifold projections inside the
    // polynomial fast window of the capped ray.
    double lo = 1.0, hi = 1.0;
    if (phi(1.0) > 0.0) {
        while (phi(hi) > 0.0) {
            hi *= 1.3;
            // A capped f grows linearly, so its ray may never cross; report it
            // as a degenerate input (the descent then shortens the step).
            if (truncated && hi * max_value(u) > 64.0 * nl.cap_onset())
                throw std::invalid_argument(
                    "degenerate input: capped nonlinearity has no Nehari crossing on this ray");
            if (hi > 1e12) throw std::runtime_error("Nehari bracketing failed (no sign change)");
        }
        lo = hi / 1.3;
    } else {
        while (phi(lo) <= 0.0) {
            lo /= 1.3;
            if (lo < 1e-12) throw std::invalid_argument("degenerate input: Nehari root at zero");
        }
        hi = 1.3 * lo;
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    const double t_star = 0.5 * (lo + hi);
    return {t_star, scaled_copy(u, t_star)};
}

struct Functional {
    std::function<std::pair<EnergyReport, Field>(const Field&)> energy_gradient;
    std::function<EnergyReport(const Field&)> energy;
    std::function<Field(const Field&)> precondition;
    std::function<Field(const Field&)> nehari;
};

struct DescentOutcome {
    Field u;
    EnergyReport energy;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool collapsed = false;
    std::vector<double> energy_trace;
};

DescentOutcome run_descent(Field u0, const Functional& fn, const SolverConfig& cfg) {
    DescentOutcome out;
    Field u = fn.nehari(positive_part(std::move(u0)));
    const double norm0 = norm_l2(u);
    auto [E, g0] = fn.energy_gradient(u);
    Field g = projected_gradient(g0, u);
    out.energy_trace.push_back(E.total);
    int steps = 0;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double gn = norm_l2(g);
        if (gn <= cfg.tol_grad) {
            out.converged = true;
            break;
        }
        if (norm_l2(u) < 1e-6 * norm0 || peak_width_cells(u) < 2) {
            out.collapsed = true;
            break;
        }
        const Field d = cfg.precondition ? fn.precondition(g) : g;
        const double slope = dot_quad(g, d);  // > 0 for an SPD preconditioner
        bool accepted = false;
        if (cfg.step_rule == SolverConfig::StepRule::fixed) {
            Field trial = u;
            for (std::size_t t = 0; t < trial.values.size(); ++t)
                trial.values[t] -= cfg.fixed_step * d.values[t];
            try {
                u = fn.nehari(positive_part(std::move(trial)));
                accepted = true;
            } catch (const std::invalid_argument&) {
                accepted = false;
            }
            if (accepted) {
                std::tie(E, g0) = fn.energy_gradient(u);
                g = projected_gradient(g0, u);
                out.energy_trace.push_back(E.total);
            }
        } else {
            // Near the critical point energy differences sink into roundoff;
            // a full preconditioned step contracts the gradient there, so
            // accept on gradient decrease instead of the Armijo test.
            if (gn <= 1e-4) {
                Field trial = u;
                for (std::size_t t = 0; t < trial.values.size(); ++t)
                    trial.values[t] -= d.values[t];
                try {
                    Field candidate = fn.nehari(positive_part(std::move(trial)));
                    auto [Ec, gc] = fn.energy_gradient(candidate);
                    Field gp = projected_gradient(gc, candidate);
                    if (norm_l2(gp) < gn) {
                        u = std::move(candidate);
                        E = Ec;
                        g = std::move(gp);
                        accepted = true;
                        out.energy_trace.push_back(E.total);
                    }
                } catch (const std::invalid_argument&) {
                }
            }
            double step = 1.0;
            for (int bt = 0; !accepted && bt < 60; ++bt) {
                Field trial = u;
                for (std::size_t t = 0; t < trial.values.size(); ++t)
                    trial.values[t] -= step * d.values[t];
                Field candidate;
                try {
                    candidate = fn.nehari(positive_part(std::move(trial)));
                } catch (const std::invalid_argument&) {
                    step *= 0.5;
                    continue;
                }
                const EnergyReport Ec = fn.energy(candidate);
                // Armijo with an absolute floor for decreases at roundoff scale
                const double noise = 4e-16 * (1.0 + std::abs(E.total));
                if (Ec.total <= E.total - 1e-4 * step * slope + noise) {
                    u = std::move(candidate);
                    accepted = true;
                    std::tie(E, g0) = fn.energy_gradient(u);
                    g = projected_gradient(g0, u);
                    out.energy_trace.push_back(E.total);
                    break;
                }
                step *= 0.5;
            }
        }
        if (!accepted) break;  // stalled at the numerical floor
        ++steps;
    }
    out.iterations = steps;
    out.grad_norm = norm_l2(g);
    if (out.grad_norm <= cfg.tol_grad && !out.collapsed) out.converged = true;
    out.u = std::move(u);
    out.energy = E;
    return out;
}

Field make_seed(const Grid& grid, SolverConfig::SeedProfile profile) {
    auto gauss_r = [](double r) { return std::exp(-0.5 * r * r); };
    auto inst_r = [](double r) { return instanton(3, 1.0, r); };
    const bool gaussian = profile != SolverConfig::SeedProfile::instanton;
    if (const auto* rg = std::get_if<RadialGrid>(&grid))
        return sample_radial(*rg, gaussian ? gauss_r : inst_r);
    const BoxGrid& bg = std::get<BoxGrid>(grid);
    return sample_box(bg, [&](const Vec3& x) {
        return gaussian ? gauss_r(x.norm()) : inst_r(x.norm());
    });
}

}  // namespace

NehariResult nehari_project(const Field& u, const Nonlinearity& nl, double a, double lambda,
                            const RieszOperator& R, const BoxSpectral* ws, bool truncated) {
    const double quad = dot_quad(u, neg_laplacian(u, ws)) + a * dot_quad(u, u);
    return nehari_on_ray(u, nl, truncated, quad, lambda, R);
}

NehariResult nehari_project_semiclassical(const Field& u, const Nonlinearity& nl,
                                          const Field& v_eps, const RieszOperator& R,
                                          const BoxSpectral& ws) {
    double vmass = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        vmass += v_eps.values[i] * u.values[i] * u.values[i];
    vmass *= std::get<BoxGrid>(u.grid).cell_volume();
    const double quad = dot_quad(u, ws.neg_laplacian(u)) + vmass;
    return nehari_on_ray(u, nl, true, quad, 1.0, R);
}

SolveResult ground_state_limit(const ProblemParams& params, const SolverConfig& cfg,
                               const Grid& grid, const Field* initial) {
    params.validate();
    cfg.validate();
    const Nonlinearity nl = Nonlinearity::model(params);
    const RieszOperator R(params.N, params.alpha, grid);
    std::optional<BoxSpectral> ws;
    if (const auto* bg = std::get_if<BoxGrid>(&grid)) ws.emplace(*bg);
    const BoxSpectral* wsp = ws ? &*ws : nullptr;

    Functional fn;
    fn.energy_gradient = [&](const Field& u) {
        return energy_gradient_limit(u, nl, params.a, 1.0, R, wsp);
    };
    fn.energy = [&](const Field& u) { return energy_limit(u, nl, params.a, 1.0, R, wsp); };
    fn.precondition = [&](const Field& g) { return invert_shifted_laplacian(g, params.a, wsp); };
    fn.nehari = [&](const Field& u) {
        return nehari_project(u, nl, params.a, 1.0, R, wsp).scaled;
    };

    Field seed = initial ? *initial : make_seed(grid, cfg.seed_profile);
    DescentOutcome out = run_descent(std::move(seed), fn, cfg);

    SolveResult res;
    res.grad_norm = out.grad_norm;
    res.iterations = out.iterations;
    res.converged = out.converged;
    res.possible_nonexistence = out.collapsed;
    if (out.collapsed) res.converged = false;
    res.energy = out.energy;
    res.energy_trace = std::move(out.energy_trace);
    res.pohozaev_residual = pohozaev_residual(out.energy, params.N, params.alpha);
    const std::size_t pk = argmax(out.u);
    res.peak_value = out.u.values[pk];
    // A radial profile peaking in the first cell has its true maximum at the origin.
    if (std::holds_alternative<RadialGrid>(grid) && pk == 0)
        res.peak_position = Vec3{};
    else
        res.peak_position = node_position(grid, pk);
    res.u = std::move(out.u);
    return res;
}

SolveResult semiclassical_solve(const ProblemParams& params, const PotentialSpec& pot,
                                const SemiclassicalConfig& scfg, const SolverConfig& cfg,
                                const BoxGrid& grid, const Field& limit_ground_state) {
    params.validate();
    cfg.validate();
    pot.validate();
    if (!(scfg.eps > 0.0)) throw std::invalid_argument("semiclassical solve requires eps > 0");
    require_box_covers(grid, pot.O, scfg.eps, pot.m, 5.0);

    Nonlinearity nl = Nonlinearity::model(params);
    const double kappa =
        scfg.kappa > 0.0 ? scfg.kappa : 2.0 * max_value(limit_ground_state);
    const double cap = scfg.k > 0.0 ? scfg.k : nl.f(kappa) + 1.0;
    nl.set_truncation(cap, kappa);

    const RieszOperator R(params.N, params.alpha, Grid{grid});
    const BoxSpectral ws(grid);
    const double eps = scfg.eps;
    const Field v_eps = sample_box(grid, [&](const Vec3& y) { return pot.V(y * eps); });
    const PenaltyWeights chi =
        make_penalty_weights(grid, pot.O, eps, scfg.nu, scfg.penalty_disabled);

    Functional fn;
    fn.energy_gradient = [&](const Field& u) {
        return energy_gradient_semiclassical(u, nl, v_eps, chi, R, ws);
    };
    fn.energy = [&](const Field& u) {
        return energy_semiclassical(u, nl, v_eps, chi, R, ws);
    };
    // Shift by max V_ε: a smaller shift makes full steps overshoot in the
    // tail (local linear rate V/shift > 1), flip signs there and stall the
    // descent on clip edges.
    const double shift = *std::max_element(v_eps.values.begin(), v_eps.values.end());
    fn.precondition = [&, shift](const Field& g) { return ws.inverse_shifted(g, shift); };
    fn.nehari = [&](const Field& u) {
        return nehari_project_semiclassical(u, nl, v_eps, R, ws).scaled;
    };

    // Initializer U_ε^x: the limit ground state recentered at x/ε under a
    // cutoff supported in O. The cutoff radius must clear the profile core at
    // finite ε, so β is the largest radius with 2β strictly inside O.
    const Vec3 x0 = pot.minimizers.front();
    double beta = std::numeric_limits<double>::infinity();
    if (pot.O.bounded()) {
        const double dist = pot.O.radius - (x0 - pot.O.center).norm();
        if (!(dist > 0.0))
            throw std::invalid_argument("minimizer sits on the boundary of O; no cutoff radius");
        beta = 0.4 * dist;
    }
    // A strictly positive floor under the cut-off profile: exact zeros in the
    // seed create clip edges whose spectral-Laplacian ringing stalls the
    // descent; the floor is far below every tolerance and decays outward.
    const double floor_amp = 1e-6 * max_value(limit_ground_state);
    Field seed = sample_box(grid, [&](const Vec3& y) {
        const Vec3 z = y - x0 * (1.0 / eps);
        const double zr = z.norm();
        const double phi = std::isinf(beta) ? 1.0 : cutoff_profile(eps * zr / beta);
        const double core = phi == 0.0 ? 0.0 : phi * radial_value_at(limit_ground_state, zr);
        return core + floor_amp * std::exp(-0.3 * zr);
    });

    DescentOutcome out = run_descent(std::move(seed), fn, cfg);

    SolveResult res;
    res.grad_norm = out.grad_norm;
    res.iterations = out.iterations;
    res.converged = out.converged;
    res.possible_nonexistence = out.collapsed;
    res.energy = out.energy;
    res.energy_trace = std::move(out.energy_trace);
    res.pohozaev_residual = pohozaev_residual(out.energy, params.N, params.alpha);
    res.q_value = out.energy.penalty;
    if (res.q_value > 0.0) {
        res.penalty_active = true;
        res.converged = false;
    }
    res.peak_value = max_value(out.u);
    if (res.peak_value >= kappa) {
        res.truncation_active = true;
        res.converged = false;
    }
    res.peak_position = node_position(Grid{grid}, argmax(out.u)) * eps;
    res.u = std::move(out.u);
    return res;
}

}  // namespace choquard
