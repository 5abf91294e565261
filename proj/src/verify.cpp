#include "choquard/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "choquard/diagnostics.hpp"
#include "choquard/energy.hpp"
#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/potential.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"

namespace choquard {

namespace {

using Rng = std::mt19937_64;

Field random_radial_bumps(const RadialGrid& g, Rng& rng, bool nonnegative) {
    std::uniform_real_distribution<double> center(0.0, g.r_max / 4.0);
    std::uniform_real_distribution<double> width(0.4, 1.2);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);
    struct Bump {
        double a, c, w;
    };
    std::vector<Bump> bumps;
    for (int b = 0; b < 3; ++b) {
        double a = amp(rng);
        if (!nonnegative && sign(rng) < 0.0) a = -a;
        bumps.push_back({a, center(rng), width(rng)});
    }
    return sample_radial(g, [bumps](double r) {
        double v = 0.0;
        for (const auto& b : bumps) v += b.a * std::exp(-(r - b.c) * (r - b.c) / (b.w * b.w));
        return v;
    });
}

Field random_box_bumps(const BoxGrid& g, Rng& rng, bool nonnegative) {
    std::uniform_real_distribution<double> center(-g.L / 4.0, g.L / 4.0);
    std::uniform_real_distribution<double> width(0.5, 1.4);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);
    struct Bump {
        double a, w;
        Vec3 c;
    };
    std::vector<Bump> bumps;
    for (int b = 0; b < 3; ++b) {
        double a = amp(rng);
        if (!nonnegative && sign(rng) < 0.0) a = -a;
        bumps.push_back({a, width(rng), {center(rng), center(rng), center(rng)}});
    }
    return sample_box(g, [bumps](const Vec3& x) {
        double v = 0.0;
        for (const auto& b : bumps) {
            const Vec3 d = x - b.c;
            v += b.a * std::exp(-(d.x * d.x + d.y * d.y + d.z * d.z) / (b.w * b.w));
        }
        return v;
    });
}

// Observed Richardson order of the central quotient of `energy` against the
// reported directional derivative; exact-adjoint gradients give 2.
double observed_order(const std::function<double(const Field&)>& energy, const Field& u,
                      const Field& dir, double directional, double h) {
    auto quotient = [&](double step) {
        Field up = u, um = u;
        for (std::size_t i = 0; i < u.values.size(); ++i) {
            up.values[i] += step * dir.values[i];
            um.values[i] -= step * dir.values[i];
        }
        return (energy(up) - energy(um)) / (2.0 * step);
    };
    const double e1 = std::abs(quotient(h) - directional);
    const double e2 = std::abs(quotient(0.5 * h) - directional);
    // cancellation floor of the central quotient; below it the order is noise
    const double floor = 1e-12 * (1.0 + std::abs(energy(u))) / h;
    if (e2 <= floor) return 2.0;
    return std::log2(e1 / e2);
}

struct Battery {
    std::vector<CheckResult> results;
    VerifyOptions opts;

    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        r.name = name;
        try {
            auto [pass, detail] = fn();
            r.pass = pass;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(r));
    }
};

std::pair<bool, std::string> check_gradient_fd(const VerifyOptions&) {
    const ProblemParams params;
    const Nonlinearity nl = Nonlinearity::model(params);
    std::ostringstream detail;
    double worst = 3.0;

    {  // limit functional on the radial backend
        const RadialGrid rg{12.0, 192};
        const RieszOperator R(3, 2.0, Grid{rg});
        Rng rng(11);
        for (int trial = 0; trial < 6; ++trial) {
            const Field u = random_radial_bumps(rg, rng, true);
            const Field dir = random_radial_bumps(rg, rng, false);
            const auto [rep, grad] = energy_gradient_limit(u, nl, params.a, 1.0, R);
            (void)rep;
            const double order = observed_order(
                [&](const Field& w) { return energy_limit(w, nl, params.a, 1.0, R).total; }, u,
                dir, dot_quad(grad, dir), 1e-3);
            worst = std::min(worst, order);
        }
    }
    {  // P_ε + Q_ε on the box backend, cap comfortably above the samples
        const BoxGrid bg{8.0, 32};
        const RieszOperator R(3, 2.0, Grid{bg});
        const BoxSpectral ws(bg);
        const PotentialSpec pot = default_potential();
        const double eps = 0.5;
        const Field v_eps = sample_box(bg, [&](const Vec3& y) { return pot.V(y * eps); });
        const PenaltyWeights chi = make_penalty_weights(bg, pot.O, eps, 1.0);
        Nonlinearity capped = Nonlinearity::model(params);
        capped.set_truncation(capped.f(40.0) + 1.0, 40.0);
        Rng rng(12);
        for (int trial = 0; trial < 6; ++trial) {
            const Field u = random_box_bumps(bg, rng, true);
            const Field dir = random_box_bumps(bg, rng, false);
            const auto [rep, grad] = energy_gradient_semiclassical(u, capped, v_eps, chi, R, ws);
            (void)rep;
            const double order = observed_order(
                [&](const Field& w) {
                    return energy_semiclassical(w, capped, v_eps, chi, R, ws).total;
                },
                u, dir, dot_quad(grad, dir), 4e-3);
            worst = std::min(worst, order);
        }
        // Q_ε alone, forced into the active branch by a large amplitude.
        for (int trial = 0; trial < 3; ++trial) {
            Field u = random_box_bumps(bg, rng, true);
            for (double& v : u.values) v *= 20.0;
            const auto [qval, qgrad] = penalty_q(u, chi);
            if (!(qval > 0.0)) continue;
            const Field dir = random_box_bumps(bg, rng, false);
            const double order = observed_order(
                [&](const Field& w) { return penalty_q(w, chi).first; }, u, dir,
                dot_quad(qgrad, dir), 4e-3);
            worst = std::min(worst, order);
        }
    }
    detail << "worst observed order " << worst;
    return {worst >= 1.9, detail.str()};
}

std::pair<bool, std::string> check_riesz_ball(const VerifyOptions& opts) {
    const RadialGrid rg{4.0, 128};
    const RieszOperator R(3, 2.0, Grid{rg}, {opts.inject_kernel_sign_bug});
    const Field chi = sample_radial(rg, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
    const Field pot = R.apply(chi);
    double worst = 0.0;
    for (int i = 0; i < rg.n; ++i) {
        const double r = rg.node(i);
        const double exact = r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r);
        worst = std::max(worst, std::abs(pot.values[i] - exact) / exact);
    }
    std::ostringstream detail;
    detail << "max relative error " << worst << " at 128 nodes";
    return {worst <= 1e-3, detail.str()};
}

std::pair<bool, std::string> check_riesz_gaussian(const VerifyOptions& opts) {
    // (I_2 ∗ e^{-|x|²})(r) = sqrt(π) erf(r) / (4r), value 1/2 at the origin.
    auto exact = [](double r) {
        return r < 1e-12 ? 0.5 : std::sqrt(M_PI) * std::erf(r) / (4.0 * r);
    };
    std::ostringstream detail;
    const RadialGrid rg{12.0, 512};
    const RieszOperator Rr(3, 2.0, Grid{rg}, {opts.inject_kernel_sign_bug});
    const Field gr = sample_radial(rg, [](double r) { return std::exp(-r * r); });
    const Field vr = Rr.apply(gr);
    double worst_r = 0.0;
    for (int i = 0; i < rg.n; ++i)
        worst_r = std::max(worst_r, std::abs(vr.values[i] - exact(rg.node(i))));

    const BoxGrid bg{8.0, 64};
    const RieszOperator Rb(3, 2.0, Grid{bg}, {opts.inject_kernel_sign_bug});
    const Field gb = sample_box(bg, [](const Vec3& x) {
        return std::exp(-(x.x * x.x + x.y * x.y + x.z * x.z));
    });
    const Field vb = Rb.apply(gb);
    double worst_b = 0.0;
    const int c = bg.n_per_axis / 2;
    for (int i = 0; i < bg.n_per_axis; ++i) {
        const double r = std::abs(bg.coord(i));
        worst_b = std::max(worst_b, std::abs(vb.values[bg.index(i, c, c)] - exact(r)));
    }
    detail << "radial max abs error " << worst_r << ", box axis max abs error " << worst_b;
    return {worst_r <= 1e-4 && worst_b <= 2e-3, detail.str()};
}

std::pair<bool, std::string> check_riesz_positivity(const VerifyOptions& opts) {
    Rng rng(21);
    double worst = 0.0;
    const RadialGrid rg{12.0, 256};
    const RieszOperator Rr(3, 2.0, Grid{rg}, {opts.inject_kernel_sign_bug});
    const BoxGrid bg{8.0, 32};
    const RieszOperator Rb(3, 1.5, Grid{bg}, {opts.inject_kernel_sign_bug});
    for (int trial = 0; trial < 10; ++trial) {
        const Field gr = random_radial_bumps(rg, rng, true);
        const Field vr = Rr.apply(gr);
        for (double v : vr.values) worst = std::min(worst, v / max_value(gr));
        const Field gb = random_box_bumps(bg, rng, true);
        const Field vb = Rb.apply(gb);
        for (double v : vb.values) worst = std::min(worst, v / max_value(gb));
    }
    std::ostringstream detail;
    detail << "min output / max input = " << worst;
    return {worst >= -1e-12, detail.str()};
}

std::pair<bool, std::string> check_hls_bound(const VerifyOptions& opts) {
    Rng rng(31);
    std::uniform_real_distribution<double> alpha_draw(0.4, 2.6);
    double worst_ratio = 0.0;
    const RadialGrid rg{16.0, 256};
    const BoxGrid bg{8.0, 32};
    for (int trial = 0; trial < 100; ++trial) {
        const double alpha = alpha_draw(rng);
        const double bound_const = riesz_normalization(3, alpha) * hls_sharp_constant(3, alpha);
        const double p = 6.0 / (3.0 + alpha);  // 2N/(N+α)
        {
            const RieszOperator R(3, alpha, Grid{rg}, {opts.inject_kernel_sign_bug});
            const Field g = random_radial_bumps(rg, rng, true);
            const double lhs = R.pairing(g, g);
            const double nrm = lp_norm(g, p);
            worst_ratio = std::max(worst_ratio, lhs / (bound_const * nrm * nrm));
        }
        {
            const RieszOperator R(3, alpha, Grid{bg}, {opts.inject_kernel_sign_bug});
            const Field g = random_box_bumps(bg, rng, true);
            const double lhs = R.pairing(g, g);
            const double nrm = lp_norm(g, p);
            worst_ratio = std::max(worst_ratio, lhs / (bound_const * nrm * nrm));
        }
    }
    std::ostringstream detail;
    detail << "max pairing / (A C ||g||²) = " << worst_ratio << " over 200 fields";
    return {worst_ratio <= 1.0 + 1e-6, detail.str()};
}

std::pair<bool, std::string> check_sobolev_stability(const VerifyOptions&) {
    const SobolevConstants sc = sobolev_constants(3, 2.0);  // throws if unstable
    const double closed = 3.0 * M_PI * std::pow(std::tgamma(1.5) / std::tgamma(3.0), 2.0 / 3.0);
    const double rel = std::abs(sc.S - closed) / closed;
    std::ostringstream detail;
    detail << "S = " << sc.S << " vs closed form " << closed << " (rel " << rel << "), S_alpha = "
           << sc.S_alpha;
    return {rel <= 1e-6, detail.str()};
}

std::pair<bool, std::string> check_instanton_fixtures(const VerifyOptions&) {
    const InstantonFixtures fx = instanton_fixtures({0.4, 0.2, 0.1, 0.05});
    std::ostringstream detail;
    detail << "exponents: kinetic " << fx.kinetic_exponent << ", mass " << fx.mass_exponent
           << ", critical " << fx.critical_exponent;
    const bool pass = std::abs(fx.kinetic_exponent - 1.0) <= 0.15 &&
                      std::abs(fx.mass_exponent - 1.0) <= 0.15 && fx.critical_exponent >= 2.5;
    return {pass, detail.str()};
}

std::pair<bool, std::string> check_nehari_idempotence(const VerifyOptions&) {
    const ProblemParams params;
    const Nonlinearity nl = Nonlinearity::model(params);
    const RadialGrid rg{12.0, 192};
    const RieszOperator R(3, 2.0, Grid{rg});
    Rng rng(41);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Field u = random_radial_bumps(rg, rng, true);
        const NehariResult first = nehari_project(u, nl, params.a, 1.0, R);
        const NehariResult second = nehari_project(first.scaled, nl, params.a, 1.0, R);
        worst = std::max(worst, std::abs(second.t_star - 1.0));
    }
    std::ostringstream detail;
    detail << "max |t* - 1| on re-projection = " << worst;
    return {worst <= 1e-10, detail.str()};
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
    Battery b;
    b.opts = opts;
    b.run("gradient-finite-difference", [&] { return check_gradient_fd(opts); });
    b.run("riesz-ball-indicator", [&] { return check_riesz_ball(opts); });
    b.run("riesz-gaussian", [&] { return check_riesz_gaussian(opts); });
    b.run("riesz-positivity", [&] { return check_riesz_positivity(opts); });
    b.run("hls-bound", [&] { return check_hls_bound(opts); });
    b.run("sobolev-stability", [&] { return check_sobolev_stability(opts); });
    b.run("instanton-fixtures", [&] { return check_instanton_fixtures(opts); });
    b.run("nehari-idempotence", [&] { return check_nehari_idempotence(opts); });
    return b.results;
}

}  // namespace choquard
