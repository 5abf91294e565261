#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/potential.hpp"
#include "choquard/riesz.hpp"

using namespace choquard;

namespace {

Field radial_bumps(const RadialGrid& g, std::mt19937_64& rng, bool nonnegative) {
    std::uniform_real_distribution<double> cd(0.0, g.r_max / 4.0), wd(0.4, 1.2), ad(0.2, 1.0);
    std::uniform_real_distribution<double> sd(-1.0, 1.0);
    struct B {
        double a, c, w;
    } b1{ad(rng), cd(rng), wd(rng)}, b2{ad(rng), cd(rng), wd(rng)};
    if (!nonnegative && sd(rng) < 0) b2.a = -b2.a;
    return sample_radial(g, [=](double r) {
        return b1.a * std::exp(-(r - b1.c) * (r - b1.c) / (b1.w * b1.w)) +
               b2.a * std::exp(-(r - b2.c) * (r - b2.c) / (b2.w * b2.w));
    });
}

Field box_bumps(const BoxGrid& g, std::mt19937_64& rng, bool nonnegative) {
    std::uniform_real_distribution<double> cd(-g.L / 4.0, g.L / 4.0), wd(0.5, 1.4), ad(0.2, 1.0);
    std::uniform_real_distribution<double> sd(-1.0, 1.0);
    const Vec3 c1{cd(rng), cd(rng), cd(rng)}, c2{cd(rng), cd(rng), cd(rng)};
    const double w1 = wd(rng), w2 = wd(rng);
    double a1 = ad(rng), a2 = ad(rng);
    if (!nonnegative && sd(rng) < 0) a2 = -a2;
    return sample_box(g, [=](const Vec3& x) {
        const Vec3 d1 = x - c1, d2 = x - c2;
        return a1 * std::exp(-(d1.x * d1.x + d1.y * d1.y + d1.z * d1.z) / (w1 * w1)) +
               a2 * std::exp(-(d2.x * d2.x + d2.y * d2.y + d2.z * d2.z) / (w2 * w2));
    });
}

// Richardson order of the central quotient against the reported directional derivative.
double fd_order(const std::function<double(const Field&)>& energy, const Field& u,
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

}  // namespace

TEST_CASE("zero field has zero energy and gradient") {
    const ProblemParams p;
    const Nonlinearity nl = Nonlinearity::model(p);
    const RadialGrid rg{10.0, 128};
    const RieszOperator R(3, 2.0, Grid{rg});
    const Field z = make_field(Grid{rg});
    const EnergyReport rep = energy_limit(z, nl, p.a, 1.0, R);
    CHECK(rep.total == 0.0);
    CHECK(rep.kinetic == 0.0);
    CHECK(rep.mass_term == 0.0);
    CHECK(rep.nonlocal == 0.0);
    CHECK(rep.penalty == 0.0);
    const Field g = gradient_limit(z, nl, p.a, 1.0, R);
    for (double v : g.values) CHECK(v == 0.0);
}

TEST_CASE("report identity holds exactly as assembled") {
    const ProblemParams p;
    const Nonlinearity nl = Nonlinearity::model(p);
    const RadialGrid rg{10.0, 128};
    const RieszOperator R(3, 2.0, Grid{rg});
    std::mt19937_64 rng(17);
    for (double lambda : {0.5, 0.75, 1.0}) {
        const Field u = radial_bumps(rg, rng, true);
        const EnergyReport rep = energy_limit(u, nl, p.a, lambda, R);
        CHECK(rep.total == EnergyReport::combine(rep.kinetic, rep.mass_term, rep.nonlocal,
                                                 rep.penalty, rep.lambda));
        CHECK(rep.lambda == lambda);
    }
}

TEST_CASE("lambda domain") {
    const ProblemParams p;
    const Nonlinearity nl = Nonlinearity::model(p);
    const RadialGrid rg{8.0, 64};
    const RieszOperator R(3, 2.0, Grid{rg});
    const Field u = make_field(Grid{rg});
    CHECK_THROWS_AS(energy_limit(u, nl, p.a, 0.4, R), std::domain_error);
    CHECK_THROWS_AS(energy_limit(u, nl, p.a, 1.1, R), std::domain_error);
    CHECK_THROWS_AS(gradient_limit(u, nl, p.a, 0.2, R), std::domain_error);
}

TEST_CASE("pure-critical ray has the two-term homogeneous shape") {
    ProblemParams p;
    p.mu = 0.0;  // F(u) = u^5/5
    const Nonlinearity nl = Nonlinearity::model(p);
    const RadialGrid rg{10.0, 256};
    const RieszOperator R(3, 2.0, Grid{rg});
    std::mt19937_64 rng(23);
    const Field u = radial_bumps(rg, rng, true);
    const EnergyReport base = energy_limit(u, nl, p.a, 1.0, R);
    for (double t : {0.5, 1.5, 2.0}) {
        Field tu = u;
        for (double& v : tu.values) v *= t;
        const EnergyReport rep = energy_limit(tu, nl, p.a, 1.0, R);
        CHECK(rep.kinetic == doctest::Approx(t * t * base.kinetic).epsilon(1e-12));
        CHECK(rep.mass_term == doctest::Approx(t * t * base.mass_term).epsilon(1e-12));
        // 2(N+alpha)/(N-2) = 10
        CHECK(rep.nonlocal == doctest::Approx(std::pow(t, 10.0) * base.nonlocal).epsilon(1e-12));
    }
}

TEST_CASE("limit gradient matches finite differences at second order") {
    const ProblemParams p;
    const Nonlinearity nl = Nonlinearity::model(p);
    std::mt19937_64 rng(31);
    {
        const RadialGrid rg{12.0, 192};
        const RieszOperator R(3, 2.0, Grid{rg});
        for (double lambda : {0.5, 1.0}) {
            for (int trial = 0; trial < 4; ++trial) {
                const Field u = radial_bumps(rg, rng, true);
                const Field dir = radial_bumps(rg, rng, false);
                const auto [rep, grad] = energy_gradient_limit(u, nl, p.a, lambda, R);
                (void)rep;
                const double order = fd_order(
                    [&](const Field& w) { return energy_limit(w, nl, p.a, lambda, R).total; }, u,
                    dir, dot_quad(grad, dir), 4e-3);
                CHECK(order >= 1.9);
            }
        }
    }
    {
        const BoxGrid bg{8.0, 32};
        const RieszOperator R(3, 2.0, Grid{bg});
        const BoxSpectral ws(bg);
        for (int trial = 0; trial < 4; ++trial) {
            const Field u = box_bumps(bg, rng, true);
            const Field dir = box_bumps(bg, rng, false);
            const auto [rep, grad] = energy_gradient_limit(u, nl, p.a, 1.0, R, &ws);
            (void)rep;
            const double order = fd_order(
                [&](const Field& w) { return energy_limit(w, nl, p.a, 1.0, R, &ws).total; }, u,
                dir, dot_quad(grad, dir), 4e-3);
            CHECK(order >= 1.9);
        }
    }
}

TEST_CASE("penalty value, gradient and dichotomy") {
    const BoxGrid bg{8.0, 32};
    const PotentialSpec pot = default_potential();
    SemiclassicalConfig cfg;
    cfg.eps = 0.5;
    cfg.nu = 1.0;

    // supported inside O_eps: zero penalty and zero gradient
    const Field inside = sample_box(bg, [](const Vec3& x) {
        return std::exp(-4.0 * x.norm() * x.norm());
    });
    const auto [v0, g0] = penalty_q(inside, cfg, pot.O);
    CHECK(v0 == 0.0);
    for (double v : g0.values) CHECK(v == 0.0);

    // mass outside pushed above the threshold: value = excess^2, gradient nonzero
    const Field outside = sample_box(bg, [](const Vec3& x) {
        const double d = x.norm() - 5.0;
        return 2.0 * std::exp(-d * d);
    });
    const PenaltyWeights chi = make_penalty_weights(bg, pot.O, cfg.eps, cfg.nu);
    double mass = 0.0;
    for (std::size_t i = 0; i < outside.values.size(); ++i)
        mass += chi.chi.values[i] * outside.values[i] * outside.values[i];
    mass *= bg.cell_volume();
    REQUIRE(mass > 1.0);
    const auto [v1, g1] = penalty_q(outside, cfg, pot.O);
    CHECK(v1 == doctest::Approx((mass - 1.0) * (mass - 1.0)).epsilon(1e-12));
    CHECK(norm_l2(g1) > 0.0);

    // dichotomy: value = 0 iff constrained mass <= 1, exercised on both sides
    for (double scale : {0.2, 0.9, 1.1, 3.0}) {
        Field u = outside;
        for (double& v : u.values) v *= scale;
        const auto [vv, gg] = penalty_q(u, cfg, pot.O);
        (void)gg;
        const double m2 = scale * scale * mass;
        CHECK((vv == 0.0) == (m2 <= 1.0));
    }

    // finite-difference check of the penalty gradient in the active branch
    std::mt19937_64 rng(41);
    const Field dir = box_bumps(bg, rng, false);
    const double order = fd_order([&](const Field& w) { return penalty_q(w, chi).first; },
                                  outside, dir, dot_quad(g1, dir), 4e-3);
    CHECK(order >= 1.9);
}

TEST_CASE("semiclassical energy gradient matches finite differences") {
    const ProblemParams p;
    Nonlinearity nl = Nonlinearity::model(p);
    nl.set_truncation(nl.f(50.0) + 1.0, 50.0);
    const BoxGrid bg{8.0, 32};
    const RieszOperator R(3, 2.0, Grid{bg});
    const BoxSpectral ws(bg);
    const PotentialSpec pot = default_potential();
    const double eps = 0.5;
    const Field v_eps = sample_box(bg, [&](const Vec3& y) { return pot.V(y * eps); });
    const PenaltyWeights chi = make_penalty_weights(bg, pot.O, eps, 1.0);
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 4; ++trial) {
        Field u = box_bumps(bg, rng, true);
        for (double& v : u.values) v *= 3.0;  // activates the penalty for some draws
        const Field dir = box_bumps(bg, rng, false);
        const auto [rep, grad] = energy_gradient_semiclassical(u, nl, v_eps, chi, R, ws);
        CHECK(rep.total == EnergyReport::combine(rep.kinetic, rep.mass_term, rep.nonlocal,
                                                 rep.penalty, rep.lambda));
        const double order = fd_order(
            [&](const Field& w) { return energy_semiclassical(w, nl, v_eps, chi, R, ws).total; },
            u, dir, dot_quad(grad, dir), 4e-3);
        CHECK(order >= 1.9);
    }
}

TEST_CASE("constant potential with disabled penalty coincides with the limit energy") {
    const ProblemParams p;
    Nonlinearity nl = Nonlinearity::model(p);
    nl.set_truncation(nl.f(2.0) + 1.0, 2.0);  // active cap: the coincidence must still hold
    const BoxGrid bg{8.0, 32};
    const RieszOperator R(3, 2.0, Grid{bg});
    const BoxSpectral ws(bg);
    const Field v_const = sample_box(bg, [&](const Vec3&) { return p.a; });
    const PenaltyWeights chi = make_penalty_weights(bg, Domain{}, 0.5, 1.0, /*disabled=*/true);
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 3; ++trial) {
        Field u = box_bumps(bg, rng, true);
        for (double& v : u.values) v *= 4.0;  // pushes part of the field beyond the cap
        const EnergyReport sc = energy_semiclassical(u, nl, v_const, chi, R, ws);
        const EnergyReport lim = energy_limit(u, nl, p.a, 1.0, R, &ws, /*truncated=*/true);
        CHECK(sc.total == doctest::Approx(lim.total).epsilon(1e-12));
        CHECK(sc.penalty == 0.0);
    }
}

TEST_CASE("dilation derivative equals the Pohozaev functional") {
    // d/dsigma I_lambda(u(./sigma)) at sigma = 1 is
    // (N-2)/2 K + N/2 a M - (N+alpha)/2 lambda NL; the dilated family of a
    // closed-form bump is sampled exactly.
    const ProblemParams p;
    const Nonlinearity nl = Nonlinearity::model(p);
    const RadialGrid rg{16.0, 2048};
    const RieszOperator R(3, 2.0, Grid{rg});
    auto profile = [](double r) {
        return 0.8 * std::exp(-r * r) + 0.3 * std::exp(-(r - 1.2) * (r - 1.2) / 0.5);
    };
    auto dilated = [&](double sigma) {
        return sample_radial(rg, [&](double r) { return profile(r / sigma); });
    };
    for (double lambda : {0.5, 1.0}) {
        const EnergyReport rep = energy_limit(dilated(1.0), nl, p.a, lambda, R);
        const double pohozaev = 0.5 * (p.N - 2.0) * rep.kinetic + 0.5 * p.N * rep.mass_term -
                                0.5 * (p.N + p.alpha) * lambda * rep.nonlocal;
        const double h = 1e-4;
        const double fd = (energy_limit(dilated(1.0 + h), nl, p.a, lambda, R).total -
                           energy_limit(dilated(1.0 - h), nl, p.a, lambda, R).total) /
                          (2.0 * h);
        CHECK(fd == doctest::Approx(pohozaev).epsilon(1e-5));
        CHECK(std::abs(pohozaev) > 1e-3);  // a generic bump is not a critical point
    }
}

TEST_CASE("box covering check names the required size") {
    const PotentialSpec pot = default_potential();
    const BoxGrid small{4.0, 32};
    CHECK_THROWS_WITH_AS(require_box_covers(small, pot.O, 0.25, pot.m, 5.0),
                         doctest::Contains("box too small"), std::invalid_argument);
    const BoxGrid big{12.0, 32};
    CHECK_NOTHROW(require_box_covers(big, pot.O, 0.25, pot.m, 5.0));
    CHECK_NOTHROW(require_box_covers(small, Domain{Domain::Kind::everything, {}, 0.0}, 0.25,
                                     pot.m, 5.0));
}
