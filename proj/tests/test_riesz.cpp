#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/riesz.hpp"

using namespace choquard;

namespace {

// Newtonian potential of the unit-ball indicator (N = 3, α = 2).
double ball_potential(double r) { return r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r); }

// (I_2 ∗ e^{-|x|²})(r), from the 1D radial integral.
double gauss_potential(double r) {
    return r < 1e-12 ? 0.5 : std::sqrt(M_PI) * std::erf(r) / (4.0 * r);
}

double ball_max_rel_error(int n) {
    const RadialGrid g{4.0, n};
    const RieszOperator R(3, 2.0, Grid{g});
    const Field chi = sample_radial(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
    const Field pot = R.apply(chi);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(pot.values[i] - ball_potential(g.node(i))) /
                                    ball_potential(g.node(i)));
    return worst;
}

Field random_box_bumps(const BoxGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> center(-g.L / 4.0, g.L / 4.0);
    std::uniform_real_distribution<double> width(0.5, 1.4);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    const Vec3 c1{center(rng), center(rng), center(rng)};
    const Vec3 c2{center(rng), center(rng), center(rng)};
    const double w1 = width(rng), w2 = width(rng), a1 = amp(rng), a2 = amp(rng);
    return sample_box(g, [&](const Vec3& x) {
        const Vec3 d1 = x - c1, d2 = x - c2;
        return a1 * std::exp(-(d1.x * d1.x + d1.y * d1.y + d1.z * d1.z) / (w1 * w1)) +
               a2 * std::exp(-(d2.x * d2.x + d2.y * d2.y + d2.z * d2.z) / (w2 * w2));
    });
}

}  // namespace

TEST_CASE("radial ball-indicator oracle at 128 nodes") {
    CHECK(ball_max_rel_error(128) <= 1e-3);
}

TEST_CASE("halving the spacing improves the ball potential at the origin") {
    const auto origin_error = [](int n) {
        const RadialGrid g{4.0, n};
        const RieszOperator R(3, 2.0, Grid{g});
        const Field chi = sample_radial(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
        const Field pot = R.apply(chi);
        return std::abs(pot.values[0] - ball_potential(g.node(0)));
    };
    CHECK(origin_error(128) >= 2.0 * origin_error(256));
}

TEST_CASE("radial Gaussian oracle") {
    const RadialGrid g{12.0, 512};
    const RieszOperator R(3, 2.0, Grid{g});
    const Field gauss = sample_radial(g, [](double r) { return std::exp(-r * r); });
    const Field pot = R.apply(gauss);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(pot.values[i] - gauss_potential(g.node(i))));
    CHECK(worst <= 1e-4);
    CHECK(pot.values[0] == doctest::Approx(gauss_potential(g.node(0))).epsilon(1e-4));
}

TEST_CASE("box ball and Gaussian oracles") {
    const BoxGrid g{4.0, 64};
    const RieszOperator R(3, 2.0, Grid{g});
    const Field chi = sample_box(g, [](const Vec3& x) { return x.norm() <= 1.0 ? 1.0 : 0.0; });
    const Field pot = R.apply(chi);
    const int c = g.n_per_axis / 2;
    // indicator data is rough: first-order accuracy at the sphere, h = 0.125 here
    CHECK(pot.values[g.index(c, c, c)] == doctest::Approx(0.5).epsilon(1e-2));

    const Field gauss = sample_box(g, [](const Vec3& x) {
        const double r2 = x.x * x.x + x.y * x.y + x.z * x.z;
        return std::exp(-r2);
    });
    const Field gpot = R.apply(gauss);
    double worst = 0.0;
    for (int i = 0; i < g.n_per_axis; ++i)
        worst = std::max(worst, std::abs(gpot.values[g.index(i, c, c)] -
                                         gauss_potential(std::abs(g.coord(i)))));
    CHECK(worst <= 2e-3);
}

TEST_CASE("zero input gives zero output") {
    for (const Grid grid : {Grid{RadialGrid{8.0, 64}}, Grid{BoxGrid{4.0, 16}}}) {
        const RieszOperator R(3, 1.7, grid);
        const Field z = make_field(grid);
        const Field out = R.apply(z);
        for (double v : out.values) CHECK(v == 0.0);
        CHECK(R.pairing(z, z) == 0.0);
    }
}

TEST_CASE("box pairing is symmetric to spectral precision") {
    const BoxGrid g{6.0, 32};
    const RieszOperator R(3, 2.0, Grid{g});
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const Field a = random_box_bumps(g, rng);
        const Field b = random_box_bumps(g, rng);
        const double ab = R.pairing(a, b), ba = R.pairing(b, a);
        CHECK(std::abs(ab - ba) <= 1e-10 * (1.0 + std::abs(ab)));
    }
}

TEST_CASE("radial pairing is symmetric by construction") {
    for (double alpha : {0.8, 1.0, 1.6, 2.0, 2.5}) {
        const RadialGrid g{10.0, 128};
        const RieszOperator R(3, alpha, Grid{g});
        const Field a = sample_radial(g, [](double r) { return std::exp(-r * r); });
        const Field b =
            sample_radial(g, [](double r) { return r * std::exp(-2.0 * (r - 1.0) * (r - 1.0)); });
        const double ab = R.pairing(a, b), ba = R.pairing(b, a);
        CHECK(std::abs(ab - ba) <= 1e-12 * (1.0 + std::abs(ab)));
    }
}

TEST_CASE("ball self-pairing against the 1D quadrature oracle") {
    // Independent oracle: ∫(I_2∗χ)χ = 4π ∫₀¹ (3-r²)/6 r² dr by Simpson (= 8π/15).
    const int m = 4000;
    double simpson = 0.0;
    auto f = [](double r) { return (3.0 - r * r) / 6.0 * 4.0 * M_PI * r * r; };
    for (int i = 0; i < m; ++i) {
        const double a = i / double(m), b = (i + 1) / double(m);
        simpson += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    CHECK(simpson == doctest::Approx(8.0 * M_PI / 15.0).epsilon(1e-10));

    const RadialGrid g{4.0, 512};
    const RieszOperator R(3, 2.0, Grid{g});
    const Field chi = sample_radial(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
    CHECK(R.pairing(chi, chi) == doctest::Approx(simpson).epsilon(2e-3));

    const BoxGrid bg{3.0, 64};
    const RieszOperator Rb(3, 2.0, Grid{bg});
    const Field chib = sample_box(bg, [](const Vec3& x) { return x.norm() <= 1.0 ? 1.0 : 0.0; });
    CHECK(Rb.pairing(chib, chib) == doctest::Approx(simpson).epsilon(2e-2));
}

TEST_CASE("positivity of the convolution") {
    const RadialGrid g{10.0, 256};
    for (double alpha : {0.6, 1.0, 2.0, 2.8}) {
        const RieszOperator R(3, alpha, Grid{g});
        const Field bump = sample_radial(g, [](double r) {
            return std::exp(-(r - 1.0) * (r - 1.0) / 0.25);
        });
        const Field out = R.apply(bump);
        for (double v : out.values) CHECK(v >= -1e-12 * max_value(bump));
    }
}

TEST_CASE("backend agreement on a radially symmetric Gaussian") {
    const RadialGrid rg{12.0, 1024};
    const BoxGrid bg{6.0, 64};
    const RieszOperator Rr(3, 2.0, Grid{rg});
    const RieszOperator Rb(3, 2.0, Grid{bg});
    const Field fr = sample_radial(rg, [](double r) { return std::exp(-r * r); });
    const Field fb = sample_box(bg, [](const Vec3& x) {
        const double r = x.norm();
        return std::exp(-r * r);
    });
    const Field vr = Rr.apply(fr);
    const Field vb = Rb.apply(fb);
    const int c = bg.n_per_axis / 2;
    for (int i = c; i < bg.n_per_axis; ++i) {
        const double r = bg.coord(i);
        if (r > 4.0) break;
        const double radial_val = radial_value_at(vr, std::max(r, rg.node(0)));
        const double box_val = vb.values[bg.index(i, c, c)];
        CHECK(box_val == doctest::Approx(radial_val).epsilon(1e-3));
    }
}

TEST_CASE("alpha branches join continuously") {
    const RadialGrid g{8.0, 128};
    const Field bump = sample_radial(g, [](double r) { return std::exp(-r * r); });
    // the log kernel at α = 1 is the limit of the power bracket
    const Field at1 = RieszOperator(3, 1.0, Grid{g}).apply(bump);
    const Field near1 = RieszOperator(3, 1.0 + 1e-7, Grid{g}).apply(bump);
    for (int i = 0; i < g.n; ++i)
        CHECK(at1.values[i] == doctest::Approx(near1.values[i]).epsilon(1e-5));
    // the α = 2 prefix-sum path agrees with the dense-matrix path
    const Field at2 = RieszOperator(3, 2.0, Grid{g}).apply(bump);
    const Field near2 = RieszOperator(3, 2.0 - 1e-9, Grid{g}).apply(bump);
    for (int i = 0; i < g.n; ++i)
        CHECK(at2.values[i] == doctest::Approx(near2.values[i]).epsilon(1e-6));
}

TEST_CASE("hls bound on random bumps") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> alpha_draw(0.5, 2.5);
    const RadialGrid g{16.0, 256};
    for (int trial = 0; trial < 20; ++trial) {
        const double alpha = alpha_draw(rng);
        const RieszOperator R(3, alpha, Grid{g});
        std::uniform_real_distribution<double> cd(0.0, 3.0), wd(0.4, 1.2), ad(0.2, 1.0);
        const double c1 = cd(rng), w1 = wd(rng), a1 = ad(rng);
        const Field f = sample_radial(g, [&](double r) {
            return a1 * std::exp(-(r - c1) * (r - c1) / (w1 * w1));
        });
        const double lhs = R.pairing(f, f);
        const double p = 6.0 / (3.0 + alpha);
        const double rhs = riesz_normalization(3, alpha) * hls_sharp_constant(3, alpha) *
                           std::pow(lp_norm(f, p), 2.0);
        CHECK(lhs <= rhs * (1.0 + 1e-6));
    }
}

TEST_CASE("input validation") {
    const RadialGrid g{8.0, 64};
    CHECK_THROWS_WITH_AS(RieszOperator(4, 2.0, Grid{g}), doctest::Contains("unsupported backend"),
                         std::invalid_argument);
    CHECK_THROWS_AS(RieszOperator(3, 3.2, Grid{g}), std::domain_error);
    const RieszOperator R(3, 2.0, Grid{g});
    Field wrong = make_field(Grid{RadialGrid{8.0, 128}});
    CHECK_THROWS_AS(R.apply(wrong), std::invalid_argument);
    Field bad = make_field(Grid{g});
    bad.values[3] = std::nan("");
    CHECK_THROWS_WITH_AS(R.apply(bad), doctest::Contains("non-finite"), std::invalid_argument);
    Field a = make_field(Grid{g});
    CHECK_THROWS_AS(R.pairing(a, wrong), std::invalid_argument);
}
