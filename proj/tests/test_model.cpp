#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "choquard/model.hpp"
#include "choquard/potential.hpp"

using namespace choquard;

TEST_CASE("riesz normalization closed forms") {
    // A_α = Γ((N-α)/2) / (Γ(α/2) π^{N/2} 2^α)
    CHECK(riesz_normalization(3, 2.0) == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-14));
    CHECK(riesz_normalization(5, 1.0) ==
          doctest::Approx(1.0 / (2.0 * std::pow(M_PI, 3))).epsilon(1e-14));
    // approaching the Γ pole at alpha → N stays finite and positive
    const double near = riesz_normalization(3, 3.0 - 1e-9);
    CHECK(near > 0.0);
    CHECK(std::isfinite(near));
    CHECK_THROWS_AS(riesz_normalization(3, 3.0), std::domain_error);
    CHECK_THROWS_AS(riesz_normalization(3, 0.0), std::domain_error);
    CHECK_THROWS_AS(riesz_normalization(3, -1.0), std::domain_error);
}

TEST_CASE("hls sharp constant closed forms") {
    CHECK(hls_sharp_constant(3, 2.0) == doctest::Approx(2.2940107035415990).epsilon(1e-12));
    CHECK(hls_sharp_constant(4, 2.0) ==
          doctest::Approx(M_PI / 2.0 * std::sqrt(6.0)).epsilon(1e-13));
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> nd(3, 8);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
        const int N = nd(rng);
        const double alpha = frac(rng) * N;
        CHECK(hls_sharp_constant(N, alpha) > 0.0);
    }
}

TEST_CASE("problem parameter validation") {
    ProblemParams ok;  // defaults N=3, alpha=2, mu=1, q=4, a=1
    CHECK_NOTHROW(ok.validate());

    ProblemParams bad = ok;
    bad.q = 3.0;  // violates q > max{1+alpha/(N-2), (N+alpha)/(2(N-2))} = 3
    CHECK_THROWS_WITH_AS(bad.validate(),
                         doctest::Contains("q must satisfy q > max{1 + alpha/(N-2)"),
                         std::invalid_argument);
    bad = ok;
    bad.q = 5.5;  // above (N+alpha)/(N-2) = 5
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("q must satisfy 2 < q"),
                         std::invalid_argument);
    bad = ok;
    bad.alpha = 3.5;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("alpha"), std::invalid_argument);
    bad = ok;
    bad.a = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.mu = -0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.mu = 0.0;  // the nonexistence probe stays expressible
    CHECK_NOTHROW(bad.validate());
    bad = ok;
    bad.N = 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("parameter validation agrees with the inequalities on random draws") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> nd(3, 7);
    std::uniform_real_distribution<double> ad(-1.0, 8.0);
    std::uniform_real_distribution<double> qd(0.0, 8.0);
    for (int i = 0; i < 500; ++i) {
        ProblemParams p;
        p.N = nd(rng);
        p.alpha = ad(rng);
        p.q = qd(rng);
        const bool alpha_ok = p.alpha > std::max(0.0, p.N - 4.0) && p.alpha < p.N;
        const bool q_ok = alpha_ok && p.q > 2.0 && p.q < (p.N + p.alpha) / (p.N - 2.0) &&
                          p.q > std::max(1.0 + p.alpha / (p.N - 2.0),
                                         (p.N + p.alpha) / (2.0 * (p.N - 2.0)));
        bool accepted = true;
        try {
            p.validate();
        } catch (const std::invalid_argument&) {
            accepted = false;
        }
        CHECK(accepted == (alpha_ok && q_ok));
    }
}

TEST_CASE("model nonlinearity values") {
    ProblemParams p;  // N=3, alpha=2 → f(t) = t^4 + mu t^{q-1}
    const Nonlinearity nl = Nonlinearity::model(p);
    auto [f1, F1] = nl.eval(1.0, false);
    CHECK(f1 == doctest::Approx(2.0));
    CHECK(F1 == doctest::Approx(0.45));  // 1/5 + 1/4
    auto [fm, Fm] = nl.eval(-3.0, false);
    CHECK(fm == 0.0);
    CHECK(Fm == 0.0);

    Nonlinearity capped = Nonlinearity::model(p);
    capped.set_truncation(1.5, 0.5);
    CHECK(capped.eval(1.0, true).first == doctest::Approx(1.5));  // min(2, 1.5)
    CHECK_THROWS_AS(nl.eval(1.0, true), std::invalid_argument);   // no cap configured
}

TEST_CASE("numerical derivative of F matches f") {
    ProblemParams p;
    const Nonlinearity nl = Nonlinearity::model(p);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> td(0.01, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double t = td(rng);
        const double h = 1e-5 * std::max(1.0, t);
        const double fd = (nl.F(t + h) - nl.F(t - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(nl.f(t)).epsilon(1e-7));
    }
}

TEST_CASE("capped nonlinearity sits below f and agrees where f <= k") {
    ProblemParams p;
    Nonlinearity nl = Nonlinearity::model(p);
    nl.set_truncation(5.0, 1.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> td(-1.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double t = td(rng);
        CHECK(nl.f_truncated(t) <= nl.f(t) + 1e-15);
        if (nl.f(t) <= 5.0) CHECK(nl.f_truncated(t) == doctest::Approx(nl.f(t)));
        // the primitive of f_k stays consistent with f_k
        if (t > 0.1) {
            const double h = 1e-6;
            const double fd = (nl.F_truncated(t + h) - nl.F_truncated(t - h)) / (2.0 * h);
            CHECK(fd == doctest::Approx(nl.f_truncated(t)).epsilon(1e-5));
        }
    }
    CHECK_THROWS_AS(nl.set_truncation(0.5, 1.0), std::invalid_argument);  // k below f(kappa)
}

TEST_CASE("instanton values and monotonicity") {
    CHECK(instanton(3, 1.0, 0.0) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
    double prev = instanton(3, 1.0, 0.0);
    for (double r = 0.25; r < 12.0; r += 0.25) {
        const double v = instanton(3, 1.0, r);
        CHECK(v < prev);
        prev = v;
    }
    for (int N : {3, 4, 5, 6})
        CHECK(instanton(N, 0.3, 500.0) < 0.2 * instanton(N, 0.3, 50.0));
    CHECK(cutoff_instanton(3, 0.3, 2.5) == 0.0);
    CHECK(cutoff_instanton(3, 0.3, 0.5) == doctest::Approx(instanton(3, 0.3, 0.5)));
}

TEST_CASE("cutoff profile is a smooth partition") {
    CHECK(cutoff_profile(0.3) == 1.0);
    CHECK(cutoff_profile(1.0) == 1.0);
    CHECK(cutoff_profile(2.0) == 0.0);
    CHECK(cutoff_profile(1.5) == doctest::Approx(0.5));
    for (double s = 1.05; s < 2.0; s += 0.05) {
        const double h = 1e-6;
        const double fd = (cutoff_profile(s + h) - cutoff_profile(s - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(cutoff_profile_derivative(s)).epsilon(1e-5));
    }
}

TEST_CASE("default potential realizes the well conditions") {
    const PotentialSpec pot = default_potential();
    CHECK(pot.V(Vec3{}) == doctest::Approx(1.0));
    CHECK(pot.m == 1.0);
    // (V2): boundary value 2 - exp(-9/4)
    const double boundary = pot.V(Vec3{1.5, 0.0, 0.0});
    CHECK(boundary == doctest::Approx(1.8946007754381357).epsilon(1e-12));
    CHECK(boundary > pot.m);
    CHECK_NOTHROW(pot.validate());
    // (V1): 2 - exp(-r²) >= 1 everywhere
    for (double r : {0.0, 0.5, 3.0, 10.0}) CHECK(pot.V(Vec3{r, 0, 0}) >= 1.0);
}
