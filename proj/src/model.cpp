#include "choquard/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace choquard {

namespace {

[[noreturn]] void reject(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

void ProblemParams::validate() const {
    std::ostringstream os;
    if (N < 3) {
        os << "N must be an integer >= 3 (got N = " << N << ")";
        reject(os.str());
    }
    const double alpha_lo = std::max(0.0, N - 4.0);
    if (!(alpha > alpha_lo && alpha < N)) {
        os << "alpha must satisfy (N-4)_+ < alpha < N, i.e. alpha in (" << alpha_lo << ", " << N
           << ") (got alpha = " << alpha << ")";
        reject(os.str());
    }
    if (!(a > 0.0)) {
        os << "a must satisfy a > 0 (got a = " << a << ")";
        reject(os.str());
    }
    if (!(mu >= 0.0)) {
        os << "mu must satisfy mu >= 0 (got mu = " << mu << ")";
        reject(os.str());
    }
    if (mu > 0.0) {
        const double q_hi = (N + alpha) / (N - 2.0);
        if (!(q > 2.0 && q < q_hi)) {
            os << "q must satisfy 2 < q < (N+alpha)/(N-2) = " << q_hi << " (got q = " << q << ")";
            reject(os.str());
        }
        const double q_lo = std::max(1.0 + alpha / (N - 2.0), (N + alpha) / (2.0 * (N - 2.0)));
        if (!(q > q_lo)) {
            os << "q must satisfy q > max{1 + alpha/(N-2), (N+alpha)/(2(N-2))} = " << q_lo
               << " (got q = " << q << ")";
            reject(os.str());
        }
    }
}

namespace {

void require_alpha_range(int N, double alpha) {
    if (!(alpha > 0.0 && alpha < static_cast<double>(N))) {
        std::ostringstream os;
        os << "alpha must lie in (0, N) = (0, " << N << ") (got alpha = " << alpha << ")";
        throw std::domain_error(os.str());
    }
}

}  // namespace

double riesz_normalization(int N, double alpha) {
    require_alpha_range(N, alpha);
    // A_α = Γ((N-α)/2) / (Γ(α/2) π^{N/2} 2^α), via lgamma for stability near the poles.
    const double lg = std::lgamma((N - alpha) / 2.0) - std::lgamma(alpha / 2.0);
    return std::exp(lg - (N / 2.0) * std::log(M_PI) - alpha * std::log(2.0));
}

double hls_sharp_constant(int N, double alpha) {
    require_alpha_range(N, alpha);
    const double lg_ratio = std::lgamma(alpha / 2.0) - std::lgamma((N + alpha) / 2.0);
    const double lg_half = std::lgamma(N / 2.0) - std::lgamma(static_cast<double>(N));
    return std::exp(((N - alpha) / 2.0) * std::log(M_PI) + lg_ratio - (alpha / N) * lg_half);
}

double instanton(int N, double eps, double r) {
    const double nm2 = N - 2.0;
    const double amp = std::pow(N * nm2 * eps * eps, nm2 / 4.0);
    return amp / std::pow(eps * eps + r * r, nm2 / 2.0);
}

double cutoff_profile(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double ga = std::exp(-1.0 / (2.0 - s));
    const double gb = std::exp(-1.0 / (s - 1.0));
    return ga / (ga + gb);
}

double cutoff_profile_derivative(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double A = 2.0 - s, B = s - 1.0;
    const double ga = std::exp(-1.0 / A), gb = std::exp(-1.0 / B);
    const double dga = ga / (A * A);  // d/dt exp(-1/t) = exp(-1/t)/t²
    const double dgb = gb / (B * B);
    // φ = ga/(ga+gb) with dA/ds = -1, dB/ds = +1.
    return (-dga * (ga + gb) - ga * (-dga + dgb)) / ((ga + gb) * (ga + gb));
}

double cutoff_instanton(int N, double eps, double r) {
    const double phi = cutoff_profile(r);
    return phi == 0.0 ? 0.0 : phi * instanton(N, eps, r);
}

Nonlinearity Nonlinearity::model(const ProblemParams& p) {
    Nonlinearity nl;
    nl.terms_.push_back({1.0, p.critical_p() + 1.0});
    if (p.mu > 0.0) nl.terms_.push_back({p.mu, p.q});
    return nl;
}

Nonlinearity Nonlinearity::pure_critical(const ProblemParams& p) {
    Nonlinearity nl;
    nl.terms_.push_back({1.0, p.critical_p() + 1.0});
    return nl;
}

Nonlinearity Nonlinearity::pure_power(double exponent) {
    if (!(exponent > 1.0)) throw std::invalid_argument("pure_power exponent must exceed 1");
    Nonlinearity nl;
    nl.terms_.push_back({1.0, exponent});
    return nl;
}

double Nonlinearity::f(double t) const {
    if (t <= 0.0) return 0.0;
    double v = 0.0;
    for (const Term& tm : terms_) v += tm.coef * std::pow(t, tm.exponent - 1.0);
    return v;
}

double Nonlinearity::F(double t) const {
    if (t <= 0.0) return 0.0;
    double v = 0.0;
    for (const Term& tm : terms_) v += tm.coef / tm.exponent * std::pow(t, tm.exponent);
    return v;
}

double Nonlinearity::f_truncated(double t) const {
    if (!cap_) throw std::invalid_argument("truncated evaluation requested but no cap configured");
    if (t <= 0.0) return 0.0;
    return std::min(f(t), cap_->k);
}

double Nonlinearity::F_truncated(double t) const {
    if (!cap_) throw std::invalid_argument("truncated evaluation requested but no cap configured");
    if (t <= 0.0) return 0.0;
    if (t <= cap_->t_star) return F(t);
    return F(cap_->t_star) + cap_->k * (t - cap_->t_star);
}

std::pair<double, double> Nonlinearity::eval(double t, bool truncated) const {
    if (truncated) return {f_truncated(t), F_truncated(t)};
    return {f(t), F(t)};
}

void Nonlinearity::set_truncation(double k, double kappa) {
    if (!(k > 0.0) || !(kappa > 0.0))
        throw std::invalid_argument("truncation requires k > 0 and kappa > 0");
    if (!(k > f(kappa)))
        throw std::invalid_argument("truncation level k must exceed max of f on [0, kappa]");
    // f is strictly increasing on t > 0 (all exponents exceed 1): bracket then bisect f(t) = k.
    double lo = kappa, hi = kappa;
    while (f(hi) < k) hi *= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < k ? lo : hi) = mid;
    }
    cap_ = Cap{k, kappa, 0.5 * (lo + hi)};
}

double Nonlinearity::cap_level() const {
    if (!cap_) throw std::invalid_argument("no cap configured");
    return cap_->k;
}

double Nonlinearity::cap_kappa() const {
    if (!cap_) throw std::invalid_argument("no cap configured");
    return cap_->kappa;
}

double Nonlinearity::cap_onset() const {
    if (!cap_) throw std::invalid_argument("no cap configured");
    return cap_->t_star;
}

}  // namespace choquard
