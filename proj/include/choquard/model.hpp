#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace choquard {

/// Static parameters of the limit equation -Δu + a u = (I_α ∗ F(u)) f(u).
///
/// Admissible ranges (checked by validate()):
///   N ≥ 3,  (N-4)_+ < α < N,
///   2 < q < (N+α)/(N-2),  q > max{1 + α/(N-2), (N+α)/(2(N-2))},
///   a > 0,  μ ≥ 0 (μ = 0 is the pure-critical nonexistence probe).
struct ProblemParams {
    int N = 3;
    double alpha = 2.0;
    double mu = 10.0;
    double q = 4.0;
    double a = 1.0;

    /// Critical exponent p = (2+α)/(N-2) of f; F grows like t^{p+1}.
    double critical_p() const { return (2.0 + alpha) / (N - 2.0); }

    /// Throws std::invalid_argument naming the violated inequality.
    void validate() const;
};

double riesz_normalization(int N, double alpha);  // A_α
double hls_sharp_constant(int N, double alpha);   // 𝒞_α

/// Bubble U_ε(x) = (N(N-2)ε²)^{(N-2)/4} / (ε² + |x|²)^{(N-2)/2}, ε = 1 gives U.
double instanton(int N, double eps, double r);

/// Smooth transition profile: 1 on [0,1], 0 on [2,∞), exp-based bump on (1,2).
double cutoff_profile(double s);
double cutoff_profile_derivative(double s);

/// ψ_ε(x) = φ(|x|) U_ε(x) with the profile above.
double cutoff_instanton(int N, double eps, double r);

/// Nonlinearity as a sum of positive-part power terms,
///   f(t) = Σ c_i t_+^{e_i - 1},   F(t) = Σ (c_i/e_i) t_+^{e_i},
/// with an optional flat cap f_k = min{f, k} (primitive F_k continuous).
class Nonlinearity {
  public:
    struct Term {
        double coef;
        double exponent;  // exponent of F's power; f carries exponent-1
    };

    /// Model instance f(t) = t^{(2+α)/(N-2)} + μ t^{q-1}; drops the μ term when μ = 0.
    static Nonlinearity model(const ProblemParams& p);
    /// Pure critical power (the nonexistence probe).
    static Nonlinearity pure_critical(const ProblemParams& p);
    /// F(t) = t^e / e; scaling-algebra test hook.
    static Nonlinearity pure_power(double exponent);

    double f(double t) const;
    double F(double t) const;
    double f_truncated(double t) const;
    double F_truncated(double t) const;

    /// (f, F) or (f_k, F_k); throws std::invalid_argument when truncated
    /// evaluation is requested without a configured cap.
    std::pair<double, double> eval(double t, bool truncated) const;

    /// Cap f at level k; kappa is the reference bound the cap must clear
    /// (requires k > f(kappa)). Computes t* with f(t*) = k.
    void set_truncation(double k, double kappa);
    bool has_truncation() const { return cap_.has_value(); }
    double cap_level() const;
    double cap_kappa() const;
    /// Threshold below which f_k ≡ f.
    double cap_onset() const;

    const std::vector<Term>& terms() const { return terms_; }

  private:
    struct Cap {
        double k;
        double kappa;
        double t_star;  // f(t_star) = k
    };
    std::vector<Term> terms_;
    std::optional<Cap> cap_;
};

}  // namespace choquard
