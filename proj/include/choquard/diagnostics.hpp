#pragma once

#include <vector>

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/potential.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"

namespace choquard {

/// Relative Pohozaev residual of a field (the report overload lives in energy.hpp):
/// |(N-2)/2 ∫|∇u|² + N/2 a∫u² − (N+α)/2 λ ∫(I_α∗F(u))F(u)| over 1 + positive part.
double pohozaev_residual_field(const Field& u, const ProblemParams& params,
                               const Nonlinearity& nl, double lambda, const RieszOperator& R,
                               const BoxSpectral* ws = nullptr);

struct SobolevConstants {
    double S;        // gradient/critical-norm quotient of the bubble
    double S_alpha;  // S / (A_α 𝒞_α)^{(N-2)/(N+α)}
};
/// S by radial quadrature of the bubble's Rayleigh quotient at two
/// resolutions (throws when they disagree beyond 1e-4 relative).
SobolevConstants sobolev_constants(int N, double alpha, int resolution = 4000);

/// Strict non-compactness level
/// (2+α)/(2(N+α)) ((N+α)/(N-2))^{(N-2)/(2+α)} λ^{(2-N)/(2+α)} S_α^{(N+α)/(2+α)}.
double mp_threshold(double lambda, int N, double alpha);

/// ∫|∇ψ_ε|², ∫ψ_ε^{2N/(N-2)}, ∫ψ_ε² for the cut-off bubble family with the
/// fitted ε-exponents of their deviations (N = 3 laws: ε, ε³, ε).
struct InstantonFixtures {
    struct Row {
        double eps;
        double kinetic;
        double critical_norm;
        double mass;
    };
    std::vector<Row> rows;
    double s_pow;  // S^{N/2}
    double kinetic_exponent = 0.0;
    double mass_exponent = 0.0;
    double critical_exponent = 0.0;
    double kinetic_fit_residual = 0.0;
    double mass_fit_residual = 0.0;
    double critical_fit_residual = 0.0;
};
InstantonFixtures instanton_fixtures(const std::vector<double>& eps_list, int N = 3);

struct DecayFit {
    double c = 0.0;  // exponential rate
    double C = 0.0;  // amplitude
    double r_lo = 0.0, r_hi = 0.0;
    double residual = 0.0;  // RMS of the log-linear fit
    int points = 0;
};
/// Least-squares fit of log u against |x − peak| on the window where
/// u/max ∈ (1e-8, 1e-2); throws when fewer than 20 nodes fall inside.
DecayFit decay_fit(const Field& u, const Vec3& peak);

struct ConcentrationMetrics {
    double dist_to_M = 0.0;
    double profile_gap = 0.0;
};
/// Peak distance to the minimizer set (original coordinates) and the L² gap
/// between the recentred rescaled profile and the limit ground state, after
/// an integer-grid cross-correlation alignment.
ConcentrationMetrics concentration_metrics(const SolveResult& result, const PotentialSpec& pot,
                                           const Field& limit_reference);

}  // namespace choquard
