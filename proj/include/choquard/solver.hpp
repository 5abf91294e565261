#pragma once

#include <optional>
#include <string>

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/potential.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

struct SolverConfig {
    double tol_grad = 1e-7;
    int max_iter = 2000;
    enum class StepRule { fixed, adaptive_backtracking };
    StepRule step_rule = StepRule::adaptive_backtracking;
    double fixed_step = 0.1;  // only for StepRule::fixed
    bool precondition = true;
    enum class SeedProfile { gaussian, instanton, file };
    SeedProfile seed_profile = SeedProfile::gaussian;

    void validate() const;
};

struct SolveResult {
    Field u;
    EnergyReport energy;
    // L² norm of the projected first variation: on the active set of the
    // u >= 0 constraint only components pointing out of it count.
    double grad_norm = 0.0;
    double pohozaev_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    Vec3 peak_position{};  // original coordinates for semiclassical solves
    double peak_value = 0.0;
    bool possible_nonexistence = false;
    bool penalty_active = false;
    bool truncation_active = false;
    double q_value = 0.0;
    std::vector<double> energy_trace;  // accepted-step energies, non-increasing
};

/// Solves (-Δ + a) u = g: spectral division on the box, tridiagonal solve of
/// the conservative radial operator (Dirichlet at r_max).
Field invert_shifted_laplacian(const Field& g, double a, const BoxSpectral* ws = nullptr);

struct NehariResult {
    double t_star = 1.0;
    Field scaled;
};

/// Scales u to the Nehari set of I_λ: the unique t* > 0 with
/// t²(∫|∇u|² + a u²) = λ ∫ (I_α∗F(t u)) f(t u) t u, by bracketing + bisection
/// to relative 1e-12. Power nonlinearities reduce the ray to a polynomial
/// (two Riesz applies); a capped f falls back to per-t evaluation when the
/// cap is reached along the ray.
NehariResult nehari_project(const Field& u, const Nonlinearity& nl, double a, double lambda,
                            const RieszOperator& R, const BoxSpectral* ws = nullptr,
                            bool truncated = false);

/// Same projection for P_ε, whose quadratic part carries ∫ V_ε u².
NehariResult nehari_project_semiclassical(const Field& u, const Nonlinearity& nl,
                                          const Field& v_eps, const RieszOperator& R,
                                          const BoxSpectral& ws);

/// Ground state of -Δu + au = (I_α∗F(u))f(u) by Nehari-projected
/// preconditioned descent. Never throws on non-convergence; collapse of the
/// iterate (vanishing norm or sub-2-cell peak) raises possible_nonexistence.
SolveResult ground_state_limit(const ProblemParams& params, const SolverConfig& cfg,
                               const Grid& grid, const Field* initial = nullptr);

/// Critical point of Γ_ε = P_ε + Q_ε started from the cut-off translate
/// U_ε^x of the limit ground state at x = first minimizer of V. The peak is
/// reported in original coordinates (ε × grid position).
SolveResult semiclassical_solve(const ProblemParams& params, const PotentialSpec& pot,
                                const SemiclassicalConfig& scfg, const SolverConfig& cfg,
                                const BoxGrid& grid, const Field& limit_ground_state);

}  // namespace choquard
