#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "choquard/grid.hpp"
#include "choquard/model.hpp"
#include "choquard/potential.hpp"
#include "choquard/riesz.hpp"

namespace choquard {

/// Semiclassical run parameters: scale ε, penalization exponent ν, truncation
/// pair (k, κ), and the reported tube radius d.
struct SemiclassicalConfig {
    double eps = 0.5;
    double nu = 1.0;
    double kappa = 0.0;        // 0 → derived from the reference ground state
    double k = 0.0;            // 0 → derived as f(κ) + 1
    double tube_radius = 0.0;  // reported, never enforced
    bool penalty_disabled = false;  // the ν → ∞ flag of the constant-V check
    double box_margin = 6.0;   // decay lengths between O_ε and the box edge
};

struct EnergyReport {
    double total = 0.0;
    double kinetic = 0.0;    // ∫ |∇u|²
    double mass_term = 0.0;  // ∫ c(x) u², c = a or V_ε
    double nonlocal = 0.0;   // ∫ (I_α ∗ F(u)) F(u)
    double penalty = 0.0;    // Q_ε, 0 when not applicable
    double lambda = 1.0;

    static double combine(double kin, double mass, double nonlocal, double penalty,
                          double lambda) {
        return 0.5 * kin + 0.5 * mass - 0.5 * lambda * nonlocal + penalty;
    }
};

/// FFT workspace for the periodic box: spectral -Δ and (-Δ + a)^{-1}.
/// Immutable after construction; work arrays are per call.
class BoxSpectral {
  public:
    explicit BoxSpectral(const BoxGrid& g);
    ~BoxSpectral();
    BoxSpectral(BoxSpectral&&) noexcept;
    BoxSpectral& operator=(BoxSpectral&&) noexcept;
    BoxSpectral(const BoxSpectral&) = delete;
    BoxSpectral& operator=(const BoxSpectral&) = delete;

    const BoxGrid& grid() const;
    Field neg_laplacian(const Field& u) const;
    Field inverse_shifted(const Field& g, double a) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Conservative second-order -Δ on the radial mesh (Dirichlet at r_max);
/// the quadratic form dot_quad(u, ·) is 4π ∫ |u'|² r² dr on cell faces.
Field neg_laplacian_radial(const Field& u);

/// -Δu in either backend; `ws` is required for box fields.
Field neg_laplacian(const Field& u, const BoxSpectral* ws);

Field map_f(const Nonlinearity& nl, const Field& u, bool truncated);
Field map_F(const Nonlinearity& nl, const Field& u, bool truncated);

/// I_λ(u) = ½∫|∇u|² + a u² − (λ/2)∫(I_α∗F(u))F(u); λ = 1 recovers L_a.
EnergyReport energy_limit(const Field& u, const Nonlinearity& nl, double a, double lambda,
                          const RieszOperator& R, const BoxSpectral* ws = nullptr,
                          bool truncated = false);
/// L² representative of I_λ': -Δu + a u − λ (I_α∗F(u)) f(u).
Field gradient_limit(const Field& u, const Nonlinearity& nl, double a, double lambda,
                     const RieszOperator& R, const BoxSpectral* ws = nullptr,
                     bool truncated = false);
/// One Riesz apply for both values.
std::pair<EnergyReport, Field> energy_gradient_limit(const Field& u, const Nonlinearity& nl,
                                                     double a, double lambda,
                                                     const RieszOperator& R,
                                                     const BoxSpectral* ws = nullptr,
                                                     bool truncated = false);

/// χ_ε sampled on the box: 0 on O_ε, ε^{-ν} outside; empty when disabled.
struct PenaltyWeights {
    Field chi;
    bool disabled = false;
};
PenaltyWeights make_penalty_weights(const BoxGrid& g, const Domain& O, double eps, double nu,
                                    bool disabled = false);

/// Q_ε(u) = (∫χ_ε u² − 1)₊² and its L² gradient 4(∫χ_ε u² − 1)₊ χ_ε u.
std::pair<double, Field> penalty_q(const Field& u, const PenaltyWeights& chi);
std::pair<double, Field> penalty_q(const Field& u, const SemiclassicalConfig& cfg,
                                   const Domain& O);

/// Throws when the box cannot hold O_ε plus the decay margin.
void require_box_covers(const BoxGrid& g, const Domain& O, double eps, double m,
                        double margin_lengths);

/// Relative Pohozaev residual from assembled components:
/// |(N-2)/2 K + N/2 M − (N+α)/2 λ NL| / (1 + (N-2)/2 K + N/2 M).
double pohozaev_residual(const EnergyReport& rep, int N, double alpha);

/// Γ_ε = P_ε + Q_ε with P_ε(u) = ½∫|∇u|² + V_ε u² − ½∫(I_α∗F_k(u))F_k(u);
/// `v_eps` holds V(εx) on the grid and nl must carry the cap.
EnergyReport energy_semiclassical(const Field& u, const Nonlinearity& nl, const Field& v_eps,
                                  const PenaltyWeights& chi, const RieszOperator& R,
                                  const BoxSpectral& ws);
Field gradient_semiclassical(const Field& u, const Nonlinearity& nl, const Field& v_eps,
                             const PenaltyWeights& chi, const RieszOperator& R,
                             const BoxSpectral& ws);
std::pair<EnergyReport, Field> energy_gradient_semiclassical(const Field& u,
                                                             const Nonlinearity& nl,
                                                             const Field& v_eps,
                                                             const PenaltyWeights& chi,
                                                             const RieszOperator& R,
                                                             const BoxSpectral& ws);

}  // namespace choquard
