#pragma once

#include <memory>

#include "choquard/grid.hpp"

namespace choquard {

/// Verify-battery hook: lets the self-test demonstrate that a sign defect in
/// the kernel is caught by the positivity check.
struct RieszFaultInjection {
    bool negate_kernel = false;
};

/// The convolution (I_α ∗ g)(x) = A_α ∫ g(y) |x-y|^{α-N} dy on one grid (N = 3).
///
/// Radial backend: exact angular reduction
///   (I_α ∗ g)(r) = A_α (2π / (r(α-1))) ∫ g(s) s [(r+s)^{α-1} - |r-s|^{α-1}] ds,
/// with the log kernel at α = 1; midpoint cell quadrature, the s = r cell
/// integrated analytically. α = 2 runs on prefix sums, other α on a dense
/// weight matrix. Box backend: zero-padded (2×) FFT convolution with the
/// kernel sampled by signed min-image offsets and the cells nearest the
/// singularity replaced by their analytic averages.
///
/// Immutable after construction; apply() is pure and reentrant (work arrays
/// are per call).
class RieszOperator {
  public:
    RieszOperator(int N, double alpha, const Grid& grid, RieszFaultInjection fault = {});
    ~RieszOperator();
    RieszOperator(RieszOperator&&) noexcept;
    RieszOperator& operator=(RieszOperator&&) noexcept;
    RieszOperator(const RieszOperator&) = delete;
    RieszOperator& operator=(const RieszOperator&) = delete;

    const Grid& grid() const;
    double alpha() const;

    Field apply(const Field& g) const;
    /// ∫ (I_α ∗ g) h; symmetric in (g, h).
    double pairing(const Field& g, const Field& h) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace choquard
