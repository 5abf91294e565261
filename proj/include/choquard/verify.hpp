#pragma once

#include <string>
#include <vector>

namespace choquard {

struct VerifyOptions {
    bool inject_kernel_sign_bug = false;  // test-harness hook
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// The self-test battery: gradient finite-difference checks, Riesz oracles,
/// HLS bound sampling, Sobolev-constant stability, instanton fixtures,
/// Nehari idempotence, kernel positivity. Deterministic (fixed RNG seeds).
std::vector<CheckResult> run_verify(const VerifyOptions& opts);

}  // namespace choquard
