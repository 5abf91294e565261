#pragma once

#include <ostream>
#include <string>

#include "choquard/config.hpp"
#include "choquard/verify.hpp"

namespace choquard {

/// Exit-code contract shared by the CLI and the in-process tests:
///   0  success
///   1  invalid configuration
///   2  non-convergence (including an active truncation)
///   3  possible nonexistence (iterate collapsed)
///   4  penalty active at convergence
///   5  verify-battery failure
int cmd_groundstate(const RunConfig& cfg, std::ostream& log);
int cmd_semiclassical(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const VerifyOptions& opts, const std::string& output_dir, std::ostream& log);

/// Path-based wrappers: parse + run, mapping ConfigError to exit code 1.
int cmd_groundstate_path(const std::string& config_path, std::ostream& log);
int cmd_semiclassical_path(const std::string& config_path, std::ostream& log);

}  // namespace choquard
