#pragma once

#include <functional>
#include <string>
#include <vector>

#include "choquard/grid.hpp"

namespace choquard {

/// Bounded region O of the local potential-well condition; `everything`
/// stands in for the degenerate whole-space case of constant potentials.
struct Domain {
    enum class Kind { ball, everything };
    Kind kind = Kind::ball;
    Vec3 center{};
    double radius = 1.5;

    bool contains(const Vec3& x) const {
        return kind == Kind::everything || (x - center).norm() <= radius;
    }
    bool bounded() const { return kind == Kind::ball; }
};

/// Potential V with its well data: m = inf_O V < min_{∂O} V and the
/// minimizer set M ⊂ interior(O).
struct PotentialSpec {
    std::function<double(const Vec3&)> V;
    Domain O;
    double m = 1.0;
    std::vector<Vec3> minimizers;
    std::string name = "default";

    /// Samples (V1) inf V > 0 and (V2) m < min_{∂O} V; throws on violation.
    void validate() const;
};

/// V(x) = 2 - exp(-|x - center|²), O = ball(center, 3/2), m = 1, M = {center}.
PotentialSpec default_potential(const Vec3& center = {});

/// V ≡ value with the whole space as O; M is the designated point
/// (the argmin-on-grid convention for constant potentials).
PotentialSpec constant_potential(double value, const Vec3& designated = {});

}  // namespace choquard
