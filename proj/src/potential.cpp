#include "choquard/potential.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace choquard {

void PotentialSpec::validate() const {
    if (!V) throw std::invalid_argument("potential has no evaluator");
    if (minimizers.empty()) throw std::invalid_argument("potential has an empty minimizer set");
    // (V1) sampled on a coarse far-reaching lattice.
    double inf_sample = V(Vec3{});
    for (double r : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
        for (double sx : {-1.0, 0.0, 1.0})
            for (double sy : {-1.0, 0.0, 1.0})
                for (double sz : {-1.0, 0.0, 1.0})
                    inf_sample = std::min(inf_sample, V(Vec3{sx * r, sy * r, sz * r}));
    if (!(inf_sample > 0.0)) {
        std::ostringstream os;
        os << "(V1) violated: sampled inf V = " << inf_sample << " is not positive";
        throw std::invalid_argument(os.str());
    }
    for (const Vec3& x : minimizers) {
        if (std::abs(V(x) - m) > 1e-10 * (1.0 + std::abs(m))) {
            std::ostringstream os;
            os << "minimizer (" << x.x << ", " << x.y << ", " << x.z << ") has V = " << V(x)
               << " != m = " << m;
            throw std::invalid_argument(os.str());
        }
        if (O.bounded() && !((x - O.center).norm() < O.radius)) {
            throw std::invalid_argument("minimizer lies outside the interior of O");
        }
    }
    if (O.bounded()) {
        // (V2) sampled over the boundary sphere.
        double boundary_min = std::numeric_limits<double>::infinity();
        const int nth = 24, nph = 48;
        for (int it = 0; it <= nth; ++it) {
            const double th = M_PI * it / nth;
            for (int ip = 0; ip < nph; ++ip) {
                const double ph = 2.0 * M_PI * ip / nph;
                const Vec3 x = O.center + Vec3{std::sin(th) * std::cos(ph),
                                               std::sin(th) * std::sin(ph), std::cos(th)} *
                                              O.radius;
                boundary_min = std::min(boundary_min, V(x));
            }
        }
        if (!(m < boundary_min)) {
            std::ostringstream os;
            os << "(V2) violated: m = " << m << " is not below min over the boundary of O ("
               << boundary_min << ")";
            throw std::invalid_argument(os.str());
        }
    }
}

PotentialSpec default_potential(const Vec3& center) {
    PotentialSpec p;
    p.V = [center](const Vec3& x) {
        const Vec3 d = x - center;
        return 2.0 - std::exp(-(d.x * d.x + d.y * d.y + d.z * d.z));
    };
    p.O = Domain{Domain::Kind::ball, center, 1.5};
    p.m = 1.0;
    p.minimizers = {center};
    p.name = "default";
    return p;
}

PotentialSpec constant_potential(double value, const Vec3& designated) {
    if (!(value > 0.0)) throw std::invalid_argument("constant potential must be positive ((V1))");
    PotentialSpec p;
    p.V = [value](const Vec3&) { return value; };
    p.O = Domain{Domain::Kind::everything, {}, 0.0};
    p.m = value;
    p.minimizers = {designated};
    p.name = "constant";
    return p;
}

}  // namespace choquard
