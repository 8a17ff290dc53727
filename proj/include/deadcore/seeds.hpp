// Seed points for the two distinguished orbits of the rescaled field:
//
//   L1 — the orbit leaving Q1 = (0, (m-1) c1(K)) along its unstable
//        direction into {u > 0}; traced Forward in trajectory time.
//   L0 — the orbit approaching Q0 = (0,0) along the center direction from
//        {u > 0, v < 0}; traced Backward (away from Q0).
//
// Both seeds come from local invariant-manifold expansions at u = epsilon:
// L1 from the tangent line of the unstable manifold, L0 from the center
// manifold v = -u/c1 + a2 u^2 with the quadratic coefficient a2 obtained by
// matching the invariance condition S2 = v'(u) S1 at order u^2.  Tracing the
// orbits in these directions is self-correcting: the transverse eigenvalue
// at Q0 is +c1 (so backward time contracts onto the center manifold) and at
// Q1 it is -c1 (so forward time contracts onto the unstable manifold).

#pragma once

#include <stdexcept>
#include <string>

#include "fields.hpp"
#include "params.hpp"

namespace deadcore {

/// Thrown when a seed offset is outside its admissible range.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Time direction in which a seeded orbit is traced.
enum class Direction { Forward, Backward };

/// Which distinguished orbit a seed belongs to.
enum class Orbit { L1, L0 };

inline const char* to_string(Orbit o) { return o == Orbit::L1 ? "l1" : "l0"; }

/// A starting point for tracing one of the two distinguished orbits.
struct Seed {
    PhasePoint point;      ///< (epsilon, v(epsilon))
    Direction direction;   ///< time direction for subsequent integration
    double epsilon = 0;    ///< offset from the critical point
    Orbit orbit = Orbit::L1;
};

/// Hard floor for seed offsets; below this the expansions drown in roundoff.
inline constexpr double seed_eps_floor = 1e-10;

/// Default (and default maximal) seed offset.
inline constexpr double seed_eps_default = 1e-4;

namespace detail {
inline void check_eps(const char* fn, double eps, double eps_max) {
    if (!(eps > 0.0) || eps > eps_max || eps < seed_eps_floor)
        throw DomainError(std::string("In deadcore::") + fn + ": eps = " + std::to_string(eps) +
                          " outside (" + std::to_string(seed_eps_floor) + ", " +
                          std::to_string(eps_max) + "]");
}
}  // namespace detail

/// Quadratic center-manifold coefficient a2 of v = -u/c1 + a2 u^2 at Q0.
///
/// Substituting the expansion into S2 = v'(u) S1 and collecting the u^2
/// order gives a2 = (1/nu + 1/(m-1)) / c1^3; the fractional powers u^{nu+1}
/// and u^{2 nu} are strictly higher order because nu > 1.  The coefficient
/// is positive for every admissible regime (the manifold bends up from its
/// tangent line); it is exposed so diagnostics can report the computed sign.
inline double l0_quadratic_coeff(const Parameters& p, double K) {
    const RegimeConstants rc = regime_constants(p, K);
    return (1.0 / p.nu + 1.0 / (p.m - 1.0)) / (rc.c1 * rc.c1 * rc.c1);
}

/// Seed for the orbit leaving Q1, at offset u = eps.
///
/// The unstable-manifold tangent at Q1 maps to the line
///   v(u) = (m-1) c1(K) + K z_K u / ((m+q-1) lambda_K)
/// and the exact change of variables contributes the -2 (z_K u)^nu /
/// lambda_K term (higher order than linear since nu > 1, but kept because
/// it is exact rather than asymptotic).
inline Seed seed_l1(const Parameters& p, double K, double eps = seed_eps_default,
                    double eps_max = seed_eps_default) {
    detail::check_eps("seed_l1", eps, eps_max);
    const RegimeConstants rc = regime_constants(p, K);
    const double z = rc.z_K * eps;
    const double y = (p.m - 1.0) + K * z / ((p.m + p.q - 1.0) * (p.m - 1.0));
    const double v = ((p.m - 1.0) * y - 2.0 * pow_pos(z, p.nu)) / rc.lambda_K;
    return {{eps, v}, Direction::Forward, eps, Orbit::L1};
}

/// Seed for the orbit entering Q0, at offset u = eps.
///
/// Uses the quadratic center-manifold expansion v = -u/c1 + a2 u^2; with
/// only the tangent line the backward trace starts O(eps^2) off the
/// manifold, which the quadratic term removes.  `quadratic = false`
/// disables the correction (used by the seeding cross-check).
inline Seed seed_l0(const Parameters& p, double K, double eps = seed_eps_default,
                    double eps_max = seed_eps_default, bool quadratic = true) {
    detail::check_eps("seed_l0", eps, eps_max);
    const RegimeConstants rc = regime_constants(p, K);
    double v = -eps / rc.c1;
    if (quadratic) v += l0_quadratic_coeff(p, K) * eps * eps;
    return {{eps, v}, Direction::Backward, eps, Orbit::L0};
}

}  // namespace deadcore
