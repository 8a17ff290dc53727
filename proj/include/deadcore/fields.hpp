// The two autonomous planar vector fields behind the profile equation, their
// Jacobians, critical points, and the classification of the interior critical
// point of the rescaled field.
//
// Source plane (y,z): y is a scaled logarithmic slope of the profile and
// z a scaled profile height; the field is
//
//     R1 = (m-1) y + K z - y^2 - (2 + N y) z_+^nu
//     R2 = mu z (y - 2 z_+^nu / (m-1))
//
// Rescaled plane (u,v): u = z / z_K, v = ((m-1) y - 2 z_+^nu) / lambda_K,
// with trajectory time contracted by lambda_K; the field becomes
//
//     S1 = u v / nu
//     S2 = c1(K) v - v^2/(m-1) + u - u_+^{2 nu} - c2 v u_+^nu
//
// Both fields are C^1 but not C^2 across {z = 0} resp. {u = 0} because
// nu > 1 is fractional in general; the positive-part powers are evaluated
// on the positive branch only and vanish identically otherwise.

#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "params.hpp"

namespace deadcore {

/// A point of either phase plane (read (u,v) as (y,z) for the source field).
struct PhasePoint {
    double u = 0;
    double v = 0;
};

/// Row-major 2x2 Jacobian d(field)/d(point).
struct Jacobian2 {
    double a11 = 0, a12 = 0;
    double a21 = 0, a22 = 0;
};

/// x^p on the positive branch, exactly 0 for x <= 0.
inline double pow_pos(double x, double p) {
    return x > 0.0 ? std::exp(p * std::log(x)) : 0.0;
}

/// Source-plane field at (y,z).
inline PhasePoint eval_R(const Parameters& p, double K, PhasePoint yz) {
    const double y = yz.u, z = yz.v;
    const double zn = pow_pos(z, p.nu);
    return {(p.m - 1.0) * y + K * z - y * y - (2.0 + p.N * y) * zn,
            p.mu * z * (y - 2.0 * zn / (p.m - 1.0))};
}

/// Jacobian of eval_R at (y,z).
inline Jacobian2 jac_R(const Parameters& p, double K, PhasePoint yz) {
    const double y = yz.u, z = yz.v;
    const double zn = pow_pos(z, p.nu);
    const double znm1 = pow_pos(z, p.nu - 1.0);
    Jacobian2 j;
    j.a11 = (p.m - 1.0) - 2.0 * y - p.N * zn;
    j.a12 = K - p.nu * (2.0 + p.N * y) * znm1;
    j.a21 = p.mu * z;
    j.a22 = p.mu * y - 2.0 * (p.nu + 1.0) / p.nu * zn;
    return j;
}

/// Rescaled-plane field at (u,v); rc must belong to the same (p, K).
inline PhasePoint eval_S(const Parameters& p, const RegimeConstants& rc, PhasePoint uv) {
    const double u = uv.u, v = uv.v;
    const double un = pow_pos(u, p.nu);
    return {u * v / p.nu,
            rc.c1 * v - v * v / (p.m - 1.0) + u - un * un - rc.c2 * v * un};
}

/// Convenience overload computing the constants on the fly.
inline PhasePoint eval_S(const Parameters& p, double K, PhasePoint uv) {
    return eval_S(p, regime_constants(p, K), uv);
}

/// Jacobian of eval_S at (u,v).
inline Jacobian2 jac_S(const Parameters& p, const RegimeConstants& rc, PhasePoint uv) {
    const double u = uv.u, v = uv.v;
    const double un = pow_pos(u, p.nu);
    const double unm1 = pow_pos(u, p.nu - 1.0);
    Jacobian2 j;
    j.a11 = v / p.nu;
    j.a12 = u / p.nu;
    j.a21 = 1.0 - 2.0 * p.nu * un * unm1 - p.nu * rc.c2 * v * unm1;
    j.a22 = rc.c1 - 2.0 * v / (p.m - 1.0) - rc.c2 * un;
    return j;
}

inline Jacobian2 jac_S(const Parameters& p, double K, PhasePoint uv) {
    return jac_S(p, regime_constants(p, K), uv);
}

// --- critical points ------------------------------------------------------

/// Source plane: the origin.
inline PhasePoint crit_P0() { return {0.0, 0.0}; }

/// Source plane: the saddle (m-1, 0) that seeds the dead-core edge orbit.
inline PhasePoint crit_P1(const Parameters& p) { return {p.m - 1.0, 0.0}; }

/// Source plane: the interior critical point (2 z_K^nu/(m-1), z_K).
inline PhasePoint crit_P2(const Parameters& p, const RegimeConstants& rc) {
    return {2.0 * pow_pos(rc.z_K, p.nu) / (p.m - 1.0), rc.z_K};
}

/// Rescaled plane: the origin (image of P0).
inline PhasePoint crit_Q0() { return {0.0, 0.0}; }

/// Rescaled plane: (0, (m-1) c1(K)) (image of P1).
inline PhasePoint crit_Q1(const Parameters& p, const RegimeConstants& rc) {
    return {0.0, (p.m - 1.0) * rc.c1};
}

/// Rescaled plane: (1, 0) (image of P2), the point both shooting maps target.
inline PhasePoint crit_Q2() { return {1.0, 0.0}; }

// --- change of variables ---------------------------------------------------

/// Map a source-plane point to the rescaled plane.
inline PhasePoint uv_from_yz(const Parameters& p, const RegimeConstants& rc, PhasePoint yz) {
    const double zn = pow_pos(yz.v, p.nu);
    return {yz.v / rc.z_K, ((p.m - 1.0) * yz.u - 2.0 * zn) / rc.lambda_K};
}

/// Inverse map back to the source plane.
inline PhasePoint yz_from_uv(const Parameters& p, const RegimeConstants& rc, PhasePoint uv) {
    const double z = rc.z_K * uv.u;
    const double zn = pow_pos(z, p.nu);
    return {(rc.lambda_K * uv.v + 2.0 * zn) / (p.m - 1.0), z};
}

// --- classification of Q2 --------------------------------------------------

/// Linearization type of the interior critical point (1,0).
enum class NodeKind { UnstableNode, UnstableFocus, StableFocus, StableNode };

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::UnstableNode:  return "UnstableNode";
        case NodeKind::UnstableFocus: return "UnstableFocus";
        case NodeKind::StableFocus:   return "StableFocus";
        case NodeKind::StableNode:    return "StableNode";
    }
    return "?";
}

/// Full classification report for Q2 = (1,0) at coupling K.
///
/// The eigenvalues solve  lambda^2 - (c1(K) - c2) lambda + (m-q)/(m-1) = 0,
/// so the kind changes exactly where c1(K) crosses c2 +- 2 sqrt((m-q)/(m-1));
/// since c1 is strictly decreasing in K these crossings invert in closed form
/// to the three thresholds below, ordered K_u < K_f < K_s.
struct Q2Classification {
    NodeKind kind = NodeKind::UnstableNode;
    std::complex<double> lambda1, lambda2;  ///< eigenvalues, Re(lambda1) <= Re(lambda2)
    double K_u = 0;  ///< node -> focus crossing (last K with two positive real eigenvalues)
    double K_f = 0;  ///< focus trace sign change (c1 = c2)
    double K_s = 0;  ///< focus -> node crossing (first K with two negative real eigenvalues)
    bool thresholds_defined = true;  ///< false only if c2 - 2 sqrt((m-q)/(m-1)) <= 0 numerically
};

/// Classify Q2 at coupling K.  The kind is assigned from K's position
/// relative to the closed-form thresholds: (0, K_u] unstable node,
/// (K_u, K_f) unstable focus, [K_f, K_s) stable focus, [K_s, inf) stable node.
inline Q2Classification classify_q2(const Parameters& p, double K) {
    const RegimeConstants rc = regime_constants(p, K);
    const double c1_at_1 = regime_constants(p, 1.0).c1;
    const double gap = 2.0 * std::sqrt((p.m - p.q) / (p.m - 1.0));
    const double expo = (p.m - p.q) / (p.m - 1.0);  // K(t) = (c1(1)/t)^expo
    Q2Classification cls;
    cls.K_u = std::pow(c1_at_1 / (rc.c2 + gap), expo);
    cls.K_f = std::pow(c1_at_1 / rc.c2, expo);
    // c2 - gap > 0 holds throughout the admissible range (it equals
    // sqrt(((A-2m)^2 + 8Aq) / (2(m-1)A)) with A = N(m-1)+2), but keep a
    // numerical-degeneracy guard rather than a hard failure.
    if (rc.c2 - gap > 0.0) {
        cls.K_s = std::pow(c1_at_1 / (rc.c2 - gap), expo);
    } else {
        cls.K_s = std::numeric_limits<double>::infinity();
        cls.thresholds_defined = false;
    }

    const double tr = rc.c1 - rc.c2;
    const double det = (p.m - p.q) / (p.m - 1.0);
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        cls.lambda1 = 0.5 * (tr - s);
        cls.lambda2 = 0.5 * (tr + s);
    } else {
        const double s = std::sqrt(-disc);
        cls.lambda1 = {0.5 * tr, -0.5 * s};
        cls.lambda2 = {0.5 * tr, 0.5 * s};
    }

    if (K <= cls.K_u)
        cls.kind = NodeKind::UnstableNode;
    else if (K < cls.K_f)
        cls.kind = NodeKind::UnstableFocus;
    else if (K < cls.K_s)
        cls.kind = NodeKind::StableFocus;
    else
        cls.kind = NodeKind::StableNode;
    return cls;
}

}  // namespace deadcore
