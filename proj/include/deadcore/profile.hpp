// Reconstruction of physical profiles from traced orbits, their boundary
// data, an independent finite-difference residual of the profile equation,
// and a brute-force physical-variable shooting oracle.
//
// The inversion: along a traced orbit, with z = z_K u and X = z^nu and
// y = (lambda_K v + 2 X)/(m-1), the physical radius satisfies
// d(ln xi)/d eta = X with eta = zeta / lambda_K, so
//
//     xi(eta)  = exp( integral of X ),
//     f(xi)    = (alpha X / 2m)^{1/(m-1)} xi^{2/(m-1)},
//     (f^{m-1})'(xi) = alpha (m-1) xi y / (2m).
//
// The integral of X gets analytic tail corrections at both ends: an
// exponential one where the orbit leaves the saddle at u = 0 (X grows like
// e^{r eta} with r = nu mu (y - 2X/(m-1))), and an algebraic one where it
// crawls into the origin of the phase plane (z ~ (m-1)/(mu K eta), so the
// remaining integral is z^{nu-1} (m-1) / (mu K (nu-1))).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fields.hpp"
#include "integrate.hpp"
#include "params.hpp"
#include "seeds.hpp"
#include "shoot.hpp"

namespace deadcore {

/// Thrown when the two half-orbits of a dead-core reconstruction do not meet.
struct JunctionError : std::runtime_error {
    explicit JunctionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an analytic tail correction is too large to trust (span too short).
struct TailError : std::runtime_error {
    explicit TailError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by the physical oracle when the profile never returns toward zero.
struct BlowUpError : std::runtime_error {
    explicit BlowUpError(const std::string& what) : std::runtime_error(what) {}
};

/// Which construction a profile came from.
enum class ProfileKind { DeadCore, OriginSupported };

/// Which edge is pinned at 1 by the scaling freedom of the profile equation.
enum class Normalization { AsComputed, LeftEdgeAtOne, InterfaceAtOne };

inline const char* to_string(ProfileKind k) { return k == ProfileKind::DeadCore ? "DeadCore" : "OriginSupported"; }

inline const char* to_string(Normalization n) {
    switch (n) {
        case Normalization::AsComputed:     return "AsComputed";
        case Normalization::LeftEdgeAtOne:  return "LeftEdgeAtOne";
        case Normalization::InterfaceAtOne: return "InterfaceAtOne";
    }
    return "?";
}

/// One profile node: radius, height, and the derivative of f^{m-1}.
struct ProfileSample {
    double xi = 0;
    double f = 0;
    double dfm1 = 0;  ///< (f^{m-1})'(xi)
};

/// A reconstructed self-similar profile.
struct Profile {
    KBeta regime;
    ProfileKind kind = ProfileKind::DeadCore;
    double xi_star = 0;  ///< left support edge (0 for OriginSupported)
    double xi_0 = 0;     ///< interface (right support edge)
    std::vector<ProfileSample> samples;  ///< strictly increasing in xi
    Normalization normalization = Normalization::AsComputed;
};

/// Closed-form boundary data measured off a profile, with expectations.
struct BoundaryReport {
    double left_slope = 0;           ///< limit of (f^{m-1})' at the left edge
    double left_slope_expected = 0;  ///< (m-1) beta xi_star / m
    double interface_coeff = 0;      ///< fitted coefficient of (xi_0 - xi)^{1/(1-q)}
    double interface_coeff_expected = 0;
    std::optional<double> origin_coeff;  ///< limit of f / xi^{2/(m-1)} (origin-supported only)
    std::optional<double> origin_coeff_expected;
    double ode_residual_max = 0;     ///< max relative residual on the interior window
};

/// Tunables of the reconstruction.
struct ReconstructOptions {
    double junction_tol = 1e-4;  ///< relative mismatch allowed between the half-orbit endpoints
    double tail_target = 1e-7;   ///< extend the origin-side end on the local-manifold series until
                                 ///< the algebraic tail closure is below this fraction of the total
    double tail_frac_max = 0.1;  ///< hard failure threshold for either tail correction
    IntegrateOptions integ;
};

namespace detail {

/// An inversion node along the glued curve.
struct InvNode {
    double X = 0;     ///< z^nu
    double y = 0;
    double lnxi = 0;  ///< accumulated, arbitrary origin until shifted
};

/// Gauss-Legendre 4-point integral of X(zeta) = (z_K u(zeta))^nu from za to
/// zb inside one dense segment.
inline double integral_X(double z_K, double nu, const DenseCoef& dc, double za, double zb) {
    static constexpr double gx[2] = {0.3399810435848562648, 0.8611363115940525752};
    static constexpr double gw[2] = {0.6521451548625461426, 0.3478548451374538573};
    const double mid = 0.5 * (za + zb), half = 0.5 * (zb - za);
    double sum = 0;
    for (int k = 0; k < 2; ++k) {
        for (double sgn : {-1.0, 1.0}) {
            const double zeta = mid + sgn * half * gx[k];
            const double theta = dc.h != 0.0 ? (zeta - dc.zeta0) / dc.h : 0.0;
            const double u = dc.eval(theta)[0];
            sum += gw[k] * pow_pos(z_K * u, nu);
        }
    }
    return sum * half;
}

/// Append inversion nodes for trajectory t, iterated in sample order
/// (reversed = false) or from the last sample back to the first (reversed =
/// true), accumulating lnxi from nodes.back().  skip_first drops the first
/// iterated node (when it duplicates the current endpoint); the lnxi
/// increments are always accumulated from the first iterated sample.
inline void append_nodes(std::vector<InvNode>& nodes, const Parameters& p, const RegimeConstants& rc,
                         const Trajectory& t, bool reversed, bool skip_first) {
    const auto& s = t.samples;
    const std::size_t n = s.size();
    if (n == 0) return;
    auto node_of = [&](const TrajectorySample& smp, double lnxi) {
        InvNode nd;
        nd.X = pow_pos(rc.z_K * smp.point.u, p.nu);
        nd.y = (rc.lambda_K * smp.point.v + 2.0 * nd.X) / (p.m - 1.0);
        nd.lnxi = lnxi;
        return nd;
    };
    double lnxi = nodes.empty() ? 0.0 : nodes.back().lnxi;
    bool first = true;
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t i = reversed ? n - 1 - step : step;
        if (first) {
            first = false;
            if (!(skip_first && !nodes.empty())) nodes.push_back(node_of(s[i], lnxi));
            continue;
        }
        // Dense segment for the pair just traversed.
        const std::size_t seg = reversed ? i : i - 1;
        const double za = reversed ? s[i + 1].zeta : s[i - 1].zeta;
        const double zb = s[i].zeta;
        lnxi += integral_X(rc.z_K, p.nu, t.dense[seg], za, zb) / rc.lambda_K;
        nodes.push_back(node_of(s[i], lnxi));
    }
}

/// Exponential tail of the integral of X beyond the saddle-side endpoint.
inline double tail_exponential(const Parameters& p, const InvNode& end) {
    const double r = p.nu * p.mu * (end.y - 2.0 * end.X / (p.m - 1.0));
    if (!(r > 0)) return 0.0;  // not in the exponential regime; negligible anyway
    return end.X / r;
}

/// Algebraic tail of the integral of X beyond the origin-side endpoint.
inline double tail_algebraic(const Parameters& p, double K, const RegimeConstants& rc, double u_end) {
    const double z_end = rc.z_K * u_end;
    return pow_pos(z_end, p.nu - 1.0) * (p.m - 1.0) / (p.mu * K * (p.nu - 1.0));
}

/// Depth below the series floor where even the leading-order tail closure
/// is negligible; series nodes are synthesized, not integration seeds, so
/// this sits far below the seed validity floor.
inline constexpr double series_eps_floor = 1e-13;

/// The depth whose algebraic tail closure is at most `target` times the
/// (estimated) total integral of X.
inline double deep_seed_eps(const Parameters& p, double K, const RegimeConstants& rc, double span_estimate,
                            double target) {
    const double z_end = std::pow(target * span_estimate * p.mu * K * (p.nu - 1.0) / (p.m - 1.0),
                                  1.0 / (p.nu - 1.0));
    return std::max(z_end / rc.z_K, series_eps_floor);
}

/// Extend the origin-side end of the glued curve below the trace's seed
/// scale using the local-manifold series v(u) = -(u/c1)(1 - a2 c1 u).
///
/// The deep stretch cannot be traced numerically in either direction: the
/// transverse rate c1 makes forward integration toward the phase-plane
/// origin unstable, and caps backward steps near 3.3/c1 (linear stability),
/// so reaching depth eps costs ~ c1^2 nu / (3.3 eps) steps.  On that
/// stretch, however, the orbit *is* the manifold series to far better than
/// integration accuracy (the dropped terms are O(u^3, u^{1+nu}) against a
/// leading O(u)), so nodes are synthesized on a geometric grid instead:
/// u from u_hi down to u_lo, ln xi increasing from nodes.back() by the
/// Gauss-quadrature of X nu / (u v(u) lambda_K) du per segment.  The node
/// at u_hi duplicates the trace's seed node and is skipped.
inline void append_series_nodes(std::vector<InvNode>& nodes, const Parameters& p, double K,
                                const RegimeConstants& rc, double u_hi, double u_lo) {
    if (!(u_lo < u_hi) || nodes.empty()) return;
    const double a2 = l0_quadratic_coeff(p, K);
    auto v_of = [&](double u) { return -(u / rc.c1) * (1.0 - a2 * rc.c1 * u); };
    // d(ln xi)/du = X * (dzeta/du) / lambda_K with dzeta/du = nu / (u v).
    auto dlnxi_du = [&](double u) { return pow_pos(rc.z_K * u, p.nu) * p.nu / (u * v_of(u) * rc.lambda_K); };
    static constexpr double gx[2] = {0.3399810435848562648, 0.8611363115940525752};
    static constexpr double gw[2] = {0.6521451548625461426, 0.3478548451374538573};

    const double lhi = std::log(u_hi), llo = std::log(u_lo);
    const int nseg = std::max(2, int(std::ceil(12.0 * (lhi - llo) / std::log(10.0))));
    double lnxi = nodes.back().lnxi;
    double ua = u_hi;
    for (int j = 1; j <= nseg; ++j) {
        const double ub = std::exp(lhi + (llo - lhi) * j / nseg);
        const double mid = 0.5 * (ua + ub), half = 0.5 * (ub - ua);
        double sum = 0;
        for (int k = 0; k < 2; ++k)
            for (double sgn : {-1.0, 1.0}) sum += gw[k] * dlnxi_du(mid + sgn * half * gx[k]);
        lnxi += sum * half;  // du < 0 and v < 0: increment is positive
        InvNode nd;
        nd.X = pow_pos(rc.z_K * ub, p.nu);
        nd.y = (rc.lambda_K * v_of(ub) + 2.0 * nd.X) / (p.m - 1.0);
        nd.lnxi = lnxi;
        nodes.push_back(nd);
        ua = ub;
    }
}

/// Build the sample list from inversion nodes (lnxi already shifted to its
/// final frame) and fill the support edges from the tail-corrected limits.
inline void build_samples(Profile& prof, const Parameters& p, double alpha, const std::vector<InvNode>& nodes,
                          double lnxi_star, double lnxi_0) {
    prof.samples.clear();
    prof.samples.reserve(nodes.size() + 1);
    const double e1 = 1.0 / (p.m - 1.0), e2 = 2.0 / (p.m - 1.0);
    for (const InvNode& nd : nodes) {
        ProfileSample smp;
        smp.xi = std::exp(nd.lnxi);
        smp.f = std::pow(alpha * nd.X / (2.0 * p.m), e1) * std::pow(smp.xi, e2);
        smp.dfm1 = alpha * (p.m - 1.0) * smp.xi * nd.y / (2.0 * p.m);
        prof.samples.push_back(smp);
    }
    prof.xi_star = std::isfinite(lnxi_star) ? std::exp(lnxi_star) : 0.0;
    prof.xi_0 = std::exp(lnxi_0);
}

}  // namespace detail

/// Rescale a profile by the one-parameter family that maps solutions to
/// solutions: xi -> s xi, f -> s^{2/(m-1)} f, (f^{m-1})' -> s (f^{m-1})'
/// with s = lambda^{(m-1)/2}.
inline Profile rescaled(const Parameters& p, const Profile& in, double lambda) {
    const double s = std::pow(lambda, 0.5 * (p.m - 1.0));
    Profile out = in;
    out.xi_star *= s;
    out.xi_0 *= s;
    for (ProfileSample& smp : out.samples) {
        smp.xi *= s;
        smp.f *= lambda;  // s^{2/(m-1)} = lambda
        smp.dfm1 *= s;
    }
    const double tol = 1e-12;
    if (std::abs(out.xi_star - 1.0) <= tol)
        out.normalization = Normalization::LeftEdgeAtOne;
    else if (std::abs(out.xi_0 - 1.0) <= tol)
        out.normalization = Normalization::InterfaceAtOne;
    else
        out.normalization = Normalization::AsComputed;
    return out;
}

/// Rescale so the requested edge sits exactly at 1.
inline Profile renormalized(const Parameters& p, const Profile& in, Normalization target) {
    if (target == Normalization::AsComputed) return in;
    const double edge = target == Normalization::LeftEdgeAtOne ? in.xi_star : in.xi_0;
    if (!(edge > 0))
        throw RegimeError("In deadcore::renormalized: requested edge is at 0, cannot be scaled to 1");
    const double s = 1.0 / edge;
    Profile out = rescaled(p, in, std::pow(s, 2.0 / (p.m - 1.0)));
    // Pin the edge exactly (the rescale reproduces it only to roundoff).
    if (target == Normalization::LeftEdgeAtOne)
        out.xi_star = 1.0;
    else
        out.xi_0 = 1.0;
    out.normalization = target;
    return out;
}

/// Reconstruct the dead-core profile at the connection coupling from its two
/// half-orbits (the forward trace to the crossing and the backward trace to
/// its crossing).  Returned normalized to LeftEdgeAtOne.
inline Profile reconstruct_dead_core(const Parameters& p, const KBeta& kstar, const Trajectory& l1,
                                     const Trajectory& l0, const ReconstructOptions& opt = {}) {
    if (l1.termination != TerminationKind::Event || l0.termination != TerminationKind::Event)
        throw JunctionError("In deadcore::reconstruct_dead_core: both orbits must end at a v = 0 crossing");
    const double U1 = l1.end_point().u, U0 = l0.end_point().u;
    if (std::abs(U0 - U1) > opt.junction_tol * std::max(1.0, std::abs(U1)))
        throw JunctionError("In deadcore::reconstruct_dead_core: junction mismatch |" + std::to_string(U0) +
                            " - " + std::to_string(U1) + "| exceeds tolerance");
    const RegimeConstants rc = regime_constants(p, kstar.K);

    std::vector<detail::InvNode> nodes;
    // Saddle-side half: seed -> crossing, ascending radius.
    detail::append_nodes(nodes, p, rc, l1, /*reversed=*/false, /*skip_first=*/false);
    const std::size_t junction_idx = nodes.size() - 1;
    // Origin-side half: crossing -> seed (reverse of the backward trace);
    // its crossing node duplicates the junction and is skipped.
    detail::append_nodes(nodes, p, rc, l0, /*reversed=*/true, /*skip_first=*/true);

    // Extend beyond the trace's seed scale on the local-manifold series
    // until the remaining algebraic tail closure is negligible.
    const double span_estimate = std::max(1.0, nodes.back().lnxi - nodes.front().lnxi);
    const double eps_deep = detail::deep_seed_eps(p, kstar.K, rc, span_estimate, opt.tail_target);
    double u_end = l0.samples.front().point.u;  // the backward trace's seed depth
    if (eps_deep < u_end) {
        detail::append_series_nodes(nodes, p, kstar.K, rc, u_end, eps_deep);
        u_end = eps_deep;
    }

    // Shift so the junction sits at ln xi = 0, then apply the tails.
    const double shift = nodes[junction_idx].lnxi;
    for (detail::InvNode& nd : nodes) nd.lnxi -= shift;

    const double tail_L = detail::tail_exponential(p, nodes.front());
    const double tail_R = detail::tail_algebraic(p, kstar.K, rc, u_end);
    const double total = (nodes.back().lnxi - nodes.front().lnxi) + tail_L + tail_R;
    if (tail_L > opt.tail_frac_max * total)
        throw TailError("In deadcore::reconstruct_dead_core: saddle-side tail " + std::to_string(tail_L) +
                        " exceeds " + std::to_string(opt.tail_frac_max) + " of the total " + std::to_string(total));
    if (tail_R > opt.tail_frac_max * total)
        throw TailError("In deadcore::reconstruct_dead_core: origin-side tail " + std::to_string(tail_R) +
                        " exceeds " + std::to_string(opt.tail_frac_max) + " of the total " + std::to_string(total));

    Profile prof;
    prof.regime = kstar;
    prof.kind = ProfileKind::DeadCore;
    detail::build_samples(prof, p, kstar.alpha, nodes, nodes.front().lnxi - tail_L, nodes.back().lnxi + tail_R);
    prof.normalization = Normalization::AsComputed;
    return renormalized(p, prof, Normalization::LeftEdgeAtOne);
}

/// Reconstruct an origin-supported profile from a backward trace that
/// connected to the interior critical point (coupling at or below the
/// connection-to-Q2 threshold).  Returned normalized to InterfaceAtOne.
inline Profile reconstruct_origin(const Parameters& p, const KBeta& kb, const Trajectory& l0,
                                  const ReconstructOptions& opt = {}) {
    if (l0.termination != TerminationKind::ConvergedToQ2)
        throw RegimeError(
            "In deadcore::reconstruct_origin: the backward trace did not connect to the interior critical "
            "point (coupling above the threshold)");
    const RegimeConstants rc = regime_constants(p, kb.K);

    std::vector<detail::InvNode> nodes;
    // From the interior-critical-point end (origin side, xi -> 0) to the
    // seed (interface side), ascending radius.
    detail::append_nodes(nodes, p, rc, l0, /*reversed=*/true, /*skip_first=*/false);

    // Extend beyond the trace's seed scale on the local-manifold series
    // until the remaining algebraic tail closure is negligible.
    const double span_estimate = std::max(1.0, nodes.back().lnxi - nodes.front().lnxi);
    const double eps_deep = detail::deep_seed_eps(p, kb.K, rc, span_estimate, opt.tail_target);
    double u_end = l0.samples.front().point.u;
    if (eps_deep < u_end) {
        detail::append_series_nodes(nodes, p, kb.K, rc, u_end, eps_deep);
        u_end = eps_deep;
    }

    const double tail_R = detail::tail_algebraic(p, kb.K, rc, u_end);
    const double total = (nodes.back().lnxi - nodes.front().lnxi) + tail_R;
    if (tail_R > opt.tail_frac_max * total)
        throw TailError("In deadcore::reconstruct_origin: interface-side tail " + std::to_string(tail_R) +
                        " exceeds " + std::to_string(opt.tail_frac_max) + " of the total " + std::to_string(total));

    Profile prof;
    prof.regime = kb;
    prof.kind = ProfileKind::OriginSupported;
    detail::build_samples(prof, p, kb.alpha, nodes,
                          -std::numeric_limits<double>::infinity(),  // support reaches the origin
                          nodes.back().lnxi + tail_R);
    Profile out = renormalized(p, prof, Normalization::InterfaceAtOne);
    // Close the support at the origin explicitly.
    out.samples.insert(out.samples.begin(), ProfileSample{0.0, 0.0, 0.0});
    out.xi_star = 0.0;
    return out;
}

/// Evaluate a profile at any radius (0 outside the support).  Interpolation
/// is cubic Hermite on f^{m-1}, whose derivative the samples carry exactly.
inline double profile_eval(const Parameters& p, const Profile& prof, double xi) {
    if (xi <= prof.xi_star || xi >= prof.xi_0) return 0.0;
    const auto& s = prof.samples;
    if (s.size() < 2) return 0.0;
    const double e1 = 1.0 / (p.m - 1.0);
    if (xi < s.front().xi) {
        // Sliver between the edge and the first sample: linear edge law of f^{m-1}.
        const double g = s.front().dfm1 * (xi - prof.xi_star);
        return g > 0 ? std::pow(g, e1) : 0.0;
    }
    if (xi > s.back().xi) {
        // Sliver between the last sample and the interface: contact power law.
        const double g_last = std::pow(s.back().f, p.m - 1.0);
        const double denom = prof.xi_0 - s.back().xi;
        if (!(denom > 0)) return 0.0;
        const double g = g_last * std::pow((prof.xi_0 - xi) / denom, (p.m - 1.0) / (1.0 - p.q));
        return g > 0 ? std::pow(g, e1) : 0.0;
    }
    // Binary search for the straddling segment.
    std::size_t lo = 0, hi = s.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (s[mid].xi <= xi ? lo : hi) = mid;
    }
    const double xa = s[lo].xi, xb = s[hi].xi, h = xb - xa;
    if (!(h > 0)) return s[lo].f;
    const double t = (xi - xa) / h;
    const double g0 = std::pow(s[lo].f, p.m - 1.0), g1 = std::pow(s[hi].f, p.m - 1.0);
    const double d0 = s[lo].dfm1, d1 = s[hi].dfm1;
    const double t2 = t * t, t3 = t2 * t;
    const double g = (2 * t3 - 3 * t2 + 1) * g0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * g1 +
                     (t3 - t2) * h * d1;
    return g > 0 ? std::pow(g, e1) : 0.0;
}

/// The self-similar solution the profile encodes: u(t, x) = e^{-alpha t} f(|x| e^{beta t}).
inline double selfsimilar_u(const Parameters& p, const Profile& prof, double t, double radius) {
    return std::exp(-prof.regime.alpha * t) * profile_eval(p, prof, radius * std::exp(prof.regime.beta * t));
}

// --- edge fits --------------------------------------------------------------

/// A power-law fit f ~ coefficient * |xi - edge|^exponent near a support edge.
struct EdgeFit {
    double exponent = 0;
    double coefficient = 0;
    double edge = 0;  ///< refined edge location
};

namespace detail {

struct LinFit {
    double slope = 0, intercept = 0;
    double xbar = 0, ybar = 0;

    /// Root of the fitted line, y = 0 at x = xbar - ybar / slope.  Evaluated
    /// in this centered form because near-edge windows put all x within a
    /// relative 1e-12 of each other and the intercept route would cancel.
    double zero_x() const { return xbar - ybar / slope; }
};

inline LinFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    LinFit out;
    for (std::size_t i = 0; i < n; ++i) {
        out.xbar += x[i];
        out.ybar += y[i];
    }
    out.xbar /= double(n);
    out.ybar /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - out.xbar;
        sxx += dx * dx;
        sxy += dx * (y[i] - out.ybar);
    }
    out.slope = sxy / sxx;
    out.intercept = out.ybar - out.slope * out.xbar;
    return out;
}

/// Samples on one side of the peak with f inside [frac_lo, frac_hi] * fmax.
inline std::vector<std::size_t> side_window(const Profile& prof, bool right_side, double frac_lo,
                                            double frac_hi) {
    const auto& s = prof.samples;
    std::size_t ipeak = 0;
    double fmax = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i].f > fmax) {
            fmax = s[i].f;
            ipeak = i;
        }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (right_side ? i <= ipeak : i >= ipeak) continue;
        if (s[i].f >= frac_lo * fmax && s[i].f <= frac_hi * fmax) idx.push_back(i);
    }
    return idx;
}

/// The deepest decade of f-values on one side of the peak (widened decade by
/// decade until it holds at least min_count samples).  The deepest samples
/// carry no truncation bias from the next-order edge corrections.
inline std::vector<std::size_t> last_decade_window(const Profile& prof, bool right_side,
                                                   std::size_t min_count) {
    const auto& s = prof.samples;
    std::size_t ipeak = 0;
    double fmax = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i].f > fmax) {
            fmax = s[i].f;
            ipeak = i;
        }
    double fmin = fmax;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (right_side ? i <= ipeak : i >= ipeak) continue;
        if (s[i].f > 0 && s[i].f < fmin) fmin = s[i].f;
    }
    std::vector<std::size_t> idx;
    for (double cap = 10.0 * fmin; cap < fmax; cap *= 10.0) {
        idx.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (right_side ? i <= ipeak : i >= ipeak) continue;
            if (s[i].f > 0 && s[i].f <= cap) idx.push_back(i);
        }
        if (idx.size() >= min_count) break;
    }
    return idx;
}

}  // namespace detail

/// Fit the left (dead-core) edge: refine xi_star by the linear law of
/// f^{m-1}, then regress ln f against ln(xi - xi_star).  Windowed at
/// f in [1e-5, 1e-4] of the peak, deep enough that the next-order edge
/// correction is far below the fit tolerances.
inline EdgeFit fit_left_edge(const Parameters& p, const Profile& prof) {
    const auto idx = detail::side_window(prof, /*right_side=*/false, 1e-5, 1e-4);
    if (idx.size() < 8) throw RangeError("In deadcore::fit_left_edge: too few samples near the left edge");
    std::vector<double> xs, ys;
    for (std::size_t i : idx) {
        xs.push_back(prof.samples[i].xi);
        ys.push_back(std::pow(prof.samples[i].f, p.m - 1.0));
    }
    const auto lin = detail::least_squares(xs, ys);
    const double edge = lin.zero_x();
    std::vector<double> lx, ly;
    for (std::size_t i : idx) {
        lx.push_back(std::log(prof.samples[i].xi - edge));
        ly.push_back(std::log(prof.samples[i].f));
    }
    const auto ll = detail::least_squares(lx, ly);
    return {ll.slope, std::exp(ll.intercept), edge};
}

/// Fit the interface over the last decade of f-values, with xi_0 itself a
/// fit parameter: the contact law makes f^{1-q} exactly linear in xi, so the
/// straight-line fit is the power-law fit with both the coefficient
/// (slope = -coefficient^{1-q}) and xi_0 (the root) free, and the deepest
/// window carries no finite-height bias.
inline EdgeFit fit_interface(const Parameters& p, const Profile& prof) {
    const auto idx = detail::last_decade_window(prof, /*right_side=*/true, 8);
    if (idx.size() < 8) throw RangeError("In deadcore::fit_interface: too few samples near the interface");
    std::vector<double> xs, ys;
    for (std::size_t i : idx) {
        xs.push_back(prof.samples[i].xi);
        ys.push_back(std::pow(prof.samples[i].f, 1.0 - p.q));
    }
    const auto lin = detail::least_squares(xs, ys);
    const double edge = lin.zero_x();
    const double coeff = std::pow(-lin.slope, 1.0 / (1.0 - p.q));
    std::vector<double> lx, ly;
    for (std::size_t i : idx) {
        lx.push_back(std::log(edge - prof.samples[i].xi));
        ly.push_back(std::log(prof.samples[i].f));
    }
    const auto ll = detail::least_squares(lx, ly);
    return {ll.slope, coeff, edge};
}

/// Fit the origin behavior of an origin-supported profile: regress ln f
/// against ln xi over the deepest decade of xi samples (widened until it
/// holds 8 points); the coefficient is the plateau of f / xi^{2/(m-1)}.
/// Only the deepest window is unbiased: the approach to the origin law
/// decays like a small power of xi, so shallow samples still carry it.
inline EdgeFit fit_origin(const Parameters& p, const Profile& prof) {
    double xi_min = prof.xi_0;
    for (const ProfileSample& s : prof.samples)
        if (s.xi > 0 && s.f > 0 && s.xi < xi_min) xi_min = s.xi;
    std::vector<double> lx, ly, plateau;
    for (double cap = 10.0 * xi_min; cap < prof.xi_0 && lx.size() < 8; cap *= 10.0) {
        lx.clear();
        ly.clear();
        plateau.clear();
        for (const ProfileSample& s : prof.samples) {
            if (s.xi <= 0 || s.f <= 0 || s.xi > cap) continue;
            lx.push_back(std::log(s.xi));
            ly.push_back(std::log(s.f));
            plateau.push_back(s.f / std::pow(s.xi, 2.0 / (p.m - 1.0)));
        }
    }
    if (lx.size() < 8) throw RangeError("In deadcore::fit_origin: too few samples near the origin");
    const auto ll = detail::least_squares(lx, ly);
    double mean = 0;
    for (double v : plateau) mean += v;
    mean /= double(plateau.size());
    return {ll.slope, mean, 0.0};
}

// --- residual ----------------------------------------------------------------

namespace detail {

/// Savitzky-Golay fit of a degree-4 polynomial over 2M+1 uniformly spaced
/// values centered at i; returns the smoothed value and first and second
/// derivatives with respect to the grid coordinate.
inline void sg_fit(const std::vector<double>& F, std::size_t i, int M, double h, double& F0, double& F1,
                   double& F2) {
    double S[9] = {0};
    for (int j = -M; j <= M; ++j) {
        double pw = 1;
        for (int k = 0; k <= 8; ++k) {
            S[k] += pw;
            pw *= j;
        }
    }
    double A[5][6];
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) A[r][c] = S[r + c];
    for (int r = 0; r < 5; ++r) {
        double b = 0;
        for (int j = -M; j <= M; ++j) {
            double pw = 1;
            for (int k = 0; k < r; ++k) pw *= j;
            b += pw * F[i + j];
        }
        A[r][5] = b;
    }
    // Gaussian elimination with partial pivoting on the 5x6 system.
    for (int c = 0; c < 5; ++c) {
        int piv = c;
        for (int r = c + 1; r < 5; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        for (int k = 0; k < 6; ++k) std::swap(A[c][k], A[piv][k]);
        for (int r = 0; r < 5; ++r) {
            if (r == c) continue;
            const double fac = A[r][c] / A[c][c];
            for (int k = c; k < 6; ++k) A[r][k] -= fac * A[c][k];
        }
    }
    const double a0 = A[0][5] / A[0][0], a1 = A[1][5] / A[1][1], a2 = A[2][5] / A[2][2];
    F0 = a0;
    F1 = a1 / h;
    F2 = 2.0 * a2 / (h * h);
}

}  // namespace detail

/// Evaluate the profile equation residual on the interior window and collect
/// all boundary fits into one report.
///
/// F = f^m is resampled onto a log-uniform radius grid by cubic Hermite
/// (nodal F' = m f (f^{m-1})' / (m-1) is exact data), then smoothed
/// finite differences (a moving degree-4 least-squares fit) supply F, F_s,
/// and F_ss in s = ln xi.  The residual of
///     (f^m)'' + (N-1)(f^m)'/xi + alpha f - beta xi f' - xi^sigma f^q
/// is normalized at each node by its largest single term; the maximum over
/// the window (where f >= 20% of the peak) is reported.
inline BoundaryReport ode_residual(const Parameters& p, const KBeta& kb, const Profile& prof) {
    const auto& s = prof.samples;
    if (s.size() < 200)
        throw RangeError("In deadcore::ode_residual: need at least 200 samples, have " +
                         std::to_string(s.size()));
    BoundaryReport rep;

    // Boundary fits first.
    rep.left_slope = prof.kind == ProfileKind::DeadCore ? s.front().dfm1 : 0.0;
    rep.left_slope_expected = (p.m - 1.0) * kb.beta * prof.xi_star / p.m;
    const EdgeFit iface = fit_interface(p, prof);
    rep.interface_coeff = iface.coefficient;
    rep.interface_coeff_expected =
        std::pow((1.0 - p.q) * std::pow(iface.edge, p.sigma - 1.0) / kb.beta, 1.0 / (1.0 - p.q));
    if (prof.kind == ProfileKind::OriginSupported) {
        const EdgeFit org = fit_origin(p, prof);
        rep.origin_coeff = org.coefficient;
        const double A = p.N * (p.m - 1.0) + 2.0;
        rep.origin_coeff_expected =
            std::pow((p.m - 1.0) * (p.m - 1.0) / (2.0 * p.m * A), 1.0 / (p.m - p.q));
    }

    // Interior window by height.
    double fmax = 0;
    for (const auto& smp : s) fmax = std::max(fmax, smp.f);
    std::size_t ilo = 0, ihi = s.size() - 1;
    while (ilo < s.size() && s[ilo].f < 0.2 * fmax) ++ilo;
    while (ihi > 0 && s[ihi].f < 0.2 * fmax) --ihi;
    if (ihi <= ilo + 8) throw RangeError("In deadcore::ode_residual: interior window is empty");
    const double s_lo = std::log(s[ilo].xi), s_hi = std::log(s[ihi].xi);

    // Log-uniform resample of F = f^m (cubic Hermite, exact nodal slopes)
    // and of its exact nodal derivative G = (f^m)' = m f (f^{m-1})' / (m-1)
    // (linear; the raw grid is far finer than the resample grid).  Every term
    // of the residual then uses integrator data directly except F'', which is
    // one smoothed derivative of the exactly known G — one order less
    // smoothing than differencing F twice, which matters near the contact
    // point where higher derivatives of F blow up.
    constexpr int n = 512;
    const double h = (s_hi - s_lo) / (n - 1);
    std::vector<double> F(n), G(n);
    std::size_t seg = ilo;
    for (int i = 0; i < n; ++i) {
        const double xi = std::exp(s_lo + i * h);
        while (seg + 2 < s.size() && s[seg + 1].xi < xi) ++seg;
        const double xa = s[seg].xi, xb = s[seg + 1].xi;
        const double t = (xi - xa) / (xb - xa);
        const double Fa = std::pow(s[seg].f, p.m), Fb = std::pow(s[seg + 1].f, p.m);
        const double da = p.m * s[seg].f * s[seg].dfm1 / (p.m - 1.0);
        const double db = p.m * s[seg + 1].f * s[seg + 1].dfm1 / (p.m - 1.0);
        const double t2 = t * t, t3 = t2 * t, hx = xb - xa;
        F[i] = (2 * t3 - 3 * t2 + 1) * Fa + (t3 - 2 * t2 + t) * hx * da + (-2 * t3 + 3 * t2) * Fb +
               (t3 - t2) * hx * db;
        G[i] = (1.0 - t) * da + t * db;
    }

    constexpr int M = 24;
    double worst = 0;
    for (int i = M; i < n - M; ++i) {
        double G0, Gs, Gss;
        detail::sg_fit(G, std::size_t(i), M, h, G0, Gs, Gss);
        if (!(F[i] > 0)) continue;
        const double xi = std::exp(s_lo + i * h);
        const double f = std::pow(F[i], 1.0 / p.m);
        const double fm1 = std::pow(F[i], (p.m - 1.0) / p.m);
        const double T1 = Gs / xi;  // F'' via dG/ds = xi G'
        const double T2 = (p.N - 1.0) * G0 / xi;
        const double T3 = kb.alpha * f;
        const double T4 = -kb.beta * xi * G0 / (p.m * fm1);
        const double T5 = -std::pow(xi, p.sigma) * std::pow(f, p.q);
        const double scale = std::max({std::abs(T1), std::abs(T2), std::abs(T3), std::abs(T4), std::abs(T5)});
        if (scale <= 0) continue;
        worst = std::max(worst, std::abs(T1 + T2 + T3 + T4 + T5) / scale);
    }
    rep.ode_residual_max = worst;
    return rep;
}

// --- independent physical-variable oracle -----------------------------------

/// Outcome of the brute-force cross-check in physical variables.
///
/// A single forward shot from the left edge cannot follow the profile all the
/// way to the contact point: linearizing the profile equation along the
/// solution gives a growth rate ~ beta*xi / (m f^{m-1}) which diverges as
/// f -> 0, so the total forward amplification to contact is unbounded and the
/// endpoint of any fixed-precision shot stalls strictly short of xi_0 no
/// matter how accurately beta is known.  The well-conditioned equivalent is
/// two-sided: shoot forward from the edge only to a mid-profile station
/// (bounded amplification), shoot backward from the contact law at a
/// candidate xi_0 (the forward-unstable mode is backward-stable, so start
/// error decays), solve the candidate so the heights match at the station,
/// and report the flux mismatch there as the contact defect.  On the true
/// profile both pieces lie on one orbit and the defect is at integration-
/// noise level; at a wrong beta it is order one.
struct OracleResult {
    double xi0_candidate = 0;    ///< contact radius solved by the two-sided match
    double contact_defect = 0;   ///< normalized flux mismatch at the matching station
    double defect_tolerance = 0; ///< pass bound for contact_defect
    double xi_match = 0;         ///< matching station (descent past the crest)
    bool matched = false;        ///< backward family bracketed the forward orbit
    bool start_robust = true;    ///< halving both start offsets moved xi0 by < 1e-5 relative
    double xi_peak = 0;
    double f_peak = 0;
    std::vector<ProfileSample> samples;  ///< edge piece then interface piece, ascending xi
};

/// Tunables of the physical oracle.
struct OracleOptions {
    double h_rel = 1e-6;        ///< edge start offset as a fraction of xi_star
    double interface_rel = 1e-3;///< backward start offset as a fraction of xi_0
    double station_frac = 0.85; ///< matching station: f reaches this fraction of the crest, rising
    double span_factor = 50;    ///< give up (blow-up) beyond span_factor * xi_star
    double rtol = 1e-10;
    double atol = 1e-14;
    /// The first stretch of the backward march is stiff: an explicit stepper
    /// is pinned to h ~ 1/lambda with lambda = beta xi / (m f^{m-1}), and the
    /// step count to leave the contact zone grows as the start offset
    /// shrinks.  When the predicted count exceeds this budget the offset is
    /// deepened just enough to meet it; the extra start truncation decays
    /// under the backward contraction.
    double crawl_budget = 5e4;
};

namespace detail {

/// Right-hand side of the profile equation as a first-order system in
/// y = (f, (f^m)').
template <class P>
struct PhysicalRhs {
    const P& p;
    double beta, alpha;
    Vec2 operator()(double xi, const Vec2& y) const {
        const double f = std::max(y[0], 1e-300);
        const double fp = y[1] / (p.m * std::pow(f, p.m - 1.0));
        return {fp, -(p.N - 1.0) * y[1] / xi - alpha * y[0] + beta * xi * fp +
                        std::pow(xi, p.sigma) * pow_pos(y[0], p.q)};
    }
};

/// Forward edge piece: state at the matching station plus crest data.
struct EdgeShot {
    bool reached = false;  ///< crested, so the rising-side station exists
    double xi_m = 0;       ///< station: f first reaches station_frac * f_peak
    Vec2 ym{};             ///< state at the station
    double xi_peak = 0, f_peak = 0;
    double xi_end = 0;     ///< where the shot stopped tracking (crossed or turned back up)
    std::vector<ProfileSample> samples;  ///< start .. station
};

inline double dfm1_of(const Parameters& p, double f, double P) {
    return (p.m - 1.0) * P / (p.m * std::max(f, 1e-300));
}

/// Initial state of the left-edge series start.  The two-term series
/// f = (kappa x)^{1/(m-1)} (1 + B x^{1/nu}) keeps the start error at the
/// x^{min(2/nu,1)} order, well below the integration tolerance budget at the
/// default offset.
inline void edge_series_start(const Parameters& p, double beta, double xi_star, double x0,
                              Vec2& y0) {
    const double kappa = (p.m - 1.0) * beta * xi_star / p.m;
    const double inu = 1.0 / p.nu;
    const double im1 = 1.0 / (p.m - 1.0);
    const double e = p.m * im1 + inu;
    const double B = std::pow(xi_star, p.sigma) * std::pow(kappa, (p.q - 1.0) * im1 - 1.0) /
                     (p.m * (e * (e - 1.0) - (im1 + inu) * im1));
    const double lead = std::pow(kappa * x0, im1);
    const double f0 = lead * (1.0 + B * std::pow(x0, inu));
    const double fp0 = lead * (im1 / x0 + B * (im1 + inu) * std::pow(x0, inu - 1.0));
    y0 = {f0, p.m * std::pow(f0, p.m - 1.0) * fp0};
}

inline double dense_bisect(const DenseCoef& dc, double ga, auto&& g) {
    double ta = 0.0, tb = 1.0;
    for (int it = 0; it < 200 && std::abs(tb - ta) > 1e-14; ++it) {
        const double tm = 0.5 * (ta + tb);
        const double gm = g(dc.eval(tm));
        if ((ga < 0) == (gm < 0)) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
    }
    return 0.5 * (ta + tb);
}

/// Shoot forward from the left-edge series start.  Pass 1 finds the crest
/// and tracks the descent until the orbit stops shadowing the profile
/// (turns back up or crosses zero) — in fixed precision the descent always
/// ends strictly short of the contact point.  Pass 2 re-integrates to the
/// matching station on the RISING side (f = station_frac * f_peak), chosen
/// there because it sits far from the departure point: the departing mode's
/// contamination at the station is exponentially small.
inline EdgeShot edge_shot(const Parameters& p, double beta, double xi_star, double h_rel,
                          const OracleOptions& opt, bool keep_samples) {
    const double alpha = 2.0 * beta / (p.m - 1.0);
    const PhysicalRhs<Parameters> rhs{p, beta, alpha};
    const double x0 = xi_star * h_rel;
    Vec2 y0;
    edge_series_start(p, beta, xi_star, x0, y0);
    const double xi_max = opt.span_factor * xi_star;

    EdgeShot out;
    out.f_peak = y0[0];
    out.xi_peak = xi_star + x0;

    {  // pass 1: crest, then end of the tracked descent
        Dopri5<PhysicalRhs<Parameters>> st(rhs, {opt.rtol, opt.atol, 1e-9, 0.05 * xi_star});
        st.start(xi_star + x0, y0, +1.0);
        bool past_peak = false;
        for (long n = 0;; ++n) {
            if (n >= 2'000'000)
                throw BlowUpError("In deadcore::oracle_shoot_physical: step budget exhausted");
            const Vec2 yprev = st.y();
            if (!st.step(xi_max)) {
                // Step underflow: the orbit is crashing into f = 0, where the
                // slope stiffens without bound.  Before the crest that is a
                // zero crossing; after it, the downward flavor of departure.
                if (!past_peak) return out;
                out.xi_end = st.zeta();
                out.reached = true;
                break;
            }
            const Vec2& y = st.y();
            const DenseCoef& dc = st.last_dense();
            if (!past_peak) {
                if (y[0] > out.f_peak) {
                    out.f_peak = y[0];
                    out.xi_peak = st.zeta();
                }
                if (yprev[1] > 0 && y[1] <= 0) {  // crest: flux crosses zero downward
                    const double t = dense_bisect(dc, yprev[1], [](const Vec2& v) { return v[1]; });
                    out.f_peak = dc.eval(t)[0];
                    out.xi_peak = dc.zeta0 + t * dc.h;
                    past_peak = true;
                }
                if (y[0] <= 0) return out;  // crossed zero before any crest: reached stays false
            } else {
                if ((yprev[1] < 0 && y[1] >= 0) || y[0] <= 0) {  // turned back up or crossed
                    out.xi_end = st.zeta();
                    out.reached = true;
                    break;
                }
            }
            if (st.zeta() >= xi_max * (1.0 - 1e-12)) {
                if (!past_peak)
                    throw BlowUpError(
                        "In deadcore::oracle_shoot_physical: f grows without returning to 0 by xi = " +
                        std::to_string(xi_max));
                out.xi_end = st.zeta();  // still descending at the span cap
                out.reached = true;
                break;
            }
        }
    }

    // pass 2: stop at the rising-side station
    const double target = opt.station_frac * out.f_peak;
    Dopri5<PhysicalRhs<Parameters>> st(rhs, {opt.rtol, opt.atol, 1e-9, 0.05 * xi_star});
    st.start(xi_star + x0, y0, +1.0);
    if (keep_samples) out.samples.push_back({xi_star + x0, y0[0], dfm1_of(p, y0[0], y0[1])});
    for (long n = 0; n < 2'000'000; ++n) {
        const Vec2 yprev = st.y();
        if (!st.step(xi_max))
            throw BlowUpError("In deadcore::oracle_shoot_physical: step underflow at xi = " +
                              std::to_string(st.zeta()));
        const Vec2& y = st.y();
        const DenseCoef& dc = st.last_dense();
        if (yprev[0] < target && y[0] >= target) {
            const double t =
                dense_bisect(dc, yprev[0] - target, [target](const Vec2& v) { return v[0] - target; });
            out.xi_m = dc.zeta0 + t * dc.h;
            out.ym = dc.eval(t);
            if (keep_samples) out.samples.push_back({out.xi_m, out.ym[0], dfm1_of(p, out.ym[0], out.ym[1])});
            return out;
        }
        if (keep_samples) out.samples.push_back({st.zeta(), y[0], dfm1_of(p, y[0], y[1])});
    }
    throw BlowUpError("In deadcore::oracle_shoot_physical: step budget exhausted");
}

/// Integrate backward from the contact law at candidate xi0 down to xi_m.
/// The mode that forward integration cannot hold is contracting in this
/// direction, so the start truncation decays instead of amplifying; the
/// adaptive stepper crawls through the stiff first stretch on its own.
/// Returns false if the orbit failed to reach xi_m positive.
inline bool interface_shot(const Parameters& p, double beta, double xi0, double xi_m,
                           double iface_rel, const OracleOptions& opt, Vec2& ym,
                           std::vector<ProfileSample>* samples) {
    const double alpha = 2.0 * beta / (p.m - 1.0);
    const PhysicalRhs<Parameters> rhs{p, beta, alpha};
    const double pexp = 1.0 / (1.0 - p.q);
    const double C = std::pow((1.0 - p.q) * std::pow(xi0, p.sigma - 1.0) / beta, pexp);

    // Deepen the start offset when the stiff-crawl step count at the
    // requested offset would exceed the budget; the count scales as
    // lambda(y1) * y1 / (3.3 r) with r = pexp (m - 1) - 1 > 0, so the
    // required factor has a closed form.  The budget grows as the requested
    // offset shrinks, keeping the offset-halving robustness probe honest
    // even when the clamp is active.
    double y1 = iface_rel * xi0;
    const double r = pexp * (p.m - 1.0) - 1.0;
    const auto crawl = [&](double off) {
        const double lam = beta * xi0 / (p.m * std::pow(C * std::pow(off, pexp), p.m - 1.0));
        return lam * off / (3.3 * r);
    };
    const double budget = opt.crawl_budget * (opt.interface_rel / iface_rel);
    if (crawl(y1) > budget) y1 *= std::pow(crawl(y1) / budget, 1.0 / r);
    if (!(xi0 - y1 > xi_m)) return false;  // no room between offset and station

    const double f0 = C * std::pow(y1, pexp);
    const double fp0 = -C * pexp * std::pow(y1, pexp - 1.0);
    const double P0 = p.m * std::pow(f0, p.m - 1.0) * fp0;

    Dopri5<PhysicalRhs<Parameters>> st(rhs, {opt.rtol, opt.atol, 1e-9, 0.05 * xi0});
    st.start(xi0 - y1, {f0, P0}, -1.0);
    if (samples) samples->push_back({xi0 - y1, f0, dfm1_of(p, f0, P0)});
    for (long n = 0; n < 2'000'000; ++n) {
        if (!st.step(xi_m)) return false;
        if (st.y()[0] <= 0) return false;
        if (samples) samples->push_back({st.zeta(), st.y()[0], dfm1_of(p, st.y()[0], st.y()[1])});
        if (st.zeta() <= xi_m * (1.0 + 1e-15)) {
            ym = st.y();
            return true;
        }
    }
    return false;
}

inline OracleResult oracle_single(const Parameters& p, double beta, double xi_star, double h_rel,
                                  double iface_rel, const OracleOptions& opt) {
    OracleResult res;
    res.defect_tolerance = 1e-4;  // ~10x the two-sided noise floor, ~10^3 below a 10% beta miss
    EdgeShot edge;
    try {
        edge = edge_shot(p, beta, xi_star, h_rel, opt, true);
    } catch (const BlowUpError&) {
        // Off the connection the edge orbit either crosses f = 0 before
        // cresting (the stepper underflows in the stiff approach) or grows
        // past the span cap; both mean no contact at this beta.
        res.contact_defect = 1.0;
        return res;
    }
    res.f_peak = edge.f_peak;
    res.xi_peak = edge.xi_peak;
    res.samples = std::move(edge.samples);
    if (!edge.reached) {  // never crested: maximal miss
        res.contact_defect = 1.0;
        return res;
    }
    res.xi_match = edge.xi_m;

    // Solve the candidate contact radius so the backward piece lands on the
    // forward height at the station; the landing height is increasing in xi0.
    auto height = [&](double xi0, Vec2& ym) {
        return interface_shot(p, beta, xi0, edge.xi_m, iface_rel, opt, ym, nullptr);
    };
    Vec2 ym{};
    double lo = edge.xi_m * (1.0 + 2.0 * iface_rel);
    double hi = lo;
    bool bracketed = false;
    for (int i = 0; i < 24; ++i) {
        hi *= 1.5;
        if (hi > 4.0 * opt.span_factor * xi_star) break;
        if (height(hi, ym) && ym[0] > edge.ym[0]) {
            bracketed = true;
            break;
        }
        lo = hi;
    }
    if (!bracketed) {
        res.contact_defect = 1.0;
        return res;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (height(mid, ym) && ym[0] > edge.ym[0])
            hi = mid;
        else
            lo = mid;
    }
    res.xi0_candidate = 0.5 * (lo + hi);
    res.matched = true;

    std::vector<ProfileSample> back;
    if (!interface_shot(p, beta, res.xi0_candidate, edge.xi_m, iface_rel, opt, ym, &back)) {
        res.contact_defect = 1.0;
        res.matched = false;
        return res;
    }
    const double scale = std::max({std::abs(edge.ym[1]), std::abs(ym[1]), 1e-8});
    res.contact_defect = std::abs(ym[1] - edge.ym[1]) / scale;
    std::reverse(back.begin(), back.end());
    if (!back.empty() && !res.samples.empty() && back.front().xi <= res.samples.back().xi)
        back.erase(back.begin());
    res.samples.insert(res.samples.end(), back.begin(), back.end());
    return res;
}

}  // namespace detail

/// Integrate the profile equation directly in physical variables and measure
/// how cleanly an edge-started orbit and a contact-law orbit meet in the
/// middle — the anti-circularity cross-check of the phase-plane path.  Runs
/// at the given start offsets and at half of them; returns the finer run with
/// start_robust reporting their agreement.
inline OracleResult oracle_shoot_physical(const Parameters& p, double beta, double xi_star,
                                          const OracleOptions& opt = {}) {
    if (!(beta > 0) || !(xi_star > 0))
        throw RegimeError("In deadcore::oracle_shoot_physical: beta and xi_star must be positive");
    const OracleResult coarse =
        detail::oracle_single(p, beta, xi_star, opt.h_rel, opt.interface_rel, opt);
    OracleResult fine =
        detail::oracle_single(p, beta, xi_star, 0.5 * opt.h_rel, 0.5 * opt.interface_rel, opt);
    fine.start_robust =
        fine.matched == coarse.matched &&
        (!fine.matched || std::abs(fine.xi0_candidate - coarse.xi0_candidate) <=
                              1e-5 * std::max(1.0, std::abs(fine.xi0_candidate)));
    return fine;
}

}  // namespace deadcore
