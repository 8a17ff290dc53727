// End-to-end regime solves and the executable certificate suite.
//
// solve_regime runs the whole pipeline for one (m, q, N): locate the three
// coupling thresholds, sweep the shooting maps across the admissible window,
// reconstruct the dead-core and origin-supported profiles, measure their
// boundary data, and cross-check against the physical-variable oracle.
// certify_regime turns the solved bundle into a deterministic, stably named
// list of pass/fail records; claims that rest on analysis outside this
// artifact's scope are reported Skipped, never silently dropped.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fields.hpp"
#include "integrate.hpp"
#include "params.hpp"
#include "profile.hpp"
#include "shoot.hpp"

namespace deadcore {

enum class CertStatus { Pass, Fail, Skipped };

inline const char* to_string(CertStatus s) {
    switch (s) {
        case CertStatus::Pass:    return "Pass";
        case CertStatus::Fail:    return "Fail";
        case CertStatus::Skipped: return "Skipped";
    }
    return "?";
}

/// One verifiable claim.  When measured, expected, and tolerance are all
/// present, Pass requires |measured - expected| <= tolerance.
struct Certificate {
    std::string name;
    CertStatus status = CertStatus::Skipped;
    std::optional<double> measured;
    std::optional<double> expected;
    std::optional<double> tolerance;
    std::string detail;
};

/// Tolerances of the certificate suite (data, not code).
struct CertifyTolerances {
    double left_slope_rel = 0.01;       ///< dead-core edge slope vs (m-1) beta xi_star / m
    double interface_coeff_rel = 0.02;  ///< contact coefficient vs its closed form
    double origin_coeff_rel = 0.01;     ///< origin coefficient vs its closed form
    double ode_residual = 1e-3;         ///< max relative interior residual
    double oracle_xi0_rel = 0.005;      ///< interface agreement between the two solution paths
    double oracle_f_rel = 0.005;        ///< pointwise f agreement (relative to the peak)
    double strict_floor = 1e-6;         ///< strict sweep monotonicity applies where values exceed 1 + this
    double weak_slack = 1e-9;           ///< numerical slack for the weak monotonicity comparisons
};

/// Tunables of a full regime solve.
struct SolveConfig {
    double bracket_tol = 1e-8;        ///< relative width target for all three threshold brackets
    int sweep_points = 32;            ///< monotonicity grid size
    double grid_inset_rel = 1e-3;     ///< sweep grid insets, relative, from the K0/KInf brackets
    double origin_beta_factor = 2.0;  ///< origin-supported solve runs at this multiple of beta0
    ShootConfig shoot;
    ReconstructOptions recon;
    OracleOptions oracle;
    CertifyTolerances tol;
};

/// Everything one regime solve produces.
struct RegimeBundle {
    Parameters params;
    KStarResult connection;  ///< K* bracket plus the K0/KInf sub-brackets
    KBeta kstar;             ///< exponents at the K* bracket midpoint
    KBeta beta0;             ///< exponents at the K0 bracket midpoint
    double k_u = 0, k_f = 0, k_s = 0;  ///< closed-form interior-point classification thresholds
    std::vector<double> grid;
    std::vector<SweepRow> rows;
    Trajectory l1, l0;          ///< connection half-orbits at the K* midpoint
    Profile dead_core;          ///< normalized LeftEdgeAtOne
    BoundaryReport dead_report;
    OracleResult oracle;        ///< physical-variable shot at beta*, from xi_star = 1
    KBeta origin_kb;            ///< regime of the origin-supported solve
    Trajectory l0_origin;
    Profile origin;             ///< normalized InterfaceAtOne
    BoundaryReport origin_report;
};

/// Solve one regime end to end.
inline RegimeBundle solve_regime(const Parameters& p, const SolveConfig& cfg = {}) {
    RegimeBundle b;
    b.params = p;
    b.connection = find_kstar(p, cfg.bracket_tol, cfg.shoot);
    b.kstar = b.connection.kbeta;
    b.beta0 = beta_from_k(p, b.connection.k0.mid());
    const Q2Classification cls = classify_q2(p, 1.0);
    b.k_u = cls.K_u;
    b.k_f = cls.K_f;
    b.k_s = cls.K_s;

    b.grid = detail::log_grid(b.connection.k0.hi * (1.0 + cfg.grid_inset_rel),
                              b.connection.kinf.lo * (1.0 - cfg.grid_inset_rel), cfg.sweep_points);
    b.rows = sweep(p, b.grid, cfg.shoot);

    b.l1 = shoot_u1(p, b.kstar.K, cfg.shoot).trajectory;
    b.l0 = shoot_u0(p, b.kstar.K, cfg.shoot).trajectory;
    b.dead_core = reconstruct_dead_core(p, b.kstar, b.l1, b.l0, cfg.recon);
    b.dead_report = ode_residual(p, b.kstar, b.dead_core);
    b.oracle = oracle_shoot_physical(p, b.kstar.beta, b.dead_core.xi_star, cfg.oracle);

    b.origin_kb = k_from_beta(p, cfg.origin_beta_factor * b.beta0.beta);
    b.l0_origin = shoot_u0(p, b.origin_kb.K, cfg.shoot).trajectory;
    b.origin = reconstruct_origin(p, b.origin_kb, b.l0_origin, cfg.recon);
    b.origin_report = ode_residual(p, b.origin_kb, b.origin);
    return b;
}

namespace detail {

inline Certificate cert_bool(std::string name, bool ok, std::string detail) {
    Certificate c;
    c.name = std::move(name);
    c.status = ok ? CertStatus::Pass : CertStatus::Fail;
    c.detail = std::move(detail);
    return c;
}

inline Certificate cert_measured(std::string name, double measured, double expected, double tol,
                                 std::string detail) {
    Certificate c;
    c.name = std::move(name);
    c.measured = measured;
    c.expected = expected;
    c.tolerance = tol;
    c.status = std::abs(measured - expected) <= tol ? CertStatus::Pass : CertStatus::Fail;
    c.detail = std::move(detail);
    return c;
}

inline Certificate cert_skipped(std::string name, std::string detail) {
    Certificate c;
    c.name = std::move(name);
    c.status = CertStatus::Skipped;
    c.detail = std::move(detail);
    return c;
}

/// Numeric column value of a sweep entry: crossings by value, connections to
/// the interior point as 1, blow-down as +infinity; absent if inconclusive.
inline std::optional<double> column_value(const std::optional<ShootOutcome>& o) {
    if (!o) return std::nullopt;
    if (o->kind == OutcomeKind::BlowDownInfinite) return std::numeric_limits<double>::infinity();
    return *o->value;
}

}  // namespace detail

/// Run the certificate suite over a solved bundle.  The list is
/// deterministic: stable names, stable order, no data-dependent entries.
inline std::vector<Certificate> certify_regime(const Parameters& p, const RegimeBundle& b,
                                               const CertifyTolerances& tol = {}) {
    std::vector<Certificate> certs;
    const auto& k0 = b.connection.k0;
    const auto& kinf = b.connection.kinf;
    const auto& ks = b.connection.bracket;

    // 1. Threshold ordering.
    certs.push_back(detail::cert_bool(
        "ordering-k0-kstar-kinf", k0.hi < ks.lo && ks.hi < kinf.lo,
        "thresholds [" + std::to_string(k0.lo) + ", " + std::to_string(k0.hi) + "] < [" +
            std::to_string(ks.lo) + ", " + std::to_string(ks.hi) + "] < [" + std::to_string(kinf.lo) +
            ", " + std::to_string(kinf.hi) + "] as disjoint brackets"));

    // 2. The connection-to-interior-point threshold sits at or below the
    //    coupling where the interior point stops being an unstable node.
    {
        Certificate c = detail::cert_bool(
            "k0-below-node-threshold", k0.lo <= b.k_u * (1.0 + 1e-9),
            "the backward orbit can only reach the interior point while it is an unstable node");
        c.measured = k0.lo;
        c.expected = b.k_u;
        certs.push_back(std::move(c));
    }

    // 3. Exponent ordering, upper part.  The lower part needs the companion
    //    decreasing-profile analysis and is reported Skipped below.
    {
        Certificate c = detail::cert_bool(
            "beta-ordering-upper", b.kstar.beta < b.beta0.beta,
            "beta* < beta0 via the decreasing coupling-exponent map; this is the only part of the "
            "exponent ordering checkable within this artifact");
        c.measured = b.kstar.beta;
        c.expected = b.beta0.beta;
        certs.push_back(std::move(c));
    }
    certs.push_back(detail::cert_skipped(
        "beta-ordering-lower",
        "the lower exponent ordering compares beta* against the exponent of the radially "
        "non-increasing profile, which is constructed in companion work and out of scope here"));
    certs.push_back(detail::cert_skipped(
        "kinf-below-companion-threshold",
        "the coupling of the radially non-increasing profile lies beyond KInf; only K* < KInf is "
        "verified here because that profile's construction is out of scope"));

    // 4./5. Monotone sweep columns.
    {
        bool weak = true, strict = true;
        std::string det;
        for (std::size_t i = 1; i < b.rows.size(); ++i) {
            const auto a = detail::column_value(b.rows[i - 1].u1);
            const auto c = detail::column_value(b.rows[i].u1);
            if (!a || !c) continue;
            if (*c > *a * (1.0 + tol.weak_slack)) {
                weak = false;
                det = "increase at K = " + std::to_string(b.rows[i].K);
            }
            if (*a > 1.0 + tol.strict_floor && *c > 1.0 + tol.strict_floor && !(*c < *a)) {
                strict = false;
                det = "not strictly decreasing at K = " + std::to_string(b.rows[i].K);
            }
        }
        certs.push_back(detail::cert_bool(
            "sweep-u1-nonincreasing", weak && strict,
            det.empty() ? "forward crossing value nonincreasing in K, strictly where above 1" : det));
    }
    {
        bool weak = true, strict = true;
        std::string det;
        for (std::size_t i = 1; i < b.rows.size(); ++i) {
            const auto a = detail::column_value(b.rows[i - 1].u0);
            const auto c = detail::column_value(b.rows[i].u0);
            if (!a || !c) continue;
            if (*c < *a * (1.0 - tol.weak_slack)) {
                weak = false;
                det = "decrease at K = " + std::to_string(b.rows[i].K);
            }
            const bool both_finite = std::isfinite(*a) && std::isfinite(*c);
            if (both_finite && *a > 1.0 + tol.strict_floor && *c > 1.0 + tol.strict_floor && !(*c > *a)) {
                strict = false;
                det = "not strictly increasing at K = " + std::to_string(b.rows[i].K);
            }
        }
        certs.push_back(detail::cert_bool(
            "sweep-u0-nondecreasing", weak && strict,
            det.empty() ? "backward crossing value nondecreasing in K, strictly where above 1" : det));
    }

    // 6. Crossing-value contracts.
    {
        bool ok = true;
        std::string det = "crossings exceed 1, connections equal 1, blow-down only backward";
        for (const SweepRow& row : b.rows) {
            for (const auto* shot : {&row.u1, &row.u0}) {
                if (!*shot) {
                    ok = false;
                    det = "inconclusive shot at K = " + std::to_string(row.K);
                    continue;
                }
                const ShootOutcome& o = **shot;
                if (o.kind == OutcomeKind::Crossing && !(o.value && *o.value > 1.0)) {
                    ok = false;
                    det = "crossing at K = " + std::to_string(row.K) + " not above 1";
                }
                if (o.kind == OutcomeKind::ConvergedToQ2 && !(o.value && *o.value == 1.0)) {
                    ok = false;
                    det = "connection at K = " + std::to_string(row.K) + " not valued 1";
                }
            }
            if (row.u1 && row.u1->kind == OutcomeKind::BlowDownInfinite) {
                ok = false;
                det = "forward orbit blew down at K = " + std::to_string(row.K);
            }
        }
        certs.push_back(detail::cert_bool("crossing-value-contracts", ok, det));
    }

    // 7. Barrier ordering: the backward value sits below the forward value
    //    before the connection coupling and above it after.
    {
        bool ok = true;
        std::string det = "U0 < U1 below the connection coupling, U0 > U1 above it";
        for (const SweepRow& row : b.rows) {
            const auto u0 = detail::column_value(row.u0);
            const auto u1 = detail::column_value(row.u1);
            if (!u0 || !u1) continue;
            if (row.K <= ks.lo && !(*u0 < *u1)) {
                ok = false;
                det = "U0 >= U1 at K = " + std::to_string(row.K) + " below the connection";
            }
            if (row.K >= ks.hi && !(*u0 > *u1)) {
                ok = false;
                det = "U0 <= U1 at K = " + std::to_string(row.K) + " above the connection";
            }
        }
        certs.push_back(detail::cert_bool("barrier-ordering", ok, det));
    }

    // 8.-13. Boundary reports and residuals, both profiles.
    certs.push_back(detail::cert_measured(
        "deadcore-left-slope", b.dead_report.left_slope, b.dead_report.left_slope_expected,
        tol.left_slope_rel * std::abs(b.dead_report.left_slope_expected),
        "limit of (f^{m-1})' at the dead-core edge vs (m-1) beta xi_star / m"));
    certs.push_back(detail::cert_measured(
        "deadcore-interface-coefficient", b.dead_report.interface_coeff,
        b.dead_report.interface_coeff_expected,
        tol.interface_coeff_rel * std::abs(b.dead_report.interface_coeff_expected),
        "contact coefficient of (xi_0 - xi)^{1/(1-q)} vs its closed form"));
    certs.push_back(detail::cert_measured("deadcore-ode-residual", b.dead_report.ode_residual_max, 0.0,
                                          tol.ode_residual,
                                          "max relative interior residual of the profile equation"));
    certs.push_back(detail::cert_measured(
        "origin-interface-coefficient", b.origin_report.interface_coeff,
        b.origin_report.interface_coeff_expected,
        tol.interface_coeff_rel * std::abs(b.origin_report.interface_coeff_expected),
        "contact coefficient of the origin-supported profile vs its closed form"));
    {
        const double meas = b.origin_report.origin_coeff.value_or(0.0);
        const double expect = b.origin_report.origin_coeff_expected.value_or(1.0);
        certs.push_back(detail::cert_measured(
            "origin-coefficient", meas, expect, tol.origin_coeff_rel * std::abs(expect),
            "plateau of f / xi^{2/(m-1)} at the origin vs ((m-1)^2 / (2 m (N(m-1)+2)))^{1/(m-q)}"));
    }
    certs.push_back(detail::cert_measured("origin-ode-residual", b.origin_report.ode_residual_max, 0.0,
                                          tol.ode_residual,
                                          "max relative interior residual of the profile equation"));

    // 14.-16. Oracle cross-path agreement.
    certs.push_back(detail::cert_measured(
        "oracle-contact-defect", b.oracle.contact_defect, 0.0, b.oracle.defect_tolerance,
        "edge-started and contact-law orbits of the physical equation meet with matching flux"));
    certs.push_back(detail::cert_measured(
        "oracle-interface-agreement", b.oracle.xi0_candidate, b.dead_core.xi_0,
        tol.oracle_xi0_rel * b.dead_core.xi_0,
        "interface radius: physical-variable shot vs phase-plane reconstruction"));
    {
        Profile probe;
        probe.regime = b.kstar;
        probe.kind = ProfileKind::DeadCore;
        probe.xi_star = b.dead_core.xi_star;
        probe.xi_0 = b.oracle.xi0_candidate;
        probe.samples = b.oracle.samples;
        const double hi = std::min(b.dead_core.xi_0, b.oracle.xi0_candidate);
        double worst = 0;
        for (int j = 0; j < 20; ++j) {
            const double xi = b.dead_core.xi_star + (j + 0.5) / 20.0 * (hi - b.dead_core.xi_star);
            const double fr = profile_eval(p, b.dead_core, xi);
            const double fo = profile_eval(p, probe, xi);
            worst = std::max(worst, std::abs(fr - fo) / b.oracle.f_peak);
        }
        certs.push_back(detail::cert_measured(
            "oracle-profile-agreement", worst, 0.0, tol.oracle_f_rel,
            "largest peak-relative gap between the two solution paths at 20 interior radii"));
    }

    // 17. The backward-time vanishing surrogate: at any fixed x, once the
    //     similarity radius falls inside the core the solution is exactly 0.
    {
        const double x_fixed = 0.9 * b.dead_core.xi_star * std::exp(b.kstar.beta);
        bool ok = true;
        for (double t : {-1.0, -5.0, -10.0})
            ok = ok && selfsimilar_u(p, b.dead_core, t, x_fixed) == 0.0;
        certs.push_back(detail::cert_bool(
            "core-vanishing-surrogate", ok,
            "u(t, x) = e^{-alpha t} f(|x| e^{beta t}) is exactly 0 at x = " + std::to_string(x_fixed) +
                " for t in {-1, -5, -10}, a finite surrogate for vanishing as t -> -infinity"));
    }

    return certs;
}

}  // namespace deadcore
