// Physical reconstruction: profile shape against frozen anchors, boundary
// laws against their closed forms, interior residuals, normalization and
// rescaling, the self-similar evaluator, and the independent two-sided
// shooting oracle in physical variables.
//
// One process: the connection solve and both reconstructions are shared.

#include <gtest/gtest.h>

#include <cmath>

#include <deadcore/certify.hpp>

#include "oracles.hpp"

using namespace deadcore;

namespace {

struct Bundle {
    Parameters p;
    KStarResult conn;
    Trajectory l1, l0;
    Profile dead;
    BoundaryReport dead_rep;
    KBeta origin_kb;
    Profile origin;
    BoundaryReport origin_rep;
};

const Bundle& bundle() {
    static const Bundle b = [] {
        Bundle x;
        x.p = oracles::params_of(oracles::reference);
        x.conn = find_kstar(x.p, 1e-8);
        const double ks = x.conn.bracket.mid();
        x.l1 = shoot_u1(x.p, ks).trajectory;
        x.l0 = shoot_u0(x.p, ks).trajectory;
        x.dead = reconstruct_dead_core(x.p, x.conn.kbeta, x.l1, x.l0);
        x.dead_rep = ode_residual(x.p, x.conn.kbeta, x.dead);
        const double beta0 = beta_from_k(x.p, x.conn.k0.mid()).beta;
        x.origin_kb = k_from_beta(x.p, 2.0 * beta0);
        x.origin = reconstruct_origin(x.p, x.origin_kb, shoot_u0(x.p, x.origin_kb.K).trajectory);
        x.origin_rep = ode_residual(x.p, x.origin_kb, x.origin);
        return x;
    }();
    return b;
}

}  // namespace

TEST(DeadCore, ShapeMatchesTheFrozenAnchor) {
    const Profile& prof = bundle().dead;
    EXPECT_EQ(prof.kind, ProfileKind::DeadCore);
    EXPECT_EQ(prof.normalization, Normalization::LeftEdgeAtOne);
    EXPECT_DOUBLE_EQ(prof.xi_star, 1.0);
    EXPECT_NEAR(prof.xi_0, oracles::anchor::xi0_over_xistar,
                1e-5 * oracles::anchor::xi0_over_xistar);
    ASSERT_GT(prof.samples.size(), 1000u);
    for (std::size_t i = 1; i < prof.samples.size(); ++i)
        ASSERT_LT(prof.samples[i - 1].xi, prof.samples[i].xi) << "at " << i;
    for (const ProfileSample& s : prof.samples) {
        ASSERT_GE(s.f, 0.0);
        ASSERT_GE(s.xi, prof.xi_star);
        ASSERT_LE(s.xi, prof.xi_0);
    }
}

TEST(DeadCore, BoundaryLawsMatchTheirClosedForms) {
    const BoundaryReport& r = bundle().dead_rep;
    // Left edge: (f^{m-1})' tends to (m-1) beta xi_star / m.
    EXPECT_GT(r.left_slope_expected, 0.0);
    EXPECT_NEAR(r.left_slope, r.left_slope_expected, 0.01 * r.left_slope_expected);
    // Interface: f ~ C (xi_0 - xi)^{1/(1-q)} with C from the absorption balance.
    EXPECT_GT(r.interface_coeff_expected, 0.0);
    EXPECT_NEAR(r.interface_coeff, r.interface_coeff_expected, 0.02 * r.interface_coeff_expected);
    // No origin law on a dead-core profile.
    EXPECT_FALSE(r.origin_coeff.has_value());
}

TEST(DeadCore, InteriorResidualIsSmall) {
    EXPECT_LT(bundle().dead_rep.ode_residual_max, 1e-3);
    EXPECT_GT(bundle().dead_rep.ode_residual_max, 0.0);
}

TEST(DeadCore, FitsRecoverTheEdgeExponents) {
    const Parameters& p = bundle().p;
    const EdgeFit left = fit_left_edge(p, bundle().dead);
    EXPECT_NEAR(left.exponent, 1.0 / (p.m - 1.0), 0.02 / (p.m - 1.0));
    EXPECT_NEAR(left.edge, 1.0, 1e-4);
    const EdgeFit right = fit_interface(p, bundle().dead);
    EXPECT_NEAR(right.exponent, 1.0 / (1.0 - p.q), 0.02 / (1.0 - p.q));
    EXPECT_NEAR(right.edge, bundle().dead.xi_0, 1e-4 * bundle().dead.xi_0);
}

TEST(DeadCore, RescalingMapsSolutionsToSolutions) {
    const Parameters& p = bundle().p;
    const Profile scaled = rescaled(p, bundle().dead, 2.0);
    const double s = std::pow(2.0, 0.5 * (p.m - 1.0));
    EXPECT_NEAR(scaled.xi_star, s, 1e-12);
    EXPECT_NEAR(scaled.xi_0, s * bundle().dead.xi_0, 1e-10 * scaled.xi_0);
    // Still a solution of the same equation: the residual stays small
    // (the estimator tolerance doubles with the amplitude).
    const BoundaryReport rep = ode_residual(p, bundle().dead.regime, scaled);
    EXPECT_LT(rep.ode_residual_max, 2e-3);
    EXPECT_NEAR(rep.left_slope, s * bundle().dead_rep.left_slope, 1e-6 * rep.left_slope);
}

TEST(DeadCore, RenormalizationPreservesTheShape) {
    const Parameters& p = bundle().p;
    const Profile iface1 = renormalized(p, bundle().dead, Normalization::InterfaceAtOne);
    EXPECT_EQ(iface1.normalization, Normalization::InterfaceAtOne);
    EXPECT_DOUBLE_EQ(iface1.xi_0, 1.0);
    EXPECT_NEAR(iface1.xi_star * bundle().dead.xi_0, 1.0, 1e-10);
    const Profile back = renormalized(p, iface1, Normalization::LeftEdgeAtOne);
    EXPECT_NEAR(profile_eval(p, back, 4.0), profile_eval(p, bundle().dead, 4.0), 1e-10);
}

TEST(DeadCore, EvaluatorRespectsTheSupport) {
    const Parameters& p = bundle().p;
    const Profile& prof = bundle().dead;
    EXPECT_EQ(profile_eval(p, prof, 0.0), 0.0);
    EXPECT_EQ(profile_eval(p, prof, 0.5), 0.0);
    EXPECT_EQ(profile_eval(p, prof, prof.xi_0 + 1.0), 0.0);
    EXPECT_GT(profile_eval(p, prof, 4.0), 1.0);
    // Node-exact interpolation.
    const ProfileSample& mid = prof.samples[prof.samples.size() / 2];
    EXPECT_NEAR(profile_eval(p, prof, mid.xi), mid.f, 1e-12 * std::max(1.0, mid.f));
    // Continuous into the slivers between the edges and the first/last nodes.
    const double near_edge = 0.5 * (prof.xi_star + prof.samples.front().xi);
    EXPECT_GT(profile_eval(p, prof, near_edge), 0.0);
    EXPECT_LT(profile_eval(p, prof, near_edge), prof.samples.front().f);
}

TEST(DeadCore, SelfSimilarEvaluatorUsesTheExponents) {
    const Parameters& p = bundle().p;
    const Profile& prof = bundle().dead;
    for (double r : {2.0, 5.0}) {
        EXPECT_DOUBLE_EQ(selfsimilar_u(p, prof, 0.0, r), profile_eval(p, prof, r));
        const double t = 0.3;
        const double direct = std::exp(-prof.regime.alpha * t) *
                              profile_eval(p, prof, r * std::exp(prof.regime.beta * t));
        EXPECT_DOUBLE_EQ(selfsimilar_u(p, prof, t, r), direct);
    }
    // The core radius scales like e^{-beta t}: a radius inside the core at
    // t = 0 was inside it at every earlier time, and leaves it forward in
    // time once its rescaled coordinate enters the support.
    EXPECT_EQ(selfsimilar_u(p, prof, -1.0, 0.9), 0.0);
    EXPECT_GT(selfsimilar_u(p, prof, 1.0, 0.9), 0.0);
}

TEST(DeadCore, RejectsHalvesThatDoNotMeet) {
    // Away from the connection the two crossing heights differ by orders of
    // magnitude; the reconstruction must refuse to join them.
    const Parameters& p = bundle().p;
    const Trajectory l1 = shoot_u1(p, 0.3).trajectory;
    const Trajectory l0 = shoot_u0(p, 0.3).trajectory;
    EXPECT_THROW(reconstruct_dead_core(p, beta_from_k(p, 0.3), l1, l0), JunctionError);
}

TEST(Oracle, ConfirmsTheConnectionInPhysicalVariables) {
    const Bundle& b = bundle();
    const OracleResult o = oracle_shoot_physical(b.p, b.conn.kbeta.beta, 1.0);
    EXPECT_TRUE(o.matched);
    EXPECT_TRUE(o.start_robust);
    EXPECT_LT(o.contact_defect, o.defect_tolerance);
    // The oracle's interface agrees with the reconstructed one (both at
    // xi_star = 1) far inside the certificate tolerance.
    EXPECT_NEAR(o.xi0_candidate, b.dead.xi_0, 5e-3 * b.dead.xi_0);
    // And its crest agrees with the reconstructed profile pointwise.
    EXPECT_NEAR(profile_eval(b.p, b.dead, o.xi_peak), o.f_peak, 5e-3 * o.f_peak);
}

TEST(Oracle, RejectsOffConnectionExponents) {
    const Bundle& b = bundle();
    const OracleResult off = oracle_shoot_physical(b.p, 1.1 * b.conn.kbeta.beta, 1.0);
    EXPECT_GT(off.contact_defect, 10.0 * off.defect_tolerance);
}

TEST(OriginSupported, ProfileReachesTheOriginAndObeysItsLaw) {
    const Bundle& b = bundle();
    const Profile& prof = b.origin;
    EXPECT_EQ(prof.kind, ProfileKind::OriginSupported);
    EXPECT_EQ(prof.normalization, Normalization::InterfaceAtOne);
    EXPECT_DOUBLE_EQ(prof.xi_0, 1.0);
    EXPECT_DOUBLE_EQ(prof.xi_star, 0.0);
    ASSERT_GT(prof.samples.size(), 1000u);
    EXPECT_EQ(prof.samples.front().xi, 0.0);
    EXPECT_EQ(prof.samples.front().f, 0.0);

    const BoundaryReport& r = b.origin_rep;
    ASSERT_TRUE(r.origin_coeff.has_value());
    ASSERT_TRUE(r.origin_coeff_expected.has_value());
    EXPECT_NEAR(*r.origin_coeff, *r.origin_coeff_expected, 0.01 * *r.origin_coeff_expected);
    EXPECT_NEAR(r.interface_coeff, r.interface_coeff_expected, 0.02 * r.interface_coeff_expected);
    EXPECT_LT(r.ode_residual_max, 1e-3);

    const EdgeFit at0 = fit_origin(b.p, prof);
    EXPECT_NEAR(at0.exponent, 2.0 / (b.p.m - 1.0), 0.02 * 2.0 / (b.p.m - 1.0));
}

TEST(OriginSupported, RejectsCouplingsAboveTheThreshold) {
    // At K* the backward orbit crosses v = 0 instead of connecting; the
    // origin reconstruction must refuse it.
    const Bundle& b = bundle();
    const Trajectory t = shoot_u0(b.p, b.conn.bracket.mid()).trajectory;
    EXPECT_THROW(reconstruct_origin(b.p, b.conn.kbeta, t), RegimeError);
}
