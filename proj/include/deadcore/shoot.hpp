// Shooting maps over the coupling K and the bisection machinery on top of
// them.
//
//   U1(K) — trace the orbit leaving Q1 forward to its first v = 0 crossing
//           (value = u there, always > 1) or to convergence at Q2 (value 1).
//   U0(K) — trace the orbit into Q0 backward to its first v = 0 crossing,
//           to convergence at Q2 (value 1), or to blow-down (value infinite).
//
// U1 is nonincreasing and U0 nondecreasing in K, which makes three boundaries
// bisectable: K0 (U0 stops being 1), KInf (U0 becomes infinite), and the
// connection coupling KStar where U0 - U1 changes sign — the root that
// produces the dead-core profile.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fields.hpp"
#include "integrate.hpp"
#include "params.hpp"
#include "seeds.hpp"

namespace deadcore {

/// Thrown when a scan finds no classification change to bisect.
struct BracketingFailure : std::runtime_error {
    explicit BracketingFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a shot cannot be classified even after span widening.
struct InconclusiveError : std::runtime_error {
    explicit InconclusiveError(const std::string& what) : std::runtime_error(what) {}
};

/// How a single shot ended.
enum class OutcomeKind { Crossing, ConvergedToQ2, BlowDownInfinite };

inline const char* to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Crossing:         return "Crossing";
        case OutcomeKind::ConvergedToQ2:    return "ConvergedToQ2";
        case OutcomeKind::BlowDownInfinite: return "BlowDownInfinite";
    }
    return "?";
}

/// Result of one shooting-map evaluation.
///
/// `value` is the shooting value: u at the crossing (> 1), exactly 1 on
/// convergence to Q2, and disengaged (infinite) on blow-down — represented
/// explicitly as an empty optional, never as a sentinel float.
struct ShootOutcome {
    std::optional<double> value;
    OutcomeKind kind = OutcomeKind::Crossing;
    double zeta_event = 0;  ///< crossing location in trajectory time (Crossing only)
    Trajectory trajectory;  ///< retained for diagnostics and reconstruction
    bool richardson_converged = true;  ///< seed-offset halving reached agreement
};

/// A bisected classification boundary in K.
struct ThresholdBracket {
    double lo = 0;
    double hi = 0;
    double width = 0;  ///< hi - lo
    enum class Target { K0, KInf, KStar } target = Target::K0;

    double mid() const { return 0.5 * (lo + hi); }
};

/// Tunables shared by all shooting operations.
struct ShootConfig {
    double eps = seed_eps_default;  ///< initial seed offset
    bool richardson = true;         ///< halve eps until successive values agree
    double richardson_tol = 1e-6;   ///< relative agreement required between halvings
    double span = 400.0;            ///< initial trajectory-time budget (widened x4, twice, if needed)
    StopSpec stop;                  ///< detection thresholds (the flags are set per operation)
    IntegrateOptions integ;
};

namespace detail {

/// One un-verified shot of either map.
inline ShootOutcome single_shot(const Parameters& p, double K, Orbit orbit, double eps,
                                const ShootConfig& cfg) {
    const char* fn = orbit == Orbit::L1 ? "shoot_u1" : "shoot_u0";
    StopSpec stop = cfg.stop;
    stop.stop_on_vzero = true;
    stop.vzero_count = 1;
    stop.stop_on_q2 = true;
    stop.stop_on_q0 = false;
    stop.stop_on_blowdown = true;
    double span = cfg.span;
    double eps_eff = eps;
    IntegrateOptions integ = cfg.integ;
    if (orbit == Orbit::L0) {
        // The backward escape from a seed at u = eps crawls along the slow
        // (algebraic) direction of the phase-plane origin for ~ c1 nu / eps
        // time units, while the contracting transverse rate c1 caps explicit
        // steps near 3.3 / c1 (linear stability), so one shot costs about
        // c1^2 nu / (3.3 eps) steps.  The backward flow contracts onto the
        // orbit transversally, so any seed on the local manifold reproduces
        // the same orbit: clamp the seed scale upward at strong coupling
        // contrast (large c1) to keep a shot within a fixed step budget.
        const RegimeConstants rc = regime_constants(p, K);
        constexpr double step_budget = 4.0e5, eps_cap = 0.05;
        eps_eff = std::max(eps, std::min(rc.c1 * rc.c1 * p.nu / (3.3 * step_budget), eps_cap));
        span += 16.0 * rc.c1 * p.nu / eps_eff;
        integ.hmax = std::max(integ.hmax, span);
    }
    for (int widen = 0; widen < 3; ++widen) {
        stop.max_span = span;
        const Seed s = orbit == Orbit::L1 ? seed_l1(p, K, eps, std::max(eps, seed_eps_default))
                                          : seed_l0(p, K, eps_eff, std::max(eps_eff, seed_eps_default));
        Trajectory t = integrate(p, K, s, stop, integ);
        ShootOutcome out;
        switch (t.termination) {
            case TerminationKind::Event: {
                const Event& e = t.events.back();
                out.kind = OutcomeKind::Crossing;
                out.value = e.point.u;
                out.zeta_event = e.zeta;
                out.trajectory = std::move(t);
                return out;
            }
            case TerminationKind::ConvergedToQ2:
                out.kind = OutcomeKind::ConvergedToQ2;
                out.value = 1.0;
                out.zeta_event = t.zeta_end();
                out.trajectory = std::move(t);
                return out;
            case TerminationKind::BlowDown:
                if (orbit == Orbit::L1)
                    throw InconclusiveError(std::string("In deadcore::") + fn + ": unexpected blow-down at K = " +
                                            std::to_string(K) + " (the forward orbit never escapes)");
                out.kind = OutcomeKind::BlowDownInfinite;
                out.value.reset();
                out.trajectory = std::move(t);
                return out;
            case TerminationKind::SpanExhausted:
                span *= 4.0;  // widen and retry
                continue;
            default:
                throw InconclusiveError(std::string("In deadcore::") + fn + ": " +
                                        to_string(t.termination) + " at K = " + std::to_string(K));
        }
    }
    throw InconclusiveError(std::string("In deadcore::") + fn + ": unclassified after span widening at K = " +
                            std::to_string(K));
}

inline bool outcomes_agree(const ShootOutcome& a, const ShootOutcome& b, double tol) {
    if (a.kind != b.kind) return false;
    if (a.kind != OutcomeKind::Crossing) return true;
    return std::abs(*a.value - *b.value) <= tol * std::max(1.0, std::abs(*b.value));
}

/// Shot with seed-offset verification: halve eps until two successive
/// offsets give the same classification and value.
inline ShootOutcome verified_shot(const Parameters& p, double K, Orbit orbit, const ShootConfig& cfg) {
    double eps = cfg.eps;
    ShootOutcome prev = single_shot(p, K, orbit, eps, cfg);
    if (!cfg.richardson) return prev;
    while (eps * 0.5 >= seed_eps_floor) {
        eps *= 0.5;
        ShootOutcome next = single_shot(p, K, orbit, eps, cfg);
        if (outcomes_agree(prev, next, cfg.richardson_tol)) return next;
        prev = std::move(next);
    }
    prev.richardson_converged = false;
    return prev;
}

}  // namespace detail

/// Shooting value of the orbit leaving Q1 at coupling K.
inline ShootOutcome shoot_u1(const Parameters& p, double K, const ShootConfig& cfg = {}) {
    return detail::verified_shot(p, K, Orbit::L1, cfg);
}

/// Shooting value of the orbit into Q0 at coupling K.
inline ShootOutcome shoot_u0(const Parameters& p, double K, const ShootConfig& cfg = {}) {
    return detail::verified_shot(p, K, Orbit::L0, cfg);
}

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return g;
}

/// Scan a log grid for the first adjacency where pred flips true -> false,
/// widening the grid decade-by-decade when the flip is not inside; then
/// bisect to relative width <= tol.
template <class Pred>
ThresholdBracket bisect_boundary(const char* fn, Pred pred, double scan_lo, double scan_hi, double tol,
                                 ThresholdBracket::Target target) {
    double lo = scan_lo, hi = scan_hi;
    double blo = 0, bhi = 0;
    bool found = false;
    for (int widen = 0; widen <= 2 && !found; ++widen) {
        const std::vector<double> grid = log_grid(lo, hi, 32);
        bool prev = pred(grid.front());
        if (!prev) {
            lo /= 10.0;  // low class missing: extend downward
            continue;
        }
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const bool cur = pred(grid[i]);
            if (prev && !cur) {
                blo = grid[i - 1];
                bhi = grid[i];
                found = true;
                break;
            }
            prev = cur;
        }
        if (!found) hi *= 10.0;  // high class missing: extend upward
    }
    if (!found)
        throw BracketingFailure(std::string("In deadcore::") + fn +
                                ": no classification change on the scan grid [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    while (bhi - blo > tol * 0.5 * (bhi + blo)) {
        const double mid = 0.5 * (blo + bhi);
        if (pred(mid))
            blo = mid;
        else
            bhi = mid;
    }
    return {blo, bhi, bhi - blo, target};
}

}  // namespace detail

/// Bisect the coupling below which the backward orbit connects to Q2
/// (shooting value 1) instead of crossing v = 0.  `tol` is relative to the
/// bracket midpoint.
inline ThresholdBracket find_k0(const Parameters& p, double tol, const ShootConfig& cfg = {}) {
    const double K_u = classify_q2(p, 1.0).K_u;
    // "Connects without crossing v = 0" requires the interior point to be a
    // backward-stable node.  Above K_u it is a focus, and a converged spiral
    // crosses v = 0 on every turn (which is exactly why the connection
    // threshold cannot exceed K_u) even when the first crossing sits below
    // double-precision resolution, so such couplings classify as
    // non-connecting without a shot.
    auto pred = [&](double K) {
        return K <= K_u && shoot_u0(p, K, cfg).kind == OutcomeKind::ConvergedToQ2;
    };
    ThresholdBracket b =
        detail::bisect_boundary("find_k0", pred, K_u / 100.0, K_u * 100.0, tol, ThresholdBracket::Target::K0);
    if (b.lo > K_u * (1.0 + 1e-9))
        throw BracketingFailure("In deadcore::find_k0: bracket [" + std::to_string(b.lo) + ", " +
                                std::to_string(b.hi) + "] exceeds the node threshold " + std::to_string(K_u));
    return b;
}

/// Bisect the coupling above which the backward orbit blows down
/// (shooting value infinite).  `tol` is relative to the bracket midpoint.
inline ThresholdBracket find_kinf(const Parameters& p, double tol, const ShootConfig& cfg = {}) {
    const double K_u = classify_q2(p, 1.0).K_u;
    auto pred = [&](double K) { return shoot_u0(p, K, cfg).kind != OutcomeKind::BlowDownInfinite; };
    return detail::bisect_boundary("find_kinf", pred, K_u / 100.0, K_u * 100.0, tol,
                                   ThresholdBracket::Target::KInf);
}

/// Root bracket of the connection coupling together with the exponent pair
/// it maps to, plus the monotonicity diagnostic of the probed difference
/// D(K) = U0(K) - U1(K).
struct KStarResult {
    ThresholdBracket bracket;
    KBeta kbeta;                    ///< at the bracket midpoint
    bool monotone_warning = false;  ///< probe signs inconsistent with monotone D (never expected)
    ThresholdBracket k0;            ///< the sub-solves, retained for reporting
    ThresholdBracket kinf;
};

/// Locate the connection coupling: the sign change of D(K) = U0(K) - U1(K)
/// between the two boundary brackets (inset by 10x their widths, where shots
/// degenerate into long transients).  D < 0 near K0 and D -> +infinity near
/// KInf; monotonicity of both maps makes the sign change unique.
inline KStarResult find_kstar(const Parameters& p, double tol, const ShootConfig& cfg = {}) {
    KStarResult r;
    r.k0 = find_k0(p, tol, cfg);
    r.kinf = find_kinf(p, tol, cfg);

    auto D = [&](double K) -> double {
        const ShootOutcome u0 = shoot_u0(p, K, cfg);
        if (u0.kind == OutcomeKind::BlowDownInfinite) return std::numeric_limits<double>::infinity();
        const ShootOutcome u1 = shoot_u1(p, K, cfg);
        return *u0.value - *u1.value;
    };

    double lo = r.k0.hi + 10.0 * r.k0.width;
    double hi = r.kinf.lo - 10.0 * r.kinf.width;
    std::vector<std::pair<double, double>> probes;
    auto probe = [&](double K) {
        const double d = D(K);
        probes.emplace_back(K, d);
        return d;
    };
    if (!(lo < hi))
        throw BracketingFailure("In deadcore::find_kstar: boundary brackets leave no interior interval");
    if (probe(lo) >= 0.0)
        throw BracketingFailure("In deadcore::find_kstar: difference not negative at K = " + std::to_string(lo) +
                                " just above the lower boundary");
    if (probe(hi) <= 0.0)
        throw BracketingFailure("In deadcore::find_kstar: difference not positive at K = " + std::to_string(hi) +
                                " just below the upper boundary");
    while (hi - lo > tol * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    r.bracket = {lo, hi, hi - lo, ThresholdBracket::Target::KStar};
    r.kbeta = beta_from_k(p, r.bracket.mid());

    // Monotonicity diagnostic: sorted by K, no negative may follow a
    // nonnegative.  (All probes collected during bisection participate.)
    std::sort(probes.begin(), probes.end());
    bool seen_nonneg = false;
    for (const auto& [K, d] : probes) {
        if (d >= 0.0)
            seen_nonneg = true;
        else if (seen_nonneg)
            r.monotone_warning = true;
    }
    return r;
}

/// One row of a K sweep; empty outcomes mean the shot was inconclusive.
struct SweepRow {
    double K = 0;
    std::optional<ShootOutcome> u0, u1;
    NodeKind q2_kind = NodeKind::UnstableNode;
};

/// Evaluate both shooting maps and the interior-point classification over an
/// ascending grid.  Inconclusive shots are recorded per row, never aborting.
///
/// Rows are independent pure computations, so they are distributed over a
/// small thread pool; assembly is by grid index, making the result identical
/// to the sequential order regardless of scheduling.
inline std::vector<SweepRow> sweep(const Parameters& p, const std::vector<double>& k_grid,
                                   const ShootConfig& cfg = {}) {
    std::vector<SweepRow> rows(k_grid.size());
    std::atomic<std::size_t> next{0};
    const std::size_t nthreads = std::max<std::size_t>(
        1, std::min<std::size_t>(std::thread::hardware_concurrency(), k_grid.size()));
    std::vector<std::exception_ptr> errors(nthreads);
    auto worker = [&](std::size_t slot) {
        try {
            for (std::size_t i; (i = next.fetch_add(1)) < k_grid.size();) {
                SweepRow row;
                row.K = k_grid[i];
                row.q2_kind = classify_q2(p, row.K).kind;
                try {
                    row.u0 = shoot_u0(p, row.K, cfg);
                } catch (const InconclusiveError&) {
                }
                try {
                    row.u1 = shoot_u1(p, row.K, cfg);
                } catch (const InconclusiveError&) {
                }
                rows[i] = std::move(row);
            }
        } catch (...) {
            errors[slot] = std::current_exception();
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (std::thread& th : pool) th.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

/// Trajectory-time location where the (monotone) u coordinate of a traced
/// orbit reaches the given value; used for matched-abscissa comparisons.
inline double zeta_where_u(const Trajectory& t, double u_target) {
    const auto& s = t.samples;
    if (s.size() < 2) throw RangeError("In deadcore::zeta_where_u: trajectory has no interior");
    const bool increasing = s.back().point.u > s.front().point.u;
    const double ulo = increasing ? s.front().point.u : s.back().point.u;
    const double uhi = increasing ? s.back().point.u : s.front().point.u;
    if (u_target < ulo || u_target > uhi)
        throw RangeError("In deadcore::zeta_where_u: u = " + std::to_string(u_target) + " outside [" +
                         std::to_string(ulo) + ", " + std::to_string(uhi) + "]");
    // Locate the straddling segment, then bisect in zeta on the dense output.
    std::size_t a = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double u0 = s[i - 1].point.u, u1 = s[i].point.u;
        if ((u0 <= u_target && u_target <= u1) || (u1 <= u_target && u_target <= u0)) {
            a = i - 1;
            break;
        }
        if (i + 1 == s.size())
            throw RangeError("In deadcore::zeta_where_u: no straddling segment (u not monotone?)");
    }
    double za = s[a].zeta, zb = s[a + 1].zeta;
    double ga = interpolate(t, za).u - u_target;
    for (int it = 0; it < 200 && std::abs(zb - za) > 1e-13 * std::max(1.0, std::abs(zb)); ++it) {
        const double zm = 0.5 * (za + zb);
        const double gm = interpolate(t, zm).u - u_target;
        if ((ga < 0) == (gm < 0)) {
            za = zm;
            ga = gm;
        } else {
            zb = zm;
        }
    }
    return 0.5 * (za + zb);
}

}  // namespace deadcore
