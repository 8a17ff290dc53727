// Adaptive integration of the rescaled planar field with dense output,
// event detection (sign changes of v and u), convergence detection at the
// two connection targets, and blow-down classification.
//
// The integrator is a Dormand-Prince 5(4) embedded pair with the classic
// quartic dense-output polynomial, PI step-size control, and first-same-as-
// last reuse.  Steps are accepted only if, in addition to the embedded error
// test, the stored samples support cubic Hermite interpolation to within the
// reporting tolerance (so consumers of the sample table can interpolate
// without access to the internal dense coefficients).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fields.hpp"
#include "params.hpp"
#include "seeds.hpp"

namespace deadcore {

/// Thrown by interpolate() for query times outside the trajectory span.
struct RangeError : std::out_of_range {
    explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

/// Located sign-change events along a trajectory.
enum class EventKind { VZero, UZero };

/// Why an integration stopped.
enum class TerminationKind { Event, ConvergedToQ2, ConvergedToQ0, BlowDown, SpanExhausted, StepUnderflow };

inline const char* to_string(EventKind k) { return k == EventKind::VZero ? "VZero" : "UZero"; }

inline const char* to_string(TerminationKind t) {
    switch (t) {
        case TerminationKind::Event:         return "Event";
        case TerminationKind::ConvergedToQ2: return "ConvergedToQ2";
        case TerminationKind::ConvergedToQ0: return "ConvergedToQ0";
        case TerminationKind::BlowDown:      return "BlowDown";
        case TerminationKind::SpanExhausted: return "SpanExhausted";
        case TerminationKind::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

/// An event located by bisection on the dense output.
struct Event {
    EventKind kind = EventKind::VZero;
    double zeta = 0;
    PhasePoint point;
};

/// One stored integration node.
struct TrajectorySample {
    double zeta = 0;
    PhasePoint point;
};

namespace detail {

using Vec2 = std::array<double, 2>;

/// Dense-output coefficients of one accepted step [zeta0, zeta0 + h].
struct DenseCoef {
    double zeta0 = 0, h = 0;
    Vec2 r1{}, r2{}, r3{}, r4{}, r5{};

    Vec2 eval(double theta) const {
        const double th1 = 1.0 - theta;
        Vec2 out;
        for (int i = 0; i < 2; ++i)
            out[i] = r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
        return out;
    }
};

/// Dormand-Prince 5(4) stepper for a 2-component system.
///
/// RHS signature: Vec2(double zeta, const Vec2& y).  Integration runs in the
/// physical independent variable with a signed step (negative for backward
/// traces).  step() advances exactly one accepted step, never past the given
/// limit; rewind() undoes the most recent accepted step (one level deep, used
/// to split steps at the u = 0 kink).
template <class RHS>
class Dopri5 {
  public:
    struct Options {
        double rtol = 1e-10;
        double atol = 1e-12;
        double interp_tol = 1e-9;  ///< cubic-Hermite fidelity of stored samples
        double hmax = 1.0;
    };

    Dopri5(RHS rhs, Options opt) : f_(rhs), opt_(opt) {}

    void start(double zeta0, Vec2 y0, double dir) {
        zeta_ = zeta0;
        y_ = y0;
        dir_ = dir;
        k1_ = f_(zeta_, y_);
        facold_ = 1e-4;
        rejected_ = false;
        h_ = initial_step();
        n_accepted_ = n_rejected_ = 0;
    }

    double zeta() const { return zeta_; }
    const Vec2& y() const { return y_; }
    const Vec2& deriv() const { return k1_; }  ///< field value at the current point
    const DenseCoef& last_dense() const { return dense_; }
    long accepted() const { return n_accepted_; }
    long rejected() const { return n_rejected_; }

    /// Advance one accepted step, not past zeta_limit.  Returns false on
    /// step-size underflow (state unchanged).
    bool step(double zeta_limit) {
        constexpr double uround = 2.3e-16;
        double h = dir_ * std::min(std::abs(h_), opt_.hmax);
        for (int attempt = 0; attempt < 200; ++attempt) {
            // Land exactly on the limit when it is within reach.
            bool clipped = false;
            if ((zeta_ + 1.01 * h - zeta_limit) * dir_ > 0.0) {
                h = zeta_limit - zeta_;
                clipped = true;
            }
            if (0.1 * std::abs(h) <= uround * std::max(1.0, std::abs(zeta_))) return false;

            // Stages (k1 carried over: first-same-as-last).
            Vec2 k2, k3, k4, k5, k6, k7, yt, y1;
            auto axpy = [](Vec2& out, const Vec2& y, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
                for (int i = 0; i < 2; ++i) {
                    double s = 0;
                    for (const auto& t : terms) s += t.first * (*t.second)[i];
                    out[i] = y[i] + h * s;
                }
            };
            axpy(yt, y_, h, {{1.0 / 5, &k1_}});
            k2 = f_(zeta_ + h / 5, yt);
            axpy(yt, y_, h, {{3.0 / 40, &k1_}, {9.0 / 40, &k2}});
            k3 = f_(zeta_ + 3 * h / 10, yt);
            axpy(yt, y_, h, {{44.0 / 45, &k1_}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}});
            k4 = f_(zeta_ + 4 * h / 5, yt);
            axpy(yt, y_, h,
                 {{19372.0 / 6561, &k1_}, {-25360.0 / 2187, &k2}, {64448.0 / 6561, &k3}, {-212.0 / 729, &k4}});
            k5 = f_(zeta_ + 8 * h / 9, yt);
            axpy(yt, y_, h,
                 {{9017.0 / 3168, &k1_}, {-355.0 / 33, &k2}, {46732.0 / 5247, &k3}, {49.0 / 176, &k4},
                  {-5103.0 / 18656, &k5}});
            k6 = f_(zeta_ + h, yt);
            axpy(y1, y_, h,
                 {{35.0 / 384, &k1_}, {500.0 / 1113, &k3}, {125.0 / 192, &k4}, {-2187.0 / 6784, &k5},
                  {11.0 / 84, &k6}});
            k7 = f_(zeta_ + h, y1);

            // Embedded error estimate.
            double err = 0;
            Vec2 ee;
            for (int i = 0; i < 2; ++i) {
                ee[i] = h * (71.0 / 57600 * k1_[i] - 71.0 / 16695 * k3[i] + 71.0 / 1920 * k4[i] -
                             17253.0 / 339200 * k5[i] + 22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
                const double sk = opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(y1[i]));
                err += (ee[i] / sk) * (ee[i] / sk);
            }
            err = std::sqrt(0.5 * err);

            // Dense coefficients of the candidate step.
            DenseCoef dc;
            dc.zeta0 = zeta_;
            dc.h = h;
            for (int i = 0; i < 2; ++i) {
                const double ydiff = y1[i] - y_[i];
                const double bspl = h * k1_[i] - ydiff;
                dc.r1[i] = y_[i];
                dc.r2[i] = ydiff;
                dc.r3[i] = bspl;
                dc.r4[i] = ydiff - h * k7[i] - bspl;
                dc.r5[i] = h * (-12715105075.0 / 11282082432 * k1_[i] + 87487479700.0 / 32700410799 * k3[i] -
                                10690763975.0 / 1880347072 * k4[i] + 701980252875.0 / 199316789632 * k5[i] -
                                1453857185.0 / 822651844 * k6[i] + 69997945.0 / 29380423 * k7[i]);
            }

            // Cubic-Hermite fidelity of the stored endpoints at the midpoint.
            double err_interp = 0;
            {
                const Vec2 mid = dc.eval(0.5);
                for (int i = 0; i < 2; ++i) {
                    const double herm = 0.5 * (y_[i] + y1[i]) + 0.125 * h * (k1_[i] - k7[i]);
                    const double sk = opt_.interp_tol * (1.0 + std::max(std::abs(y_[i]), std::abs(y1[i])));
                    err_interp = std::max(err_interp, std::abs(mid[i] - herm) / sk);
                }
            }

            // A stage that left the domain (f clipped at 0, division blown
            // up) poisons the estimates with non-finite values; treat that as
            // a hard reject so the NaN cannot masquerade as a zero error.
            if (!std::isfinite(err) || !std::isfinite(err_interp)) {
                ++n_rejected_;
                rejected_ = true;
                h *= 0.1;
                continue;
            }

            constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
            constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
            const double fac11 = std::pow(std::max(err, 1e-32), expo1);
            if (err <= 1.0 && err_interp <= 1.0) {
                // Accept.
                double fac = fac11 / std::pow(facold_, beta);
                fac = std::max(facc2, std::min(facc1, fac / safe));
                double hnew = h / fac;
                if (err_interp > 0.5) hnew = std::min(std::abs(hnew), std::abs(h)) * dir_;
                if (rejected_) hnew = dir_ * std::min(std::abs(hnew), std::abs(h));
                facold_ = std::max(err, 1e-4);
                rejected_ = false;
                prev_zeta_ = zeta_;
                prev_y_ = y_;
                prev_k1_ = k1_;
                prev_h_ = h_;
                zeta_ = clipped ? zeta_limit : zeta_ + h;
                y_ = y1;
                k1_ = k7;
                h_ = hnew;
                dense_ = dc;
                have_prev_ = true;
                ++n_accepted_;
                return true;
            }
            // Reject and shrink: embedded failure uses the PI formula, the
            // interpolation-fidelity failure a quartic-order shrink.
            ++n_rejected_;
            rejected_ = true;
            if (err > 1.0)
                h = h / std::min(facc1, fac11 / safe);
            else
                h = h * std::max(0.2, 0.9 * std::pow(err_interp, -0.25));
        }
        return false;
    }

    /// Undo the most recent accepted step (one level deep).
    void rewind() {
        if (!have_prev_) return;
        zeta_ = prev_zeta_;
        y_ = prev_y_;
        k1_ = prev_k1_;
        h_ = prev_h_;
        have_prev_ = false;
        --n_accepted_;
    }

  private:
    double initial_step() const {
        // Standard two-stage guess: balance |y|/|f| scales, then probe the
        // second derivative with one Euler step.
        double dnf = 0, dny = 0;
        for (int i = 0; i < 2; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
            dnf += (k1_[i] / sk) * (k1_[i] / sk);
            dny += (y_[i] / sk) * (y_[i] / sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, opt_.hmax);
        Vec2 y1;
        for (int i = 0; i < 2; ++i) y1[i] = y_[i] + dir_ * h * k1_[i];
        const Vec2 f1 = f_(zeta_ + dir_ * h, y1);
        double der2 = 0;
        for (int i = 0; i < 2; ++i) {
            const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
            der2 += ((f1[i] - k1_[i]) / sk) * ((f1[i] - k1_[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
        return std::min({100.0 * h, h1, opt_.hmax});
    }

    RHS f_;
    Options opt_;
    double zeta_ = 0, h_ = 0, dir_ = 1.0, facold_ = 1e-4;
    Vec2 y_{}, k1_{};
    bool rejected_ = false;
    DenseCoef dense_;
    double prev_zeta_ = 0, prev_h_ = 0;
    Vec2 prev_y_{}, prev_k1_{};
    bool have_prev_ = false;
    long n_accepted_ = 0, n_rejected_ = 0;
};

}  // namespace detail

/// An integrated orbit segment: nodes, located events, dense coefficients,
/// and the reason integration stopped.
struct Trajectory {
    KBeta regime;
    Direction direction = Direction::Forward;
    std::vector<TrajectorySample> samples;
    std::vector<Event> events;
    TerminationKind termination = TerminationKind::SpanExhausted;
    std::vector<detail::DenseCoef> dense;  ///< one segment per accepted step

    double zeta_begin() const { return samples.front().zeta; }
    double zeta_end() const { return samples.back().zeta; }
    const PhasePoint& end_point() const { return samples.back().point; }
};

/// Which conditions terminate an integration, and their thresholds.
///
/// Detections arm only once the trajectory has left the ball of radius
/// arm_radius around its seed's own critical point, so the seed's v ~ 0
/// (L0) or near-critical dwell cannot trigger them spuriously.
struct StopSpec {
    bool stop_on_vzero = false;     ///< stop at the vzero_count-th VZero event
    int vzero_count = 1;
    bool stop_on_uzero = false;     ///< UZero events are always recorded; optionally stop
    bool stop_on_q2 = false;        ///< proximity convergence to (1, 0)
    bool stop_on_q0 = false;        ///< proximity convergence to (0, 0)
    bool stop_on_blowdown = true;   ///< v escaping to -infinity
    double max_span = 400.0;        ///< |zeta - zeta_seed| budget
    double q2_tol = 1e-10;          ///< convergence: distance below tol, strictly decreasing
    double q0_tol = 1e-4;           ///< looser: the approach to (0,0) is algebraic
    double v_blow = 1e3;
    double u_cap = 1e9;             ///< unconditional blow-down beyond this u with v < 0
    double arm_radius = 1e-2;
};

/// Numerical knobs of the integrator.
struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double interp_tol = 1e-9;      ///< sample-table cubic interpolation fidelity
    double hmax = 1.0;
    double event_zeta_tol = 1e-10; ///< bisection accuracy for event locations
    long max_steps = 10'000'000;
};

namespace detail {

/// Bisect a dense segment for a zero of component `comp`, given a strict
/// sign change between theta_a and theta_b.
inline double bisect_dense(const DenseCoef& dc, int comp, double theta_a, double theta_b, double zeta_tol) {
    double ga = dc.eval(theta_a)[comp];
    const double dth = std::max(zeta_tol / std::max(std::abs(dc.h), 1e-300), 1e-15);
    for (int i = 0; i < 200 && std::abs(theta_b - theta_a) > dth; ++i) {
        const double tm = 0.5 * (theta_a + theta_b);
        const double gm = dc.eval(tm)[comp];
        if ((ga < 0) == (gm < 0)) {
            theta_a = tm;
            ga = gm;
        } else {
            theta_b = tm;
        }
    }
    return 0.5 * (theta_a + theta_b);
}

/// Scan a dense segment for a strict sign change of component `comp` in its
/// interior; returns true and the crossing theta if found.
inline bool find_sign_change(const DenseCoef& dc, int comp, double& theta_out, double zeta_tol) {
    constexpr int probes = 16;
    double ta = 0.0;
    double ga = dc.eval(ta)[comp];
    for (int k = 1; k <= probes; ++k) {
        const double tb = double(k) / probes;
        const double gb = dc.eval(tb)[comp];
        if (ga != 0.0 && gb != 0.0 && (ga < 0) != (gb < 0)) {
            theta_out = bisect_dense(dc, comp, ta, tb, zeta_tol);
            return true;
        }
        ta = tb;
        ga = gb;
    }
    return false;
}

inline double dist(PhasePoint a, PhasePoint b) { return std::hypot(a.u - b.u, a.v - b.v); }

}  // namespace detail

/// Integrate the rescaled field from a seed until a stop condition fires.
///
/// The independent variable starts at 0 and runs in the seed's direction
/// (negative for Backward).  All recorded samples are accepted-step
/// endpoints; events are located on the dense output and, when terminal,
/// become the final sample.
inline Trajectory integrate(const Parameters& p, double K, const Seed& seed, const StopSpec& stop,
                            const IntegrateOptions& opts = {}) {
    const RegimeConstants rc = regime_constants(p, K);
    auto rhs = [&p, &rc](double, const detail::Vec2& y) -> detail::Vec2 {
        const PhasePoint s = eval_S(p, rc, {y[0], y[1]});
        return {s.u, s.v};
    };
    const double dir = seed.direction == Direction::Forward ? 1.0 : -1.0;

    Trajectory t;
    t.regime = beta_from_k(p, K);
    t.direction = seed.direction;
    t.samples.reserve(1024);
    t.dense.reserve(1024);
    t.samples.push_back({0.0, seed.point});

    detail::Dopri5<decltype(rhs)> st(rhs, {opts.rtol, opts.atol, opts.interp_tol, opts.hmax});
    st.start(0.0, {seed.point.u, seed.point.v}, dir);

    const double span_end = dir * stop.max_span;
    const PhasePoint own_crit = seed.orbit == Orbit::L1 ? crit_Q1(p, rc) : crit_Q0();
    bool armed = stop.arm_radius <= 0.0 || detail::dist(seed.point, own_crit) > stop.arm_radius;

    // Trailing distance windows for the convergence detectors.
    std::array<double, 4> dq2{}, dq0{};
    int nq2 = 0, nq0 = 0;
    auto push_window = [](std::array<double, 4>& w, int& n, double d) {
        if (n < 4) {
            w[n++] = d;
        } else {
            w[0] = w[1];
            w[1] = w[2];
            w[2] = w[3];
            w[3] = d;
        }
    };
    auto window_fires = [](const std::array<double, 4>& w, int n, double tol) {
        if (n < 4 || w[3] >= tol) return false;
        return w[1] < w[0] && w[2] < w[1] && w[3] < w[2];
    };

    int vzero_seen = 0;
    // The cone ratio |v| c2 / u^nu separating escape from deep crossing dips:
    // descending arcs slide toward the separatrix ratio c_- c2 from below on
    // the crossing side and pass through it toward the attracting escape
    // ratio c_+ c2 on the blow-down side, where c_-+ are the roots of
    // m c^2/(m-1) - c2 c + 1 = 0 (real for every admissible regime).  A
    // threshold slightly above c_- c2 therefore fires exactly on escapes.
    const double c_minus =
        (p.m - 1.0) / (2.0 * p.m) *
        (rc.c2 - std::sqrt(std::max(0.0, rc.c2 * rc.c2 - 4.0 * p.m / (p.m - 1.0))));
    const double cone_threshold = 1.05 * c_minus * rc.c2;

    for (long n = 0; n < opts.max_steps; ++n) {
        if (!st.step(span_end)) {
            t.termination = (st.y()[1] < -stop.v_blow) ? TerminationKind::BlowDown : TerminationKind::StepUnderflow;
            return t;
        }
        const detail::DenseCoef& dc = st.last_dense();
        const PhasePoint prev = t.samples.back().point;
        PhasePoint cur{st.y()[0], st.y()[1]};

        // Split steps straddling the u = 0 kink: rewind and land on it.
        if (prev.u != 0.0 && cur.u != 0.0 && (prev.u < 0) != (cur.u < 0)) {
            const double theta_k = detail::bisect_dense(dc, 0, 0.0, 1.0, opts.event_zeta_tol);
            const double zeta_k = dc.zeta0 + theta_k * dc.h;
            st.rewind();
            bool under = false;
            while ((zeta_k - st.zeta()) * dir > opts.event_zeta_tol) {
                if (!st.step(zeta_k)) {
                    under = true;
                    break;
                }
                t.dense.push_back(st.last_dense());
                t.samples.push_back({st.zeta(), {st.y()[0], st.y()[1]}});
            }
            if (under) {
                t.termination = TerminationKind::StepUnderflow;
                return t;
            }
            cur = {st.y()[0], st.y()[1]};
            t.events.push_back({EventKind::UZero, st.zeta(), cur});
            if (stop.stop_on_uzero) {
                t.termination = TerminationKind::Event;
                return t;
            }
            continue;
        }

        t.dense.push_back(dc);
        t.samples.push_back({st.zeta(), cur});

        if (!armed && detail::dist(cur, own_crit) > stop.arm_radius) armed = true;
        if (!armed) {
            if (std::abs(st.zeta() - span_end) <= 1e-12 * std::max(1.0, std::abs(span_end))) {
                t.termination = TerminationKind::SpanExhausted;
                return t;
            }
            continue;
        }

        // VZero events: strict sign change across the committed step.
        if (prev.v != 0.0 && cur.v != 0.0 && (prev.v < 0) != (cur.v < 0)) {
            const double theta_e = detail::bisect_dense(dc, 1, 0.0, 1.0, opts.event_zeta_tol);
            const double zeta_e = dc.zeta0 + theta_e * dc.h;
            const detail::Vec2 ye = dc.eval(theta_e);
            const PhasePoint pe{ye[0], ye[1]};
            t.events.push_back({EventKind::VZero, zeta_e, pe});
            if (stop.stop_on_vzero && ++vzero_seen >= stop.vzero_count) {
                t.samples.back() = {zeta_e, pe};  // truncate at the event
                t.termination = TerminationKind::Event;
                return t;
            }
        }

        // Convergence to the connection targets.
        if (stop.stop_on_q2) {
            push_window(dq2, nq2, detail::dist(cur, crit_Q2()));
            if (window_fires(dq2, nq2, stop.q2_tol)) {
                t.termination = TerminationKind::ConvergedToQ2;
                return t;
            }
        }
        if (stop.stop_on_q0) {
            push_window(dq0, nq0, detail::dist(cur, crit_Q0()));
            if (window_fires(dq0, nq0, stop.q0_tol)) {
                t.termination = TerminationKind::ConvergedToQ0;
                return t;
            }
        }

        // Blow-down: deep, descending (in trace time), inside the escape
        // cone, and satisfying the quadratic decay bound
        // dv/dtau <= -v^2 / (2(m-1)) that guarantees finite-time escape.
        if (stop.stop_on_blowdown && cur.v < -stop.v_blow) {
            const PhasePoint s = eval_S(p, rc, cur);
            const double vdot_trace = dir * s.v;
            const bool riccati = vdot_trace <= -cur.v * cur.v / (2.0 * (p.m - 1.0));
            const bool cone = -cur.v * rc.c2 >= cone_threshold * pow_pos(cur.u, p.nu);
            if ((riccati && cone) || cur.u > stop.u_cap) {
                t.termination = TerminationKind::BlowDown;
                return t;
            }
        }
        if (cur.u > stop.u_cap && cur.v < 0.0 && stop.stop_on_blowdown) {
            t.termination = TerminationKind::BlowDown;
            return t;
        }

        if (std::abs(st.zeta() - span_end) <= 1e-12 * std::max(1.0, std::abs(span_end))) {
            t.termination = TerminationKind::SpanExhausted;
            return t;
        }
    }
    t.termination = TerminationKind::SpanExhausted;
    return t;
}

/// Dense-output value of a trajectory at zeta inside its span; exact (to
/// storage) at sample nodes.
inline PhasePoint interpolate(const Trajectory& t, double zeta) {
    const double za = t.zeta_begin(), zb = t.zeta_end();
    const double lo = std::min(za, zb), hi = std::max(za, zb);
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (zeta < lo - slack || zeta > hi + slack)
        throw RangeError("In deadcore::interpolate: zeta = " + std::to_string(zeta) + " outside span [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (t.dense.empty()) return t.samples.front().point;
    // Binary search over dense segments (zeta0 monotone in the direction).
    const bool fwd = t.direction == Direction::Forward;
    std::size_t a = 0, b = t.dense.size() - 1;
    while (a < b) {
        const std::size_t mid = (a + b + 1) / 2;
        const bool before = fwd ? (t.dense[mid].zeta0 <= zeta) : (t.dense[mid].zeta0 >= zeta);
        if (before)
            a = mid;
        else
            b = mid - 1;
    }
    const detail::DenseCoef& dc = t.dense[a];
    double theta = dc.h != 0.0 ? (zeta - dc.zeta0) / dc.h : 0.0;
    theta = std::clamp(theta, 0.0, 1.0);
    const detail::Vec2 y = dc.eval(theta);
    return {y[0], y[1]};
}

}  // namespace deadcore
