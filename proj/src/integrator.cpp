#include "mhdbfed/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mhdbfed/errors.hpp"
#include "mhdbfed/spectral_ops.hpp"
#include "mhdbfed/transforms.hpp"

namespace mhdbfed {

void TimeControls::validate() const {
    if (!(dt_min > 0) || !(dt_max >= dt_min))
        throw InvalidStateError("time controls require 0 < dt_min <= dt_max");
    if (!(dt_init >= dt_min) || !(dt_init <= dt_max) || !std::isfinite(dt_init))
        throw InvalidStateError("dt_init must lie in [dt_min, dt_max]");
    if (adaptive && !(cfl_safety > 0 && cfl_safety <= 1))
        throw InvalidStateError("cfl_safety must lie in (0, 1] for adaptive stepping");
    if (!std::isfinite(t_end)) throw InvalidStateError("t_end must be finite");
    if (rk_order != 2 && rk_order != 4)
        throw InvalidStateError("rk_order must be 2 or 4");
}

double choose_dt(const State& s, const PhysParams& p, const TimeControls& tc) {
    tc.validate();
    const double remaining = std::max(tc.t_end - s.t, 0.0);
    double dt;
    if (tc.adaptive) {
        constexpr double eps = 1e-30;
        const double umax = lp_norm(to_physical(s.u), std::numeric_limits<double>::infinity());
        const double bmax = lp_norm(to_physical(s.b), std::numeric_limits<double>::infinity());
        const double dx = s.grid().L() / s.grid().N();
        const double advective = dx / (umax + bmax + eps);
        const double damping = 1.0 / (p.a * std::pow(umax, 2.0 * p.alpha) + eps);
        dt = std::clamp(tc.cfl_safety * std::min(advective, damping), tc.dt_min, tc.dt_max);
    } else {
        dt = std::clamp(tc.dt_init, tc.dt_min, tc.dt_max);
    }
    return std::min(dt, remaining);
}

namespace {

// exp(-coef * |k|^2 * tau) over the spectral layout.
Eigen::ArrayXd semigroup(const Grid& g, double coef, double tau) {
    return (-coef * tau * g.ksq()).exp();
}

}  // namespace

State if_rk_step(const State& s, double dt, const PhysParams& p, const Forcing& f,
                 int rk_order) {
    if (!(dt > 0) || !std::isfinite(dt)) throw InvalidStateError("if_rk_step: dt must be positive");
    if (rk_order != 2 && rk_order != 4)
        throw InvalidStateError("if_rk_step: rk_order must be 2 or 4");
    const Grid& g = s.grid();

    // Overflow in a stage state must surface as blow-up (so the driver can
    // retry with a smaller dt), not as a corrupted-state error from the
    // stage tendency's divergence check chewing on NaNs.
    const auto ensure_finite = [&](const State& stage) {
        if (!stage.all_finite())
            throw BlowUpError(
                "if_rk_step produced non-finite values at t = " + std::to_string(s.t), s.t);
    };

    const Eigen::ArrayXd eu_h = semigroup(g, p.nu, 0.5 * dt);
    const Eigen::ArrayXd eb_h = semigroup(g, p.kappa, 0.5 * dt);
    const Eigen::ArrayXd eu_f = eu_h * eu_h;
    const Eigen::ArrayXd eb_f = eb_h * eb_h;

    State out(g);
    out.t = s.t + dt;

    if (rk_order == 2) {
        // Midpoint rule on the integrating-factor variable.
        const Tendency k1 = nonstiff_tendency(s, p, f);
        State mid(g);
        mid.t = s.t + 0.5 * dt;
        mid.u = s.u;
        axpy(0.5 * dt, k1.du, mid.u);
        scale_by(mid.u, eu_h);
        mid.b = s.b;
        axpy(0.5 * dt, k1.db, mid.b);
        scale_by(mid.b, eb_h);
        ensure_finite(mid);

        const Tendency k2 = nonstiff_tendency(mid, p, f);
        out.u = scaled(s.u, eu_f);
        out.u += dt * scaled(k2.du, eu_h);
        out.b = scaled(s.b, eb_f);
        out.b += dt * scaled(k2.db, eb_h);
    } else {
        // Classical RK4 on the integrating-factor variable.
        const Tendency k1 = nonstiff_tendency(s, p, f);

        State st(g);
        st.t = s.t + 0.5 * dt;
        st.u = s.u;
        axpy(0.5 * dt, k1.du, st.u);
        scale_by(st.u, eu_h);
        st.b = s.b;
        axpy(0.5 * dt, k1.db, st.b);
        scale_by(st.b, eb_h);
        ensure_finite(st);
        const Tendency k2 = nonstiff_tendency(st, p, f);

        st.u = scaled(s.u, eu_h);
        axpy(0.5 * dt, k2.du, st.u);
        st.b = scaled(s.b, eb_h);
        axpy(0.5 * dt, k2.db, st.b);
        ensure_finite(st);
        const Tendency k3 = nonstiff_tendency(st, p, f);

        st.t = s.t + dt;
        st.u = scaled(s.u, eu_f);
        st.u += dt * scaled(k3.du, eu_h);
        st.b = scaled(s.b, eb_f);
        st.b += dt * scaled(k3.db, eb_h);
        ensure_finite(st);
        const Tendency k4 = nonstiff_tendency(st, p, f);

        out.u = scaled(s.u, eu_f);
        out.u += (dt / 6.0) * scaled(k1.du, eu_f);
        out.u += (dt / 3.0) * scaled(k2.du, eu_h);
        out.u += (dt / 3.0) * scaled(k3.du, eu_h);
        axpy(dt / 6.0, k4.du, out.u);
        out.b = scaled(s.b, eb_f);
        out.b += (dt / 6.0) * scaled(k1.db, eb_f);
        out.b += (dt / 3.0) * scaled(k2.db, eb_h);
        out.b += (dt / 3.0) * scaled(k3.db, eb_h);
        axpy(dt / 6.0, k4.db, out.b);
    }

    if (!out.all_finite())
        throw BlowUpError("if_rk_step produced non-finite values at t = " + std::to_string(s.t),
                          s.t);
    return out;
}

State run(const State& ic, const PhysParams& p, const TimeControls& tc, const Forcing& f,
          const RunSinks& sinks) {
    p.validate();
    tc.validate();
    if (tc.t_end < ic.t)
        throw InvalidStateError("run: t_end precedes the initial time");

    const double eps = 1e-12 * std::max(1.0, std::abs(tc.t_end));
    State state = ic;
    long step = 0;

    if (sinks.emit_initial && sinks.on_monitor && sinks.monitor_every > 0)
        sinks.on_monitor(state, step);
    if (tc.t_end == ic.t) return state;

    long last_monitor_step = 0;
    while (tc.t_end - state.t > eps) {
        double dt = choose_dt(state, p, tc);
        State next;
        for (int attempt = 0;; ++attempt) {
            try {
                next = if_rk_step(state, dt, p, f, tc.rk_order);
                break;
            } catch (const BlowUpError&) {
                if (attempt >= 8) throw;
                dt *= 0.5;
            }
        }
        state = std::move(next);
        ++step;
        if (tc.t_end - state.t <= eps) state.t = tc.t_end;

        if (sinks.monitor_every > 0 && sinks.on_monitor && step % sinks.monitor_every == 0) {
            sinks.on_monitor(state, step);
            last_monitor_step = step;
        }
        if (sinks.checkpoint_every > 0 && sinks.on_checkpoint &&
            step % sinks.checkpoint_every == 0)
            sinks.on_checkpoint(state, step);
    }

    // close the series at t_end even off-cadence
    if (sinks.monitor_every > 0 && sinks.on_monitor && last_monitor_step != step)
        sinks.on_monitor(state, step);
    return state;
}

}  // namespace mhdbfed
