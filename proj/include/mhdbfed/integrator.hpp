#pragma once

#include "mhdbfed/rhs.hpp"

namespace mhdbfed {

/// Time-stepping policy.  With adaptive = false every step uses dt_init
/// (clamped), which the fixed-step convergence experiments rely on.
struct TimeControls {
    double dt_init = 1e-3;
    double dt_min = 1e-9;
    double dt_max = 1e-1;
    double cfl_safety = 0.4;
    double t_end = 1.0;
    int rk_order = 2;  ///< 2 (midpoint) or 4 (classical)
    bool adaptive = true;

    void validate() const;
};

/// Stable step size as a pure function of the state: the advective limit
/// cfl_safety * dx / (|u|_inf + |b|_inf + eps) against the damping limit
/// cfl_safety / (a |u|_inf^(2 alpha) + eps), clamped to [dt_min, dt_max].
/// Pure in (state, params, controls), so interrupted and resumed runs pick
/// the same steps.
double choose_dt(const State& s, const PhysParams& p, const TimeControls& tc);

/// One integrating-factor Runge-Kutta step of size dt.  The viscous and
/// resistive semigroups exp(-nu |k|^2 t), exp(-kappa |k|^2 t) are applied
/// exactly; the projected nonlinearity is advanced with the classical RK
/// stages of the requested order.  A purely linear flow is integrated to
/// machine precision for any dt.  Throws BlowUpError if the result is not
/// finite.
State if_rk_step(const State& s, double dt, const PhysParams& p, const Forcing& f = {},
                 int rk_order = 2);

/// Callbacks fired during run(); step counters start at 0 for the initial
/// condition.  A final callback always fires at t_end even when the step
/// count is not a multiple of the cadence.
struct RunSinks {
    int monitor_every = 1;  ///< steps between on_monitor calls; 0 disables
    std::function<void(const State&, long)> on_monitor;
    int checkpoint_every = 0;  ///< steps between on_checkpoint calls; 0 disables
    std::function<void(const State&, long)> on_checkpoint;
    bool emit_initial = true;  ///< fire on_monitor for the initial state
};

/// Advances ic to t_end.  Steps are chosen by choose_dt and capped by the
/// remaining time; a step producing non-finite values is retried from the
/// same state with dt halved, up to 8 times, before BlowUpError escapes.
/// t_end == ic.t returns ic unchanged.
State run(const State& ic, const PhysParams& p, const TimeControls& tc, const Forcing& f = {},
          const RunSinks& sinks = {});

}  // namespace mhdbfed
