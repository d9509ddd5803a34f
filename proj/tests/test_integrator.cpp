#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mhdbfed/integrator.hpp"
#include "mhdbfed/spectral_ops.hpp"
#include "mhdbfed/transforms.hpp"
#include "test_support.hpp"

using namespace mhdbfed;
using mhdbfed::test::max_coeff;
using mhdbfed::test::max_coeff_diff;
using mhdbfed::test::noise_state;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

State cosine_state(const Grid& g, double A) {
    State s(g);
    s.u.at(1, 1, 0, 0) = Complex(A / 2, 0.0);
    s.u.at(1, g.N() - 1, 0, 0) = Complex(A / 2, 0.0);
    return s;
}

TimeControls fixed_steps(double dt, double t_end, int rk_order = 2) {
    TimeControls tc;
    tc.adaptive = false;
    tc.dt_init = dt;
    tc.dt_min = 1e-12;
    tc.dt_max = 1.0;
    tc.t_end = t_end;
    tc.rk_order = rk_order;
    return tc;
}

}  // namespace

TEST_CASE("time controls validate their ranges") {
    CHECK_NOTHROW(TimeControls{}.validate());

    TimeControls tc;
    tc.dt_min = 1e-2;
    tc.dt_init = 1e-3;  // below dt_min
    CHECK_THROWS_AS(tc.validate(), InvalidStateError);

    tc = TimeControls{};
    tc.dt_max = 1e-12;  // below dt_min
    CHECK_THROWS_AS(tc.validate(), InvalidStateError);

    tc = TimeControls{};
    tc.cfl_safety = 0.0;
    CHECK_THROWS_AS(tc.validate(), InvalidStateError);
    tc.cfl_safety = 1.5;
    CHECK_THROWS_AS(tc.validate(), InvalidStateError);
    tc.adaptive = false;  // fixed stepping never reads the CFL number
    CHECK_NOTHROW(tc.validate());

    tc = TimeControls{};
    tc.rk_order = 3;
    CHECK_THROWS_AS(tc.validate(), InvalidStateError);
    tc.rk_order = 2;
    tc.t_end = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(tc.validate(), InvalidStateError);
}

TEST_CASE("step choice balances the advective and damping limits") {
    const Grid g = make_grid(8, kTwoPi);
    TimeControls tc;
    tc.t_end = 1e9;  // keep the remaining-time cap out of the way
    const double dx = g.L() / g.N();

    // Zero state: nothing restricts the step.
    CHECK(choose_dt(State(g), PhysParams{0.1, 0.1, 0.0, 0.0}, tc) == tc.dt_max);

    // Pure advection: doubling the speed halves the step.
    tc.dt_max = 1e6;
    const double d1 = choose_dt(cosine_state(g, 1.0), PhysParams{0.1, 0.1, 0.0, 0.0}, tc);
    const double d2 = choose_dt(cosine_state(g, 2.0), PhysParams{0.1, 0.1, 0.0, 0.0}, tc);
    CHECK(d1 == doctest::Approx(tc.cfl_safety * dx).epsilon(1e-14));
    CHECK(d1 == doctest::Approx(2 * d2).epsilon(1e-14));

    // At |u|_inf = 10, a = alpha = 1 the damping limit 1/100 is the binding one.
    const double d3 = choose_dt(cosine_state(g, 10.0), PhysParams{0.1, 0.1, 1.0, 1.0}, tc);
    CHECK(d3 == doctest::Approx(tc.cfl_safety * 0.01).epsilon(1e-14));

    // Clamps and the remaining-time cap.
    tc.dt_min = 0.05;
    tc.dt_init = 0.05;
    CHECK(choose_dt(cosine_state(g, 10.0), PhysParams{0.1, 0.1, 1.0, 1.0}, tc) == 0.05);
    tc.dt_min = 1e-9;
    tc.dt_init = 1e-3;
    tc.dt_max = 0.002;
    CHECK(choose_dt(cosine_state(g, 10.0), PhysParams{0.1, 0.1, 1.0, 1.0}, tc) == 0.002);
    tc.t_end = 0.001;
    CHECK(choose_dt(State(g), PhysParams{0.1, 0.1, 0.0, 0.0}, tc) == 0.001);
}

TEST_CASE("one step of a linear flow applies the heat semigroup exactly") {
    const Grid g = make_grid(16, kTwoPi);
    const PhysParams p{0.03, 0.05, 0.0, 0.0};
    for (int order : {2, 4}) {
        for (double dt : {0.37, 0.0123}) {
            const State s = cosine_state(g, 1.0);
            const State out = if_rk_step(s, dt, p, {}, order);
            const double decay = std::exp(-p.nu * dt);  // |k|^2 = 1
            CHECK(std::abs(out.u.at(1, 1, 0, 0) / s.u.at(1, 1, 0, 0) - decay) < 1e-15);
            CHECK(out.t == s.t + dt);
        }
    }
    CHECK_THROWS_AS(if_rk_step(cosine_state(g, 1.0), 0.0, p), InvalidStateError);
    CHECK_THROWS_AS(if_rk_step(cosine_state(g, 1.0), 0.1, p, {}, 3), InvalidStateError);
}

TEST_CASE("linear drag is integrated at the declared order") {
    // alpha = 0 keeps the problem linear while exercising the RK stages:
    // the exact amplitude is A exp(-(nu + a) t) for the gravest mode.
    const Grid g = make_grid(8, kTwoPi);
    const PhysParams p{0.01, 0.01, 0.5, 0.0};
    const double T = 1.0;
    const double exact = std::exp(-(p.nu + p.a) * T);

    for (int order : {2, 4}) {
        std::vector<double> errs;
        for (double dt : {0.1, 0.05, 0.025}) {
            const State out = run(cosine_state(g, 1.0), p, fixed_steps(dt, T, order));
            errs.push_back(std::abs(2.0 * std::abs(out.u.at(1, 1, 0, 0)) - exact));
        }
        for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
            const double observed = std::log2(errs[i] / errs[i + 1]);
            CHECK(observed == doctest::Approx(order).epsilon(0.1));
        }
    }
}

TEST_CASE("the zero state is an exact fixed point") {
    const Grid g = make_grid(8, kTwoPi);
    const State out = run(State(g), PhysParams{0.1, 0.1, 1.0, 2.0}, fixed_steps(0.1, 1.0));
    CHECK(max_coeff(out.u) == 0.0);
    CHECK(max_coeff(out.b) == 0.0);
    CHECK(out.t == 1.0);
}

TEST_CASE("overflowing stages surface as blow-up, not corruption") {
    const Grid g = make_grid(8, kTwoPi);
    const PhysParams p{0.1, 0.1, 1.0, 2.0};
    const State huge = cosine_state(g, 1e80);  // |u|^4 u overflows
    CHECK_THROWS_AS(if_rk_step(huge, 0.5, p), BlowUpError);
    // run() retries with halved steps, but no step size can save this state.
    CHECK_THROWS_AS(run(huge, p, fixed_steps(0.5, 1.0)), BlowUpError);
}

TEST_CASE("runs honor the sink cadence and close the series at the end") {
    const Grid g = make_grid(8, kTwoPi);
    const State ic = noise_state(g, 0.01, 7);
    const PhysParams p{0.1, 0.1, 0.0, 0.0};

    std::vector<long> monitored, checkpointed;
    std::vector<double> times;
    RunSinks sinks;
    sinks.monitor_every = 3;
    sinks.on_monitor = [&](const State& s, long step) {
        monitored.push_back(step);
        times.push_back(s.t);
    };
    sinks.checkpoint_every = 4;
    sinks.on_checkpoint = [&](const State&, long step) { checkpointed.push_back(step); };

    run(ic, p, fixed_steps(0.1, 1.0), {}, sinks);
    CHECK(monitored == std::vector<long>{0, 3, 6, 9, 10});
    CHECK(checkpointed == std::vector<long>{4, 8});
    CHECK(times.front() == 0.0);
    CHECK(times.back() == 1.0);  // snapped to t_end exactly

    // A run of zero duration returns the initial state after one record.
    monitored.clear();
    const State same = run(ic, p, fixed_steps(0.1, 0.0), {}, sinks);
    CHECK(monitored == std::vector<long>{0});
    CHECK(max_coeff_diff(same.u, ic.u) == 0.0);

    TimeControls backwards = fixed_steps(0.1, -1.0);
    CHECK_THROWS_AS(run(ic, p, backwards), InvalidStateError);
}

TEST_CASE("identical runs produce identical coefficients") {
    const Grid g = make_grid(16, kTwoPi);
    const State ic = noise_state(g, 1.0, 99);
    const PhysParams p{0.1, 0.1, 1.0, 2.0};
    const State a = run(ic, p, fixed_steps(0.01, 0.2));
    const State b = run(ic, p, fixed_steps(0.01, 0.2));
    CHECK(max_coeff_diff(a.u, b.u) == 0.0);
    CHECK(max_coeff_diff(a.b, b.b) == 0.0);
}

TEST_CASE("resuming from a checkpoint lands on the uninterrupted trajectory") {
    const Grid g = make_grid(16, kTwoPi);
    const State ic = noise_state(g, 1.0, 5);
    const PhysParams p{0.1, 0.1, 1.0, 2.0};
    const TimeControls tc = fixed_steps(0.01, 0.2);

    State mid(g);
    RunSinks sinks;
    sinks.monitor_every = 0;
    sinks.checkpoint_every = 10;
    sinks.on_checkpoint = [&](const State& s, long step) {
        if (step == 10) mid = s;
    };
    const State full = run(ic, p, tc, {}, sinks);

    const State resumed = run(mid, p, tc);
    CHECK(resumed.t == full.t);
    CHECK(max_coeff_diff(resumed.u, full.u) == 0.0);
    CHECK(max_coeff_diff(resumed.b, full.b) == 0.0);
}
