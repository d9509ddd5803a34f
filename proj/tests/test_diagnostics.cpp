#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "mhdbfed/diagnostics.hpp"
#include "mhdbfed/integrator.hpp"
#include "mhdbfed/spectral_ops.hpp"
#include "mhdbfed/transforms.hpp"
#include "test_support.hpp"

using namespace mhdbfed;
using mhdbfed::test::noise_state;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Sharp constant of the damping-difference bound: the minimum of the ratio
// over all vector pairs sits at the antipodal equal-magnitude configuration
// and equals 4^{-alpha}.  The literals are frozen from a dense scan of both
// collinear branches (200001 points each), which the library oracle repeats.
constexpr double kFloorAlpha1 = 0.25;
constexpr double kFloorAlpha32 = 0.125;
constexpr double kFloorAlpha2 = 0.0625;

std::vector<MonitorRecord> run_series(const State& ic, const PhysParams& p,
                                      const TimeControls& tc, int every = 1) {
    std::vector<MonitorRecord> series;
    RunSinks sinks;
    sinks.monitor_every = every;
    sinks.on_monitor = [&](const State& s, long) { series.push_back(monitor(s, p)); };
    run(ic, p, tc, {}, sinks);
    return series;
}

TimeControls fixed_steps(double dt, double t_end) {
    TimeControls tc;
    tc.adaptive = false;
    tc.dt_init = dt;
    tc.dt_min = 1e-12;
    tc.dt_max = 1.0;
    tc.t_end = t_end;
    return tc;
}

}  // namespace

TEST_CASE("the monitor reports zeros for the zero state") {
    const Grid g = make_grid(8, kTwoPi);
    const MonitorRecord r = monitor(State(g), PhysParams{0.1, 0.1, 1.0, 2.0});
    CHECK(r.E == 0.0);
    CHECK(r.grad_u_sq == 0.0);
    CHECK(r.grad_b_sq == 0.0);
    CHECK(r.u_damp_norm == 0.0);
    REQUIRE(r.b_crit_norm.has_value());
    CHECK(*r.b_crit_norm == 0.0);
    CHECK(r.div_u_res == 0.0);
    CHECK(r.mean_u.norm() == 0.0);

    // alpha = 0 has no critical norm to report.
    const MonitorRecord r0 = monitor(State(g), PhysParams{0.1, 0.1, 1.0, 0.0});
    CHECK(!r0.b_crit_norm.has_value());
}

TEST_CASE("the monitor matches closed forms on simple states") {
    const Grid g = make_grid(16, kTwoPi);
    const double vol = g.volume();

    State mode(g);
    mode.u.at(1, 1, 0, 0) = Complex(0.35, 0.0);
    mode.u.at(1, 15, 0, 0) = Complex(0.35, 0.0);  // u = 0.7 cos x e_y
    MonitorRecord r = monitor(mode, PhysParams{0.1, 0.1, 0.0, 0.0});
    CHECK(r.E == doctest::Approx(0.49 * vol / 2).epsilon(1e-12));
    CHECK(r.grad_u_sq == doctest::Approx(r.E).epsilon(1e-12));  // |k|^2 = 1

    State uniform(g);
    uniform.u.at(0, 0, 0, 0) = Complex(0.5, 0.0);
    uniform.b.at(0, 0, 0, 0) = Complex(0.3, 0.0);
    r = monitor(uniform, PhysParams{0.1, 0.1, 1.0, 2.0});
    CHECK(r.E == doctest::Approx((0.25 + 0.09) * vol).epsilon(1e-12));
    CHECK(r.grad_u_sq == 0.0);
    CHECK(r.u_damp_norm == doctest::Approx(std::pow(0.5, 6) * vol).epsilon(1e-12));
    // ||b||_p of a uniform field is |b| L^{3/p} with p = 3(alpha+1)/alpha.
    CHECK(*r.b_crit_norm == doctest::Approx(0.3 * std::pow(vol, 1.0 / 4.5)).epsilon(1e-12));
    CHECK(r.mean_u[0] == doctest::Approx(0.5));
    CHECK(r.mean_b[0] == doctest::Approx(0.3));
}

TEST_CASE("the limsup ball radius matches its closed form and shrinks with damping") {
    // (2 pi)^3 * (nu/lambda)^3 / max(kappa, nu) with unit lambda.
    CHECK(absorbing_ball_radius(PhysParams{0.1, 0.1, 1.0, 2.0}, kTwoPi) ==
          doctest::Approx(24.805021344239854).epsilon(1e-14));

    double prev = std::numeric_limits<double>::infinity();
    for (double a : {0.5, 1.0, 4.0, 1e4, 1e15}) {
        const double r2 = absorbing_ball_radius(PhysParams{0.1, 0.1, a, 2.0}, kTwoPi);
        CHECK(r2 < prev);
        prev = r2;
    }
    CHECK(prev < 1e-3);  // a -> infinity crushes the ball

    // The exponents pole at alpha = 1/2, and the bound needs real damping.
    CHECK_THROWS_AS(absorbing_ball_radius(PhysParams{0.1, 0.1, 1.0, 0.5}, kTwoPi),
                    InvalidStateError);
    CHECK_THROWS_AS(absorbing_ball_radius(PhysParams{0.1, 0.1, 1.0, 0.4}, kTwoPi),
                    InvalidStateError);
    CHECK_THROWS_AS(absorbing_ball_radius(PhysParams{0.1, 0.1, 0.0, 2.0}, kTwoPi),
                    InvalidStateError);
}

TEST_CASE("the envelope constant is the exact Young trade-off") {
    const double L = kTwoPi;
    const double vol = std::pow(L, 3);
    for (double alpha : {0.75, 1.0, 1.5, 2.0, 3.0}) {
        const PhysParams p{0.07, 0.11, 0.6, alpha};
        const EnvelopeConstants c = envelope_constants(p, L);
        CHECK(c.mu_u == doctest::Approx(2 * p.nu).epsilon(1e-15));  // lambda = 1
        CHECK(c.mu == doctest::Approx(std::min(2 * p.kappa, c.mu_u)).epsilon(1e-15));
        CHECK(c.r_sq_rigorous == doctest::Approx(c.K / c.mu).epsilon(1e-15));

        const auto objective = [&](double X) {
            return c.mu_u * X - 2 * p.a * std::pow(X, alpha + 1) * std::pow(vol, -alpha);
        };
        // The maximizer is known in closed form; K must sit exactly on it.
        const double xstar = vol * std::pow(c.mu_u / (2 * p.a * (alpha + 1)), 1 / alpha);
        CHECK(objective(xstar) == doctest::Approx(c.K).epsilon(1e-12));
        for (double f = 0.1; f < 10.0; f *= 1.07)
            CHECK(objective(f * xstar) <= c.K * (1 + 1e-12));
    }

    // Linear damping needs no trade; no damping falls back to Poincare.
    const EnvelopeConstants lin = envelope_constants(PhysParams{0.1, 0.1, 0.7, 0.0}, L);
    CHECK(lin.mu_u == 1.4);
    CHECK(lin.K == 0.0);
    const EnvelopeConstants none = envelope_constants(PhysParams{0.1, 0.1, 0.0, 2.0}, L);
    CHECK(none.mu_u == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(none.K == 0.0);
}

TEST_CASE("the decay envelope check flags synthetic violations at the right time") {
    const PhysParams p{0.1, 0.1, 1.0, 2.0};
    const EnvelopeConstants c = envelope_constants(p, kTwoPi);
    const double E0 = 100.0;

    std::vector<MonitorRecord> series(24);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = 0.5 * static_cast<double>(i);
        const double decay = std::exp(-c.mu * t);
        MonitorRecord r;
        r.t = t;
        r.E = E0 * decay + c.r_sq_rigorous * (1 - decay);
        if (i > 0) r.E *= 0.98;  // strictly inside the envelope
        series[i] = r;
    }
    EnvelopeReport rep = decay_envelope_check(series, p, kTwoPi);
    CHECK(rep.rigorous_pass);
    CHECK(std::isnan(rep.rigorous_first_violation_t));

    series[7].E *= 1.5;
    rep = decay_envelope_check(series, p, kTwoPi);
    CHECK(!rep.rigorous_pass);
    CHECK(rep.rigorous_first_violation_t == series[7].t);

    series.resize(15);
    CHECK_THROWS_AS(decay_envelope_check(series, p, kTwoPi), InvalidStateError);
}

TEST_CASE("a damped run stays inside the rigorous envelope") {
    const Grid g = make_grid(16, kTwoPi);
    const PhysParams p{0.1, 0.1, 1.0, 2.0};
    TimeControls tc;
    tc.t_end = 10.0;
    const std::vector<MonitorRecord> series = run_series(noise_state(g, 60.0, 31), p, tc, 5);
    REQUIRE(series.size() >= 16);
    const EnvelopeReport rep = decay_envelope_check(series, p, kTwoPi);
    CHECK(rep.rigorous_pass);
    CHECK(rep.limsup_E > 0.0);
}

TEST_CASE("the damping difference pairing is nonnegative and normalizes correctly") {
    CHECK(monotonicity_check(Vec3(0.3, -1.0, 2.0), Vec3(0.3, -1.0, 2.0), 1.5).rhs == 0.0);
    CHECK(!monotonicity_check(Vec3(1, 0, 0), Vec3(1, 0, 0), 1.5).ratio.has_value());

    const MonotonicityReport against_zero = monotonicity_check(Vec3(0.4, 0.2, -0.1), Vec3::Zero(), 2.0);
    REQUIRE(against_zero.ratio.has_value());
    CHECK(*against_zero.ratio == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> mag(-6.0, 6.0);
    for (int i = 0; i < 100000; ++i) {
        const double sx = std::pow(10.0, mag(rng)), sy = std::pow(10.0, mag(rng));
        const Vec3 x = sx * Vec3(gauss(rng), gauss(rng), gauss(rng));
        const Vec3 y = sy * Vec3(gauss(rng), gauss(rng), gauss(rng));
        const MonotonicityReport r = monotonicity_check(x, y, 1.5);
        CHECK(r.rhs >= -1e-12 * r.denom);
        if (r.ratio) CHECK(*r.ratio >= kFloorAlpha32 - 1e-9);
    }
}

TEST_CASE("the collinear scan reproduces the quarter-power floor") {
    CHECK(monotonicity_min_ratio_1d(1.0) == doctest::Approx(kFloorAlpha1).epsilon(1e-12));
    CHECK(monotonicity_min_ratio_1d(1.5) == doctest::Approx(kFloorAlpha32).epsilon(1e-12));
    CHECK(monotonicity_min_ratio_1d(2.0) == doctest::Approx(kFloorAlpha2).epsilon(1e-12));
    // The floor is attained by antipodal pairs of equal magnitude.
    const MonotonicityReport r = monotonicity_check(Vec3(1, 0, 0), Vec3(-1, 0, 0), 2.0);
    REQUIRE(r.ratio.has_value());
    CHECK(*r.ratio == doctest::Approx(kFloorAlpha2).epsilon(1e-12));
}

TEST_CASE("fields of constant magnitude annihilate the power-law side") {
    const Grid g = make_grid(16, kTwoPi);
    PhysicalField b(g, g.N());
    const double dx = g.L() / g.N();
    for (int i = 0; i < g.N(); ++i)
        for (int j = 0; j < g.N(); ++j)
            for (int k = 0; k < g.N(); ++k) {
                const Eigen::Index s = (static_cast<Eigen::Index>(i) * g.N() + j) * g.N() + k;
                const double theta = std::sin(i * dx) + 0.3 * std::cos(j * dx);
                b.v[0][s] = 0.8 * std::cos(theta);
                b.v[1][s] = 0.8 * std::sin(theta);
            }
    const SvReport rep = stroock_varopoulos_check(b, 1.0, 2);
    REQUIRE(rep.defined);
    CHECK(rep.pass);
    CHECK(rep.rhs < 1e-10 * rep.lhs);
}

TEST_CASE("scalar-profile fields saturate the diffusion inequality") {
    // For b = phi(x) e the two sides agree identically, so the ratio is a
    // direct read of the constant; oversampling beats the quadrature tail.
    const Grid g = make_grid(16, kTwoPi);
    for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
        PhysicalField b(g, g.N());
        const double dx = g.L() / g.N();
        for (int i = 0; i < g.N(); ++i)
            for (int j = 0; j < g.N(); ++j)
                for (int k = 0; k < g.N(); ++k) {
                    const Eigen::Index s = (static_cast<Eigen::Index>(i) * g.N() + j) * g.N() + k;
                    b.v[2][s] = 1.5 + std::cos(i * dx) + 0.3 * std::sin(2 * i * dx);
                }
        const SvReport rep = stroock_varopoulos_check(b, alpha, 4);
        REQUIRE(rep.defined);
        CHECK(rep.pass);
        CHECK(rep.ratio == doctest::Approx(1.0).epsilon(5e-3));
        const bool integer_pair = alpha == 1.0 || alpha == 3.0;
        CHECK(rep.slack == (integer_pair ? 1e-6 : 1e-3));
    }
}

TEST_CASE("the zero field leaves the diffusion inequality undefined") {
    const Grid g = make_grid(8, kTwoPi);
    const SvReport rep = stroock_varopoulos_check(PhysicalField(g, 8), 2.0, 2);
    CHECK(!rep.defined);
    CHECK(!rep.pass);
    CHECK_THROWS_AS(stroock_varopoulos_check(PhysicalField(g, 8), 0.0, 2), InvalidStateError);
    CHECK_THROWS_AS(stroock_varopoulos_check(PhysicalField(g, 8), 2.0, 0), InvalidStateError);
}

TEST_CASE("random band-limited fields satisfy the diffusion inequality") {
    const Grid g = make_grid(16, kTwoPi);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const PhysicalField b = to_physical(noise_state(g, 1.0, seed).b);
        for (double alpha : {1.0, 2.0}) {
            const SvReport rep = stroock_varopoulos_check(b, alpha, 2);
            REQUIRE(rep.defined);
            CHECK(rep.ratio >= 1.0 - rep.slack);
        }
    }
}

TEST_CASE("the energy budget of a trivial window is zero") {
    MonitorRecord r0, r1;
    r1.t = 1.0;
    const EnergyBudget eb = energy_budget({r0, r1}, PhysParams{0.1, 0.1, 1.0, 2.0});
    CHECK(eb.dE == 0.0);
    CHECK(eb.dissipation_integral == 0.0);
    CHECK(eb.residual == 0.0);
    CHECK_THROWS_AS(energy_budget({r0}, PhysParams{0.1, 0.1, 1.0, 2.0}), InvalidStateError);
}

TEST_CASE("a linear run closes its energy budget to near roundoff") {
    const Grid g = make_grid(8, kTwoPi);
    State mode(g);
    mode.u.at(1, 1, 0, 0) = Complex(0.05, 0.0);
    mode.u.at(1, 7, 0, 0) = Complex(0.05, 0.0);  // 0.1 cos x e_y
    const PhysParams p{0.01, 0.01, 0.0, 0.0};
    const std::vector<MonitorRecord> series = run_series(mode, p, fixed_steps(5e-4, 0.5));
    const EnergyBudget eb = energy_budget(series, p);
    CHECK(eb.t0 == 0.0);
    CHECK(eb.t1 == 0.5);
    CHECK(eb.dE < 0.0);
    CHECK(std::abs(eb.residual) < 1e-10);
}

TEST_CASE("the budget residual shrinks at second order in the step") {
    const Grid g = make_grid(16, kTwoPi);
    const State ic = noise_state(g, 1.0, 17);
    const PhysParams p{0.1, 0.1, 1.0, 2.0};
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        const double dt = 4e-3 / (1 << level);
        const double res =
            std::abs(energy_budget(run_series(ic, p, fixed_steps(dt, 0.5)), p).residual);
        if (level > 0) CHECK(prev / res >= std::pow(2.0, 1.8));
        prev = res;
    }
}
