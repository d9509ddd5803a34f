#include "mhdbfed/verification.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <random>

#include "mhdbfed/errors.hpp"
#include "mhdbfed/spectral_ops.hpp"
#include "mhdbfed/transforms.hpp"

namespace mhdbfed {

namespace {

// Deterministic Gaussian draws: mantissa-from-engine uniforms plus Box-Muller,
// so a seed pins the stream independently of any library distribution.
struct GaussianStream {
    explicit GaussianStream(std::uint64_t seed) : eng(seed) {}
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double operator()() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * uniform());
    }
    std::mt19937_64 eng;
};

void check_vec_finite(const Vec3& v, const char* what) {
    if (!v.allFinite()) throw InvalidStateError(std::string("make_ic: ") + what + " must be finite");
}

State single_mode_ic(const ICSpec& spec, const Grid& g) {
    const int N = g.N();
    const std::array<int, 3>& m = spec.mode;
    if (m[0] == 0 && m[1] == 0 && m[2] == 0)
        throw InvalidStateError("make_ic: single_mode wavevector must be nonzero");
    for (int d = 0; d < 3; ++d)
        if (std::abs(m[d]) > N / 2 - 1)
            throw InvalidStateError("make_ic: single_mode wavevector outside the grid");

    Eigen::Vector3d kv(m[0], m[1], m[2]);
    Vec3 e = spec.polarization - spec.polarization.dot(kv.normalized()) * kv.normalized();
    if (e.norm() < 1e-12)
        throw InvalidStateError("make_ic: polarization is parallel to the wavevector");
    e.normalize();

    State s(g);
    const auto add_slot = [&](int fx, int fy, int fz) {
        const int i = (fx % N + N) % N;
        const int j = (fy % N + N) % N;
        const std::ptrdiff_t idx = g.index(i, j, fz);
        for (int d = 0; d < 3; ++d)
            s.u.c[d][idx] += Complex(0.5 * spec.amplitude * e[d], 0.0);
    };
    // cos(k . x) e splits into conjugate coefficients at +-k; only slots with
    // k_z >= 0 are stored, and the k_z = 0 plane stores both partners.
    if (m[2] > 0)
        add_slot(m[0], m[1], m[2]);
    else if (m[2] < 0)
        add_slot(-m[0], -m[1], -m[2]);
    else {
        add_slot(m[0], m[1], 0);
        add_slot(-m[0], -m[1], 0);
    }
    return s;
}

State taylor_green_ic(const ICSpec& spec, const Grid& g) {
    const int N = g.N();
    const double h = g.L() / N;
    const double k0 = g.k0();
    PhysicalField pu(g, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const std::ptrdiff_t idx = (static_cast<std::ptrdiff_t>(i) * N + j) * N + k;
                const double x = h * i, y = h * j, z = h * k;
                pu.v[0][idx] = spec.amplitude * std::sin(k0 * x) * std::cos(k0 * y) * std::cos(k0 * z);
                pu.v[1][idx] = -spec.amplitude * std::cos(k0 * x) * std::sin(k0 * y) * std::cos(k0 * z);
            }
    State s(g);
    s.u = to_spectral(pu);  // band-limited and exactly divergence-free
    return s;
}

State random_band_ic(const ICSpec& spec, const Grid& g) {
    const int N = g.N();
    const int kmax = spec.kmax > 0 ? spec.kmax : N / 3;
    if (spec.kmin < 1 || kmax < spec.kmin || kmax > N / 2 - 1)
        throw InvalidStateError("make_ic: random_band shell must satisfy 1 <= kmin <= kmax <= N/2 - 1");
    if (!(spec.energy >= 0.0) || !std::isfinite(spec.energy))
        throw InvalidStateError("make_ic: energy target must be finite and >= 0");
    if (!(spec.b_fraction >= 0.0 && spec.b_fraction <= 1.0))
        throw InvalidStateError("make_ic: b_fraction must lie in [0, 1]");

    State s(g);
    GaussianStream rng(spec.seed);
    const long lo = static_cast<long>(spec.kmin) * spec.kmin;
    const long hi = static_cast<long>(kmax) * kmax;
    // Fill stored slots in index order with a fixed per-slot draw count so the
    // stream is reproducible; symmetry and solenoidality are restored after.
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k <= N / 2; ++k) {
                const long fx = g.freq(i), fy = g.freq(j), fz = k;
                const long k2 = fx * fx + fy * fy + fz * fz;
                if (k2 < lo || k2 > hi) continue;
                const std::ptrdiff_t idx = g.index(i, j, k);
                for (int d = 0; d < 3; ++d) s.u.c[d][idx] = Complex(rng(), rng());
                for (int d = 0; d < 3; ++d) s.b.c[d][idx] = Complex(rng(), rng());
            }
    enforce_hermitian(s.u);
    enforce_hermitian(s.b);
    leray_project(s.u);
    leray_project(s.b);
    for (int d = 0; d < 3; ++d) {
        s.u.c[d][0] = Complex(0.0, 0.0);
        s.b.c[d][0] = Complex(0.0, 0.0);
    }

    const auto rescale = [](SpectralVectorField& f, double target, const char* which) {
        if (target == 0.0) {
            f.set_zero();
            return;
        }
        const double have = l2_norm_sq(f);
        if (!(have > 0.0))
            throw InvalidStateError(std::string("make_ic: empty shell cannot carry ") + which +
                                    " energy");
        f *= std::sqrt(target / have);
    };
    rescale(s.u, spec.energy * (1.0 - spec.b_fraction), "u");
    rescale(s.b, spec.energy * spec.b_fraction, "b");
    return s;
}

// 1D profile value with first and second derivative.
struct Prof {
    double v, d1, d2;
};

Prof exp_cos(double sigma, double k0, double w) {
    const double c = std::cos(k0 * w), s = std::sin(k0 * w);
    const double e = std::exp(sigma * c);
    return {e, -sigma * k0 * s * e, k0 * k0 * sigma * (sigma * s * s - c) * e};
}

Prof exp_sin(double tau, double k0, double w) {
    const double c = std::cos(k0 * w), s = std::sin(k0 * w);
    const double e = std::exp(tau * s);
    return {e, tau * k0 * c * e, k0 * k0 * tau * (tau * c * c - s) * e};
}

Prof cosine(double k0, double w) {
    const double c = std::cos(k0 * w), s = std::sin(k0 * w);
    return {c, -k0 * s, -k0 * k0 * c};
}

Prof sine(double k0, double w) {
    const double c = std::cos(k0 * w), s = std::sin(k0 * w);
    return {s, k0 * c, -k0 * k0 * s};
}

// Component from two 1D profiles; fills value, the two nonzero gradient
// entries (component depends on coordinates ax1, ax2 only), and the Laplacian.
void place(Vec3& val, Eigen::Matrix3d& grad, Vec3& lap, int comp, int ax1, const Prof& p1,
           int ax2, const Prof& p2, double amp) {
    val[comp] = amp * p1.v * p2.v;
    grad(comp, ax1) = amp * p1.d1 * p2.v;
    grad(comp, ax2) = amp * p1.v * p2.d1;
    lap[comp] = amp * (p1.d2 * p2.v + p1.v * p2.d2);
}

}  // namespace

State make_ic(const ICSpec& spec, const Grid& g) {
    if (!std::isfinite(spec.amplitude))
        throw InvalidStateError("make_ic: amplitude must be finite");
    check_vec_finite(spec.mean_u, "mean_u");
    check_vec_finite(spec.mean_b, "mean_b");

    State s(g);
    switch (spec.kind) {
        case ICKind::single_mode: s = single_mode_ic(spec, g); break;
        case ICKind::taylor_green: s = taylor_green_ic(spec, g); break;
        case ICKind::random_band: s = random_band_ic(spec, g); break;
    }
    for (int d = 0; d < 3; ++d) {
        s.u.c[d][0] += Complex(spec.mean_u[d], 0.0);
        s.b.c[d][0] += Complex(spec.mean_b[d], 0.0);
    }
    return s;
}

TrigExpPair::TrigExpPair(double L, double sigma, double tau, double u0, double b0, double omega)
    : k0_(2.0 * M_PI / L), sigma_(sigma), tau_(tau), u0_(u0), b0_(b0), omega_(omega) {
    if (!(L > 0.0)) throw InvalidStateError("TrigExpPair: box size must be positive");
}

ManufacturedPoint TrigExpPair::eval(double x, double y, double z, double t) const {
    const double A = u0_ * (1.0 + 0.3 * std::sin(omega_ * t));
    const double dA = 0.3 * u0_ * omega_ * std::cos(omega_ * t);
    const double B = b0_ * (1.0 + 0.3 * std::cos(omega_ * t));
    const double dB = -0.3 * b0_ * omega_ * std::sin(omega_ * t);

    const Prof ex = exp_cos(sigma_, k0_, x), ey = exp_cos(sigma_, k0_, y),
               ez = exp_cos(sigma_, k0_, z);
    const Prof cx = cosine(k0_, x), cy = cosine(k0_, y), cz = cosine(k0_, z);
    const Prof fx = exp_sin(tau_, k0_, x), fy = exp_sin(tau_, k0_, y), fz = exp_sin(tau_, k0_, z);
    const Prof sx = sine(k0_, x), sy = sine(k0_, y), sz = sine(k0_, z);

    ManufacturedPoint q;
    // u = A (E(y) C(z), E(z) C(x), E(x) C(y)): each component skips its own
    // coordinate, so the divergence vanishes identically.
    place(q.u, q.grad_u, q.lap_u, 0, 1, ey, 2, cz, A);
    place(q.u, q.grad_u, q.lap_u, 1, 2, ez, 0, cx, A);
    place(q.u, q.grad_u, q.lap_u, 2, 0, ex, 1, cy, A);
    q.du_dt = (dA / A) * q.u;

    // b = B (F(z) S(y), F(x) S(z), F(y) S(x)), same structure rotated the
    // other way around the coordinate cycle.
    place(q.b, q.grad_b, q.lap_b, 0, 2, fz, 1, sy, B);
    place(q.b, q.grad_b, q.lap_b, 1, 0, fx, 2, sz, B);
    place(q.b, q.grad_b, q.lap_b, 2, 1, fy, 0, sx, B);
    q.db_dt = (dB / B) * q.b;
    return q;
}

SingleModePair::SingleModePair(double L, double nu, double amplitude)
    : k0_(2.0 * M_PI / L), nu_(nu), amp_(amplitude) {
    if (!(L > 0.0)) throw InvalidStateError("SingleModePair: box size must be positive");
}

ManufacturedPoint SingleModePair::eval(double x, double /*y*/, double /*z*/, double t) const {
    ManufacturedPoint q;
    const double decay = std::exp(-nu_ * k0_ * k0_ * t);
    const double u2 = amp_ * decay * std::cos(k0_ * x);
    q.u[1] = u2;
    q.du_dt[1] = -nu_ * k0_ * k0_ * u2;
    q.lap_u[1] = -k0_ * k0_ * u2;
    q.grad_u(1, 0) = -amp_ * decay * k0_ * std::sin(k0_ * x);
    return q;
}

State manufactured_state(const ManufacturedPair& sol, const Grid& g, double t) {
    const int N = g.N();
    const double h = g.L() / N;
    PhysicalField pu(g, N), pb(g, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                const std::ptrdiff_t idx = (static_cast<std::ptrdiff_t>(i) * N + j) * N + k;
                const ManufacturedPoint q = sol.eval(h * i, h * j, h * k, t);
                for (int d = 0; d < 3; ++d) {
                    pu.v[d][idx] = q.u[d];
                    pb.v[d][idx] = q.b[d];
                }
            }
    State s(g);
    s.t = t;
    s.u = to_spectral(pu);
    s.b = to_spectral(pb);
    // A genuinely rotational formula samples to a tiny divergence (its
    // aliasing tail); anything larger means the formulas are not div-free.
    if (div_residual(s.u) > 1e-2 || div_residual(s.b) > 1e-2)
        throw InvalidStateError("manufactured_state: formulas are not divergence-free");

    // Sampling a non-band-limited field aliases a tail onto the grid modes;
    // drop the sign-ambiguous Nyquist planes and project so the solver's
    // solenoidal contract holds at any resolution.
    zero_nyquist(s.u);
    zero_nyquist(s.b);
    leray_project(s.u);
    leray_project(s.b);
    return s;
}

Forcing manufactured_forcing(std::shared_ptr<const ManufacturedPair> sol, const PhysParams& p,
                             const Grid& g) {
    p.validate();
    if (!sol) throw InvalidStateError("manufactured_forcing: null manufactured pair");

    // Both component forcings come out of one sweep over the grid; cache the
    // last evaluation time since the stepper requests f_u and f_b back to back.
    struct Cache {
        std::mutex m;
        double t = 0.0;
        std::optional<std::array<SpectralVectorField, 2>> fields;
    };
    auto cache = std::make_shared<Cache>();

    auto assemble = [sol, p, g, cache](double t, int which) -> SpectralVectorField {
        std::lock_guard<std::mutex> lock(cache->m);
        if (!cache->fields || cache->t != t) {
            const int N = g.N();
            const double h = g.L() / N;
            PhysicalField fu(g, N), fb(g, N);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    for (int k = 0; k < N; ++k) {
                        const std::ptrdiff_t idx = (static_cast<std::ptrdiff_t>(i) * N + j) * N + k;
                        const ManufacturedPoint q = sol->eval(h * i, h * j, h * k, t);
                        Vec3 ru = q.du_dt - p.nu * q.lap_u + q.grad_u * q.u - q.grad_b * q.b;
                        if (p.a > 0.0) {
                            const double m2 = q.u.squaredNorm();
                            ru += p.a * (p.alpha == 0.0 ? 1.0 : std::pow(m2, p.alpha)) * q.u;
                        }
                        const Vec3 rb = q.db_dt - p.kappa * q.lap_b + q.grad_b * q.u - q.grad_u * q.b;
                        for (int d = 0; d < 3; ++d) {
                            fu.v[d][idx] = ru[d];
                            fb.v[d][idx] = rb[d];
                        }
                    }
            SpectralVectorField su = to_spectral(fu);
            SpectralVectorField sb = to_spectral(fb);
            // The projector absorbs any pressure-gradient gauge in f_u and
            // strips the aliasing tail's divergence from both components;
            // the Nyquist planes go first so forced states stay off them.
            zero_nyquist(su);
            zero_nyquist(sb);
            leray_project(su);
            leray_project(sb);
            cache->fields = {std::move(su), std::move(sb)};
            cache->t = t;
        }
        return (*cache->fields)[which];
    };

    Forcing f;
    f.u = [assemble](double t) { return assemble(t, 0); };
    f.b = [assemble](double t) { return assemble(t, 1); };
    return f;
}

namespace {

double state_error(const State& got, const State& want) {
    return std::sqrt(l2_norm_sq(got.u - want.u) + l2_norm_sq(got.b - want.b));
}

TimeControls fixed_step_controls(double dt, double t_end, int rk_order) {
    TimeControls tc;
    tc.adaptive = false;
    tc.dt_init = tc.dt_min = tc.dt_max = dt;
    tc.t_end = t_end;
    tc.rk_order = rk_order;
    return tc;
}

}  // namespace

ConvergenceReport temporal_convergence(const ManufacturedPair& sol, const PhysParams& p,
                                       const Grid& g, int rk_order, double t_end,
                                       const std::vector<double>& dts) {
    if (dts.size() < 3)
        throw InvalidStateError("temporal_convergence: needs at least three step sizes");
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (!(dts[i] > 0.0) || !std::isfinite(dts[i]))
            throw InvalidStateError("temporal_convergence: step sizes must be positive");
        if (i > 0 && !(dts[i] < dts[i - 1]))
            throw InvalidStateError("temporal_convergence: step sizes must strictly decrease");
    }

    auto sol_ptr = std::shared_ptr<const ManufacturedPair>(&sol, [](const ManufacturedPair*) {});
    const Forcing f = manufactured_forcing(sol_ptr, p, g);
    const State ic = manufactured_state(sol, g, 0.0);
    const State ref = manufactured_state(sol, g, t_end);

    ConvergenceReport rep;
    for (double dt : dts) {
        const State out = run(ic, p, fixed_step_controls(dt, t_end, rk_order), f, {});
        rep.levels.push_back(dt);
        rep.errors.push_back(state_error(out, ref));
    }
    for (std::size_t i = 1; i < rep.errors.size(); ++i)
        rep.orders.push_back(std::log(rep.errors[i - 1] / rep.errors[i]) /
                             std::log(rep.levels[i - 1] / rep.levels[i]));
    return rep;
}

ConvergenceReport spatial_convergence(const ManufacturedPair& sol, const PhysParams& p, double L,
                                      const std::vector<int>& resolutions, int rk_order,
                                      double t_end, double dt) {
    if (resolutions.size() < 3)
        throw InvalidStateError("spatial_convergence: needs at least three resolutions");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (resolutions[i] <= resolutions[i - 1])
            throw InvalidStateError("spatial_convergence: resolutions must strictly increase");

    ConvergenceReport rep;
    for (int N : resolutions) {
        const Grid g = make_grid(N, L);
        auto sol_ptr = std::shared_ptr<const ManufacturedPair>(&sol, [](const ManufacturedPair*) {});
        const Forcing f = manufactured_forcing(sol_ptr, p, g);
        const State ic = manufactured_state(sol, g, 0.0);
        const State out = run(ic, p, fixed_step_controls(dt, t_end, rk_order), f, {});
        rep.levels.push_back(static_cast<double>(N));
        rep.errors.push_back(state_error(out, manufactured_state(sol, g, t_end)));
    }
    for (std::size_t i = 1; i < rep.errors.size(); ++i)
        rep.orders.push_back(rep.errors[i - 1] / rep.errors[i]);  // collapse factor
    return rep;
}

DependenceReport dependence_experiment(const State& ic, const PhysParams& p,
                                       const TimeControls& tc, const std::vector<double>& deltas,
                                       std::uint64_t direction_seed) {
    if (deltas.empty())
        throw InvalidStateError("dependence_experiment: needs at least one perturbation size");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i]))
            throw InvalidStateError("dependence_experiment: perturbation sizes must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw InvalidStateError(
                "dependence_experiment: perturbation sizes must strictly decrease");
    }
    if (tc.adaptive)
        throw InvalidStateError(
            "dependence_experiment: perturbed runs must share the step sequence; use fixed "
            "stepping (adaptive = false)");

    ICSpec dir_spec;
    dir_spec.kind = ICKind::random_band;
    dir_spec.energy = 1.0;
    dir_spec.b_fraction = 0.5;
    dir_spec.seed = direction_seed;
    const State dir = make_ic(dir_spec, ic.grid());

    const State base = run(ic, p, tc, {}, {});
    const State again = run(ic, p, tc, {}, {});

    DependenceReport rep;
    rep.hypothesis_met = p.alpha >= 1.5;
    rep.s_at_zero = l2_norm_sq(again.u - base.u) + l2_norm_sq(again.b - base.b);
    for (double d : deltas) {
        State pert = ic;
        axpy(d, dir.u, pert.u);
        axpy(d, dir.b, pert.b);
        const State out = run(pert, p, tc, {}, {});
        const double sep = l2_norm_sq(out.u - base.u) + l2_norm_sq(out.b - base.b);
        rep.deltas.push_back(d);
        rep.separation.push_back(sep);
        rep.s_over_delta_sq.push_back(sep / (d * d));
    }
    return rep;
}

RefinementReport mode_refinement_check(const State& ic, const PhysParams& p,
                                       const TimeControls& tc) {
    const Grid fine = make_grid(2 * ic.grid().N(), ic.grid().L());
    State fine_ic(fine);
    fine_ic.t = ic.t;
    fine_ic.u = regrid(ic.u, fine);
    fine_ic.b = regrid(ic.b, fine);

    const State coarse_out = run(ic, p, tc, {}, {});
    const State fine_out = run(fine_ic, p, tc, {}, {});

    RefinementReport rep;
    rep.n_coarse = ic.grid().N();
    rep.n_fine = fine.N();
    rep.difference = std::sqrt(l2_norm_sq(fine_out.u - regrid(coarse_out.u, fine)) +
                               l2_norm_sq(fine_out.b - regrid(coarse_out.b, fine)));
    return rep;
}

}  // namespace mhdbfed
