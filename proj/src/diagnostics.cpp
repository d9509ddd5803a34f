#include "mhdbfed/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mhdbfed/errors.hpp"
#include "mhdbfed/spectral_ops.hpp"
#include "mhdbfed/transforms.hpp"

namespace mhdbfed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Quadrature of sum_x (|v(x)|^2)^{pw} * cell over a physical-space field.
double pow_quadrature(const PhysicalField& f, double pw) {
    const double* x = f.v[0].data();
    const double* y = f.v[1].data();
    const double* z = f.v[2].data();
    const std::ptrdiff_t n = f.v[0].size();
    double acc = 0.0;
    if (pw == 1.0) {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            acc += x[i] * x[i] + y[i] * y[i] + z[i] * z[i];
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double m2 = x[i] * x[i] + y[i] * y[i] + z[i] * z[i];
            if (m2 > 0.0) acc += std::pow(m2, pw);
        }
    }
    return acc * f.cell_volume();
}

void require_increasing(const std::vector<MonitorRecord>& series, const char* who) {
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].t > series[i - 1].t))
            throw InvalidStateError(std::string(who) + ": record times must be strictly increasing");
}

}  // namespace

MonitorRecord monitor(const State& s, const PhysParams& p) {
    p.validate();
    MonitorRecord r;
    r.t = s.t;
    r.E = l2_norm_sq(s.u) + l2_norm_sq(s.b);
    r.grad_u_sq = grad_norm_sq(s.u);
    r.grad_b_sq = grad_norm_sq(s.b);

    const PhysicalField up = to_physical(s.u);
    r.u_damp_norm = pow_quadrature(up, p.alpha + 1.0);
    if (p.alpha > 0.0) {
        const double pc = 3.0 * (p.alpha + 1.0) / p.alpha;
        const PhysicalField bp = to_physical(s.b);
        r.b_crit_norm = std::pow(pow_quadrature(bp, pc / 2.0), 1.0 / pc);
    }

    r.div_u_res = div_residual(s.u);
    r.div_b_res = div_residual(s.b);
    r.mean_u = mean(s.u);
    r.mean_b = mean(s.b);
    return r;
}

double absorbing_ball_radius(const PhysParams& p, double L) {
    p.validate();
    if (!(p.alpha > 0.5))
        throw InvalidStateError("absorbing_ball_radius: needs alpha > 1/2");
    if (!(p.a > 0.0))
        throw InvalidStateError("absorbing_ball_radius: needs a > 0");
    if (!(L > 0.0) || !std::isfinite(L))
        throw InvalidStateError("absorbing_ball_radius: box size must be positive");
    const double lambda = std::pow(2.0 * M_PI / L, 2);
    const double vol = L * L * L;
    const double e1 = -1.0 / (2.0 * p.alpha - 1.0);
    const double e2 = (2.0 * p.alpha + 2.0) / (2.0 * p.alpha - 1.0);
    return vol * std::pow(p.a, e1) * std::pow(p.nu / lambda, e2) / std::max(p.kappa, p.nu);
}

EnvelopeConstants envelope_constants(const PhysParams& p, double L) {
    p.validate();
    if (!(L > 0.0) || !std::isfinite(L))
        throw InvalidStateError("envelope_constants: box size must be positive");
    const double lambda = std::pow(2.0 * M_PI / L, 2);
    const double vol = L * L * L;

    EnvelopeConstants c;
    if (p.a > 0.0 && p.alpha > 0.0) {
        c.mu_u = 2.0 * p.nu * lambda;
        // Sharp constant in mu_u X <= 2 a X^{alpha+1} vol^{-alpha} + K:
        // maximize mu_u X - 2 a X^{alpha+1} vol^{-alpha} over X >= 0.
        const double al = p.alpha;
        c.K = vol * (al / (al + 1.0)) * std::pow(al + 1.0, -1.0 / al) *
              std::pow(2.0 * p.a, -1.0 / al) * std::pow(c.mu_u, (al + 1.0) / al);
    } else if (p.a > 0.0) {
        // alpha = 0: the damping is already linear, no trade needed.
        c.mu_u = 2.0 * p.a;
        c.K = 0.0;
    } else {
        // No damping: fall back to the Poincare rate from the viscous term.
        c.mu_u = 2.0 * p.nu * lambda;
        c.K = 0.0;
    }
    c.mu = std::min(2.0 * p.kappa * lambda, c.mu_u);
    c.r_sq_rigorous = c.K / c.mu;
    c.rate_literal = 2.0 * std::max(p.kappa, p.nu) / lambda;
    return c;
}

EnvelopeReport decay_envelope_check(const std::vector<MonitorRecord>& series,
                                    const PhysParams& p, double L) {
    if (series.size() < 16)
        throw InvalidStateError("decay_envelope_check: needs at least 16 records");
    require_increasing(series, "decay_envelope_check");

    EnvelopeReport rep;
    rep.consts = envelope_constants(p, L);
    const double t0 = series.front().t;
    const double E0 = series.front().E;
    const double r2r = rep.consts.r_sq_rigorous;

    // Rigorous envelope, with a little headroom for quadrature roundoff.
    rep.rigorous_pass = true;
    rep.rigorous_first_violation_t = kNaN;
    for (const MonitorRecord& r : series) {
        const double decay = std::exp(-rep.consts.mu * (r.t - t0));
        const double bound = E0 * decay + r2r * (1.0 - decay);
        if (!(r.E <= bound * (1.0 + 1e-9) + 1e-13)) {
            rep.rigorous_pass = false;
            rep.rigorous_first_violation_t = r.t;
            break;
        }
    }

    // Literal printed rate: recorded for comparison, never a failure source.
    rep.r_sq_theorem = (p.alpha > 0.5 && p.a > 0.0) ? absorbing_ball_radius(p, L) : kNaN;
    rep.literal_pass = false;
    rep.literal_first_violation_t = kNaN;
    if (std::isfinite(rep.r_sq_theorem)) {
        rep.literal_pass = true;
        for (const MonitorRecord& r : series) {
            const double decay = std::exp(-rep.consts.rate_literal * (r.t - t0));
            const double bound = E0 * decay + rep.r_sq_theorem * (1.0 - decay);
            if (!(r.E <= bound * (1.0 + 1e-9) + 1e-13)) {
                rep.literal_pass = false;
                rep.literal_first_violation_t = r.t;
                break;
            }
        }
    }

    // Predicted entry of the rigorous envelope into 1.05 x the limsup ball.
    rep.predicted_entry_t = kNaN;
    if (std::isfinite(rep.r_sq_theorem)) {
        const double target = 1.05 * rep.r_sq_theorem;
        if (E0 <= target)
            rep.predicted_entry_t = t0;
        else if (r2r >= target)
            rep.predicted_entry_t = kInf;
        else
            rep.predicted_entry_t = t0 + std::log((E0 - r2r) / (target - r2r)) / rep.consts.mu;
    }

    const double t_end = series.back().t;
    const double tq = t0 + 0.75 * (t_end - t0);
    rep.limsup_E = 0.0;
    for (const MonitorRecord& r : series)
        if (r.t >= tq) rep.limsup_E = std::max(rep.limsup_E, r.E);
    rep.limsup_engaged = std::isfinite(rep.predicted_entry_t) && tq >= rep.predicted_entry_t;
    rep.limsup_pass = rep.limsup_engaged && rep.limsup_E <= 1.05 * rep.r_sq_theorem;
    return rep;
}

MonotonicityReport monotonicity_check(const Vec3& x, const Vec3& y, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw InvalidStateError("monotonicity_check: alpha must be finite and >= 0");
    const double nx = x.norm();
    const double ny = y.norm();
    MonotonicityReport rep;
    const Vec3 d = x - y;
    rep.rhs = (std::pow(nx, 2.0 * alpha) * x - std::pow(ny, 2.0 * alpha) * y).dot(d);
    rep.denom = d.squaredNorm() * std::pow(nx + ny, 2.0 * alpha);
    if (rep.denom > 0.0) rep.ratio = rep.rhs / rep.denom;
    return rep;
}

double monotonicity_min_ratio_1d(double alpha, int samples) {
    if (samples < 2) throw InvalidStateError("monotonicity_min_ratio_1d: needs >= 2 samples");
    const double e = 2.0 * alpha + 1.0;
    double lo = kInf;
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        // Same-sign branch x = r e, y = t r e; the t -> 1 limit is (2a+1)/4^a.
        double g1;
        if (t < 1.0)
            g1 = (1.0 - std::pow(t, e)) / ((1.0 - t) * std::pow(1.0 + t, 2.0 * alpha));
        else
            g1 = e / std::pow(4.0, alpha);
        // Opposite-sign branch x = r e, y = -t r e.
        const double g2 = (1.0 + std::pow(t, e)) / std::pow(1.0 + t, e);
        lo = std::min(lo, std::min(g1, g2));
    }
    return lo;
}

SvReport stroock_varopoulos_check(const PhysicalField& b, double alpha, int oversample) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InvalidStateError("stroock_varopoulos_check: needs alpha > 0");
    if (oversample < 1)
        throw InvalidStateError("stroock_varopoulos_check: oversample factor must be >= 1");

    SvReport rep;
    double bmax = 0.0;
    for (int d = 0; d < 3; ++d) bmax = std::max(bmax, b.v[d].abs().maxCoeff());
    if (bmax == 0.0) return rep;  // zero field: nothing to check
    rep.defined = true;

    const double q = (alpha + 3.0) / alpha;
    const double s = 3.0 * (alpha + 1.0) / (2.0 * alpha);
    const double pref = (4.0 / 9.0) * alpha * (2.0 * alpha + 3.0) / std::pow(alpha + 1.0, 2);
    // Shared exponent of |b|^2 multiplying the |grad |b||^2 terms on both sides.
    const double we = (3.0 - alpha) / (2.0 * alpha);
    const auto near_int = [](double x) { return std::abs(x - std::round(x)) < 1e-12; };
    rep.slack = (near_int(q / 2.0) && near_int(we)) ? 1e-6 : 1e-3;

    const SpectralVectorField bs = to_spectral(b);
    const int M = oversample * bs.grid.N();
    const PhysicalField bp = to_physical(bs, M);
    std::array<PhysicalField, 3> gb;
    for (int ax = 0; ax < 3; ++ax) gb[ax] = to_physical(derivative(bs, ax), M);

    const std::ptrdiff_t n = bp.v[0].size();
    double lhs = 0.0, rhs = 0.0;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double bx = bp.v[0][i], by = bp.v[1][i], bz = bp.v[2][i];
        const double m2 = bx * bx + by * by + bz * bz;
        if (m2 <= 0.0) continue;
        double gradsq = 0.0;  // sum_{jd} (d_j b_d)^2
        double gdot = 0.0;    // sum_j (b . d_j b)^2
        for (int ax = 0; ax < 3; ++ax) {
            const double gx = gb[ax].v[0][i], gy = gb[ax].v[1][i], gz = gb[ax].v[2][i];
            gradsq += gx * gx + gy * gy + gz * gz;
            const double pr = bx * gx + by * gy + bz * gz;
            gdot += pr * pr;
        }
        const double w = std::pow(m2, we);  // |b|^{q-2} = |b|^{2s-4}
        lhs += w * (m2 * gradsq + q * gdot);
        rhs += pref * s * s * w * gdot;
    }
    const double cell = bp.cell_volume();
    rep.lhs = lhs * cell;
    rep.rhs = rhs * cell;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : kInf;
    rep.pass = rep.rhs > 0.0 ? rep.ratio >= 1.0 - rep.slack : true;
    return rep;
}

EnergyBudget energy_budget(const std::vector<MonitorRecord>& window, const PhysParams& p) {
    p.validate();
    if (window.size() < 2)
        throw InvalidStateError("energy_budget: needs at least 2 records");
    require_increasing(window, "energy_budget");

    const auto dissipation = [&](const MonitorRecord& r) {
        return 2.0 * p.nu * r.grad_u_sq + 2.0 * p.kappa * r.grad_b_sq + 2.0 * p.a * r.u_damp_norm;
    };
    EnergyBudget eb;
    eb.t0 = window.front().t;
    eb.t1 = window.back().t;
    eb.dE = window.back().E - window.front().E;
    for (std::size_t i = 1; i < window.size(); ++i)
        eb.dissipation_integral += 0.5 * (dissipation(window[i]) + dissipation(window[i - 1])) *
                                   (window[i].t - window[i - 1].t);
    eb.residual = eb.dE + eb.dissipation_integral;
    return eb;
}

}  // namespace mhdbfed
