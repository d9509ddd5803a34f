#pragma once

#include <optional>
#include <vector>

#include "mhdbfed/rhs.hpp"
#include "mhdbfed/state.hpp"

namespace mhdbfed {

/// Per-step scalar diagnostics.  Energies and gradient norms come from the
/// coefficient-space sums; the damping and critical norms use padded-grid
/// quadrature.  u_damp_norm carries the full power ||u||_{2a+2}^{2a+2};
/// b_crit_norm is ||b||_{3(alpha+1)/alpha} and is absent for alpha = 0.
struct MonitorRecord {
    double t = 0.0;
    double E = 0.0;
    double grad_u_sq = 0.0;
    double grad_b_sq = 0.0;
    double u_damp_norm = 0.0;
    std::optional<double> b_crit_norm;
    double div_u_res = 0.0;
    double div_b_res = 0.0;
    Vec3 mean_u = Vec3::Zero();
    Vec3 mean_b = Vec3::Zero();
};

MonitorRecord monitor(const State& s, const PhysParams& p);

/// Squared limsup radius R^2 = L^3 a^{-1/(2 alpha - 1)} (nu/lambda)^{(2 alpha + 2)/(2 alpha - 1)} / max(kappa, nu).
/// Requires alpha > 1/2 (the exponents pole at 1/2) and a, nu, kappa > 0.
double absorbing_ball_radius(const PhysParams& p, double L);

/// Constants of the provable decay envelope
///   E(t) <= E(0) e^{-mu t} + (K/mu) (1 - e^{-mu t}).
/// mu = min(2 kappa lambda, mu_u).  For a > 0, alpha > 0 the damping term is
/// traded for linear decay via Young's inequality with the box-Holder bound
/// ||u||_{2a+2}^{2a+2} >= (||u||_2^2)^{alpha+1} |O|^{-alpha}:
///   mu_u X <= 2 a X^{alpha+1} |O|^{-alpha} + K  for all X >= 0,
/// with mu_u = 2 nu lambda and the sharp
///   K = |O| (alpha/(alpha+1)) (alpha+1)^{-1/alpha} (2a)^{-1/alpha} mu_u^{(alpha+1)/alpha}.
/// alpha = 0 extracts mu_u = 2a exactly (K = 0); a = 0 falls back to the
/// Poincare rate mu_u = 2 nu lambda with K = 0.
struct EnvelopeConstants {
    double mu_u = 0.0;
    double mu = 0.0;
    double K = 0.0;
    double r_sq_rigorous = 0.0;   ///< K/mu, the envelope's asymptote
    double rate_literal = 0.0;    ///< 2 max(kappa, nu)/lambda, as printed upstream
};
EnvelopeConstants envelope_constants(const PhysParams& p, double L);

struct EnvelopeReport {
    EnvelopeConstants consts;
    bool rigorous_pass = false;
    double rigorous_first_violation_t = 0.0;  ///< NaN when rigorous_pass
    bool literal_pass = false;                ///< recorded, never asserted
    double literal_first_violation_t = 0.0;
    double r_sq_theorem = 0.0;  ///< absorbing_ball_radius, NaN if alpha <= 1/2
    double predicted_entry_t = 0.0;  ///< envelope crossing of 1.05 r_sq_theorem; +inf if never
    bool limsup_engaged = false;     ///< final quartile fully past predicted_entry_t
    bool limsup_pass = false;
    double limsup_E = 0.0;  ///< max E over the final quartile
};

/// Checks an unforced run's energy series against the rigorous envelope
/// (asserted), the literal printed envelope (recorded), and the final-quartile
/// limsup bound when the envelope can certify entry.  Needs >= 16 records.
EnvelopeReport decay_envelope_check(const std::vector<MonitorRecord>& series,
                                    const PhysParams& p, double L);

/// One evaluation of the damping-difference monotonicity bound
///   c |x-y|^2 (|x|+|y|)^{2 alpha} <= (|x|^{2 alpha} x - |y|^{2 alpha} y) . (x-y).
struct MonotonicityReport {
    double rhs = 0.0;    ///< the right-hand pairing; always >= 0
    double denom = 0.0;  ///< |x-y|^2 (|x|+|y|)^{2 alpha}
    std::optional<double> ratio;  ///< rhs/denom when denom > 0
};
MonotonicityReport monotonicity_check(const Vec3& x, const Vec3& y, double alpha);

/// Oracle for the sharp constant c_alpha: the ratio is scale- and
/// rotation-invariant and monotone in the angle between x and y, so its
/// minimum lies on the collinear (same- or opposite-sign) configurations.
/// Dense scan of both 1D branches over s/r in [0,1].
double monotonicity_min_ratio_1d(double alpha, int samples = 200001);

/// Discrete two-sided check of the diffusion/power-law inequality
///   integral grad b : grad(b |b|^q) >= (4/9) (alpha (2 alpha + 3)/(alpha+1)^2) || grad |b|^s ||_2^2,
/// q = (alpha+3)/alpha, s = 3 (alpha+1)/(2 alpha).  Both sides are assembled
/// pointwise from spectral derivatives on an oversampled grid, so the
/// pointwise Cauchy-Schwarz structure survives quadrature.
struct SvReport {
    bool defined = false;  ///< false for the zero field
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  ///< +inf when rhs = 0 with lhs > 0
    double slack = 0.0;  ///< 1e-6 for integer exponent pairs, else 1e-3
    bool pass = false;
};
SvReport stroock_varopoulos_check(const PhysicalField& b, double alpha, int oversample = 2);

/// Windowed discrete energy identity: residual = dE + trapezoid of
/// 2 nu |grad u|^2 + 2 kappa |grad b|^2 + 2 a ||u||_{2a+2}^{2a+2}.
struct EnergyBudget {
    double t0 = 0.0, t1 = 0.0;
    double dE = 0.0;
    double dissipation_integral = 0.0;
    double residual = 0.0;
};
EnergyBudget energy_budget(const std::vector<MonitorRecord>& window, const PhysParams& p);

}  // namespace mhdbfed
