#pragma once

#include <functional>

#include "mhdbfed/state.hpp"

namespace mhdbfed {

/// Dissipation and damping coefficients of the momentum/induction system.
struct PhysParams {
    double nu = 0.0;     ///< kinematic viscosity
    double kappa = 0.0;  ///< magnetic diffusivity
    double a = 0.0;      ///< damping amplitude
    double alpha = 0.0;  ///< damping exponent: term is a |u|^(2 alpha) u

    /// Requires nu > 0, kappa > 0, a >= 0, alpha >= 0, all finite.
    void validate() const;
};

/// Optional body forces, evaluated spectrally at a given time.  Empty
/// std::function means zero forcing for that equation.
struct Forcing {
    std::function<SpectralVectorField(double)> u;
    std::function<SpectralVectorField(double)> b;
    bool any() const { return static_cast<bool>(u) || static_cast<bool>(b); }
};

/// Convective term (v . grad) w: gradients spectrally, products on the
/// 3N/2-padded grid, result folded back and 2/3-dealiased.  For dealiased,
/// divergence-free v this is alias-free, so <advect(v,w), w> vanishes to
/// roundoff.
SpectralVectorField advect(const SpectralVectorField& v, const SpectralVectorField& w);

/// Damping term a |u|^(2 alpha) u, evaluated pointwise on the padded grid
/// and folded back without dealiasing (the bundle is truncated, not
/// filtered, so its quadrature pairing with u stays exact).  The Nyquist
/// planes of the fold are dropped: their content is pure aliasing residue
/// of the fractional power, and velocities kept off those planes stay
/// pointwise solenoidal under padding, which the induction transport
/// identity needs.  a = 0 returns zero; alpha = 0 reduces to a*u in place.
/// |0|^(2 alpha) * 0 == 0.
SpectralVectorField damping(const SpectralVectorField& u, double a, double alpha);

struct Tendency {
    SpectralVectorField du;
    SpectralVectorField db;
};

/// Spectral time derivative of both fields:
///   du = P[-advect(u,u) + advect(b,b) - damping(u) + f_u] + nu  Lap u
///   db =   -advect(u,b) + advect(b,u)              + f_b  + kappa Lap b
/// P is the Leray projection; db needs none (it is divergence-free by
/// structure when b is).  Throws InvalidStateError when either input field
/// has divergence residual above 1e-8.
Tendency tendency(const State& s, const PhysParams& p, const Forcing& f = {});

/// Same assembly without the diffusion terms.  The integrating-factor
/// stepper applies the heat semigroups exactly and advances only this
/// non-stiff remainder through the Runge-Kutta stages.
Tendency nonstiff_tendency(const State& s, const PhysParams& p, const Forcing& f = {});

/// Pressure consistent with the projected momentum equation:
/// solves -Lap p = div G for the nonlinear bundle
/// G = advect(u,u) - advect(b,b) + damping(u), zero-mean convention.
PhysicalScalarField pressure_recover(const State& s, const PhysParams& p);

}  // namespace mhdbfed
