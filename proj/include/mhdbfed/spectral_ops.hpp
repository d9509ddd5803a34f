#pragma once

#include "mhdbfed/fields.hpp"

namespace mhdbfed {

/// Component-wise Laplacian, -|k|^2 f.  Even operator: Nyquist modes keep
/// their full |k|^2.
SpectralVectorField laplacian(const SpectralVectorField& f);

/// d/dx_axis applied to every component (i*k_axis multiplier, Nyquist
/// zeroed so real fields stay real).
SpectralVectorField derivative(const SpectralVectorField& f, int axis);
SpectralScalarField derivative(const SpectralScalarField& f, int axis);

/// i k . f with the odd-derivative Nyquist convention.
SpectralScalarField divergence(const SpectralVectorField& f);
SpectralVectorField gradient(const SpectralScalarField& f);

/// In-place Leray projection f <- f - k (k.f)/|k|^2 on every k != 0.
/// The zero mode is untouched; Nyquist modes project like any other since
/// k x k / |k|^2 is sign-blind.
void leray_project(SpectralVectorField& f);

/// 2/3-rule truncation: zeroes every mode with max_i |f_i| > N/3.
void dealias(SpectralVectorField& f);
void dealias(SpectralScalarField& f);

/// Zeroes the three Nyquist planes (any |f_i| = N/2).  A Nyquist coefficient
/// splits half-and-half between +N/2 and -N/2 when padded, and the two images
/// cannot both be solenoidal; dropping the planes keeps every field a
/// per-mode divergence-free interpolant on any collocation grid.
void zero_nyquist(SpectralVectorField& f);

// ---- integrals and norms ---------------------------------------------------
// Coefficient-space integrals use the half-spectrum pair weights and carry
// the box volume, so they equal the continuum integrals of the interpolant.

/// Integral of |f|^2 over the box.
double l2_norm_sq(const SpectralVectorField& f);
double l2_norm_sq(const SpectralScalarField& f);
/// Integral of |grad f|^2 (all nine partials for a vector field).
double grad_norm_sq(const SpectralVectorField& f);
/// Integral of a . b over the box.
double inner(const SpectralVectorField& a, const SpectralVectorField& b);
/// Box average of each component, i.e. the k = 0 amplitude.
Vec3 mean(const SpectralVectorField& f);

/// max_k |k_int . f(k)| / max_k |f(k)| with integer frequencies, the Nyquist
/// kept at +N/2 to match leray_project.  Zero field gives 0.
double div_residual(const SpectralVectorField& f);

/// Collocation L^p norm of the pointwise vector magnitude, p in [1, inf].
/// Finite p uses the rectangle rule with cell volume (L/M)^3.
double lp_norm(const PhysicalField& f, double p);
double lp_norm(const PhysicalScalarField& f, double p);

}  // namespace mhdbfed
