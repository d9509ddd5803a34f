#pragma once

#include "mhdbfed/fields.hpp"

namespace mhdbfed {

/// Collocation size used for alias-reduced quadratic products, 3N/2.
inline int padded_size(int N) { return (3 * N) / 2; }

/// Sets the FFTW thread count for subsequently created plans and drops the
/// plan cache.  Call before heavy work; thread count is recorded per run.
void set_fft_threads(int n);
int fft_threads();

/// Inverse transform onto an M^3 collocation grid, M >= grid.N().
/// For M > N the spectrum is zero-embedded first; Nyquist rows are split
/// half-and-half between the +N/2 and -N/2 slots of the finer spectrum so
/// the padded samples agree with the trigonometric interpolant.
PhysicalField to_physical(const SpectralVectorField& f, int M);
inline PhysicalField to_physical(const SpectralVectorField& f) {
    return to_physical(f, f.grid.N());
}
PhysicalScalarField to_physical(const SpectralScalarField& f, int M);
inline PhysicalScalarField to_physical(const SpectralScalarField& f) {
    return to_physical(f, f.grid.N());
}

/// Forward transform with amplitude normalization (coefficients carry 1/M^3),
/// folding the M-grid spectrum back onto the field's own grid when f.M > N.
/// Folding sums aliased Nyquist images, which makes
/// to_spectral(to_physical(f, M)) exact for Hermitian-consistent f.
SpectralVectorField to_spectral(const PhysicalField& f);
SpectralScalarField to_spectral(const PhysicalScalarField& f);

/// Re-expresses f on another grid of the same box: zero-embedding when the
/// target is finer, conjugate-aware folding when coarser.
SpectralVectorField regrid(const SpectralVectorField& f, const Grid& target);

/// Projects onto the Hermitian-consistent subspace (the image of r2c):
/// averages conjugate partners on the kz = 0 and kz = N/2 planes, where the
/// half-complex layout stores both members of a +/- k pair.
void enforce_hermitian(SpectralVectorField& f);
void enforce_hermitian(SpectralScalarField& f);

/// Max deviation from Hermitian consistency, relative to the largest
/// coefficient magnitude (0 for the zero field).
double hermitian_residual(const SpectralVectorField& f);

}  // namespace mhdbfed
