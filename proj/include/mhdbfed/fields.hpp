#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>

#include "mhdbfed/grid.hpp"

namespace mhdbfed {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// Divergence-free-capable vector field stored as forward-normalized
/// Fourier amplitudes on the half-complex layout of its grid.
struct SpectralVectorField {
    Grid grid;
    std::array<Eigen::ArrayXcd, 3> c;

    SpectralVectorField() = default;
    explicit SpectralVectorField(const Grid& g) : grid(g) {
        for (auto& a : c) a = Eigen::ArrayXcd::Zero(g.spec_size());
    }

    Complex& at(int comp, int i, int j, int k) { return c[comp][grid.index(i, j, k)]; }
    Complex at(int comp, int i, int j, int k) const { return c[comp][grid.index(i, j, k)]; }

    void set_zero() {
        for (auto& a : c) a.setZero();
    }
    bool all_finite() const { return c[0].allFinite() && c[1].allFinite() && c[2].allFinite(); }
};

/// Scalar counterpart of SpectralVectorField (pressure, potentials).
struct SpectralScalarField {
    Grid grid;
    Eigen::ArrayXcd c;

    SpectralScalarField() = default;
    explicit SpectralScalarField(const Grid& g)
        : grid(g), c(Eigen::ArrayXcd::Zero(g.spec_size())) {}
};

/// Vector field sampled on an M^3 collocation grid (M = grid.N() or a
/// padded size), row-major with z fastest.  Carries the logical grid it
/// represents so norms know the box volume.
struct PhysicalField {
    Grid grid;
    int M = 0;
    std::array<Eigen::ArrayXd, 3> v;

    PhysicalField() = default;
    PhysicalField(const Grid& g, int m) : grid(g), M(m) {
        const auto n = static_cast<Eigen::Index>(m) * m * m;
        for (auto& a : v) a = Eigen::ArrayXd::Zero(n);
    }

    Eigen::Index size() const { return v[0].size(); }
    double dx() const { return grid.L() / M; }
    /// Quadrature weight of one collocation cell, (L/M)^3.
    double cell_volume() const { return dx() * dx() * dx(); }
};

struct PhysicalScalarField {
    Grid grid;
    int M = 0;
    Eigen::ArrayXd v;

    PhysicalScalarField() = default;
    PhysicalScalarField(const Grid& g, int m)
        : grid(g), M(m), v(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(m) * m * m)) {}
};

// ---- expression-style algebra on spectral vector fields -------------------
// These allocate result fields; in-place forms below avoid that in hot loops.

SpectralVectorField operator+(const SpectralVectorField& a, const SpectralVectorField& b);
SpectralVectorField operator-(const SpectralVectorField& a, const SpectralVectorField& b);
SpectralVectorField operator*(double s, const SpectralVectorField& a);
SpectralVectorField operator*(Complex s, const SpectralVectorField& a);

SpectralVectorField& operator+=(SpectralVectorField& a, const SpectralVectorField& b);
SpectralVectorField& operator-=(SpectralVectorField& a, const SpectralVectorField& b);
SpectralVectorField& operator*=(SpectralVectorField& a, double s);

/// a += s*b without temporaries.
void axpy(double s, const SpectralVectorField& b, SpectralVectorField& a);
/// Component-wise a[i] *= w (real spectral multiplier, e.g. a semigroup).
void scale_by(SpectralVectorField& a, const Eigen::ArrayXd& w);
/// out = w .* a, leaving a untouched.
SpectralVectorField scaled(const SpectralVectorField& a, const Eigen::ArrayXd& w);

}  // namespace mhdbfed
