#include "mhdbfed/rhs.hpp"

#include <cmath>

#include "mhdbfed/errors.hpp"
#include "mhdbfed/spectral_ops.hpp"
#include "mhdbfed/transforms.hpp"

namespace mhdbfed {

void PhysParams::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(nu) || !finite(kappa) || !finite(a) || !finite(alpha))
        throw InvalidStateError("physical parameters must be finite");
    if (!(nu > 0)) throw InvalidStateError("nu must be positive");
    if (!(kappa > 0)) throw InvalidStateError("kappa must be positive");
    if (a < 0) throw InvalidStateError("damping amplitude a must be nonnegative");
    if (alpha < 0) throw InvalidStateError("damping exponent alpha must be nonnegative");
}

namespace {

constexpr double kDivTol = 1e-8;

/// All nine padded-grid samples of grad w: gradw[j] holds d w / d x_j.
std::array<PhysicalField, 3> padded_gradient(const SpectralVectorField& w, int M) {
    std::array<PhysicalField, 3> g;
    for (int j = 0; j < 3; ++j) g[j] = to_physical(derivative(w, j), M);
    return g;
}

/// (v . grad) w assembled from padded samples, folded back and dealiased.
SpectralVectorField advect_assemble(const PhysicalField& vp,
                                    const std::array<PhysicalField, 3>& gradw) {
    PhysicalField prod(vp.grid, vp.M);
    for (int i = 0; i < 3; ++i)
        prod.v[i] = vp.v[0] * gradw[0].v[i] + vp.v[1] * gradw[1].v[i] + vp.v[2] * gradw[2].v[i];
    SpectralVectorField out = to_spectral(prod);
    dealias(out);
    return out;
}

/// a |u|^(2 alpha) u from padded samples, folded back (no dealias).  The
/// Nyquist planes of the fold are dropped so the damped velocity keeps a
/// pointwise-solenoidal padded interpolant; see the header note.
SpectralVectorField damping_assemble(const PhysicalField& up, double a, double alpha) {
    PhysicalField prod(up.grid, up.M);
    Eigen::ArrayXd mag2 = up.v[0].square() + up.v[1].square() + up.v[2].square();
    Eigen::ArrayXd factor;
    if (alpha == 1.0)
        factor = a * mag2;
    else if (alpha == 2.0)
        factor = a * mag2.square();
    else
        factor = a * mag2.pow(alpha);  // pow(0, alpha>0) = 0: no-flow points damp to zero
    for (int i = 0; i < 3; ++i) prod.v[i] = factor * up.v[i];
    SpectralVectorField out = to_spectral(prod);
    zero_nyquist(out);
    return out;
}

void check_solenoidal(const SpectralVectorField& f, const char* which) {
    if (div_residual(f) > kDivTol)
        throw InvalidStateError(std::string("tendency: ") + which +
                                " violates the divergence-free precondition");
}

Tendency assemble_tendency(const State& s, const PhysParams& p, const Forcing& f,
                           bool with_diffusion) {
    p.validate();
    check_solenoidal(s.u, "u");
    check_solenoidal(s.b, "b");

    const Grid& g = s.grid();
    const int M = padded_size(g.N());
    const PhysicalField up = to_physical(s.u, M);
    const PhysicalField bp = to_physical(s.b, M);
    const auto gradu = padded_gradient(s.u, M);
    const auto gradb = padded_gradient(s.b, M);

    // Momentum bundle, then project; diffusion stays outside the projection
    // (it commutes with P on solenoidal fields).
    SpectralVectorField du = advect_assemble(bp, gradb);  //  +(b.grad) b
    du -= advect_assemble(up, gradu);                     //  -(u.grad) u
    if (p.a != 0.0) {
        if (p.alpha == 0.0)
            axpy(-p.a, s.u, du);
        else
            du -= damping_assemble(up, p.a, p.alpha);
    }
    if (f.u) du += f.u(s.t);
    leray_project(du);

    SpectralVectorField db = advect_assemble(bp, gradu);  //  +(b.grad) u
    db -= advect_assemble(up, gradb);                     //  -(u.grad) b
    if (f.b) db += f.b(s.t);

    if (with_diffusion) {
        du += p.nu * laplacian(s.u);
        db += p.kappa * laplacian(s.b);
    }
    return {std::move(du), std::move(db)};
}

}  // namespace

SpectralVectorField advect(const SpectralVectorField& v, const SpectralVectorField& w) {
    if (!(v.grid == w.grid)) throw InvalidStateError("advect: grids differ");
    const int M = padded_size(v.grid.N());
    return advect_assemble(to_physical(v, M), padded_gradient(w, M));
}

SpectralVectorField damping(const SpectralVectorField& u, double a, double alpha) {
    if (!(a >= 0.0) || !(alpha >= 0.0))
        throw InvalidStateError("damping: a and alpha must be nonnegative");
    if (a == 0.0) return SpectralVectorField(u.grid);
    if (alpha == 0.0) return a * u;
    const int M = padded_size(u.grid.N());
    return damping_assemble(to_physical(u, M), a, alpha);
}

Tendency tendency(const State& s, const PhysParams& p, const Forcing& f) {
    return assemble_tendency(s, p, f, true);
}

Tendency nonstiff_tendency(const State& s, const PhysParams& p, const Forcing& f) {
    return assemble_tendency(s, p, f, false);
}

PhysicalScalarField pressure_recover(const State& s, const PhysParams& p) {
    p.validate();
    const Grid& g = s.grid();
    const int M = padded_size(g.N());
    const PhysicalField up = to_physical(s.u, M);
    const PhysicalField bp = to_physical(s.b, M);

    SpectralVectorField bundle = advect_assemble(up, padded_gradient(s.u, M));
    bundle -= advect_assemble(bp, padded_gradient(s.b, M));
    if (p.a != 0.0) {
        if (p.alpha == 0.0)
            axpy(p.a, s.u, bundle);
        else
            bundle += damping_assemble(up, p.a, p.alpha);
    }

    // grad p = -(I - P) G, i.e. p_hat = i (k . G_hat)/|k|^2, zero mean.
    SpectralScalarField phat(g);
    const Eigen::Index n = g.spec_size();
    for (Eigen::Index idx = 0; idx < n; ++idx) {
        const double kx = g.kderiv(0)[idx], ky = g.kderiv(1)[idx], kz = g.kderiv(2)[idx];
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        const Complex kdotg =
            kx * bundle.c[0][idx] + ky * bundle.c[1][idx] + kz * bundle.c[2][idx];
        phat.c[idx] = Complex(0.0, 1.0) * kdotg / k2;
    }
    return to_physical(phat);
}

}  // namespace mhdbfed
