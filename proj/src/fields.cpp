#include "mhdbfed/fields.hpp"

#include "mhdbfed/errors.hpp"

namespace mhdbfed {

namespace {
void check_same_grid(const SpectralVectorField& a, const SpectralVectorField& b) {
    if (!(a.grid == b.grid))
        throw InvalidStateError("spectral field algebra requires matching grids");
}
}  // namespace

SpectralVectorField operator+(const SpectralVectorField& a, const SpectralVectorField& b) {
    check_same_grid(a, b);
    SpectralVectorField r(a.grid);
    for (int d = 0; d < 3; ++d) r.c[d] = a.c[d] + b.c[d];
    return r;
}

SpectralVectorField operator-(const SpectralVectorField& a, const SpectralVectorField& b) {
    check_same_grid(a, b);
    SpectralVectorField r(a.grid);
    for (int d = 0; d < 3; ++d) r.c[d] = a.c[d] - b.c[d];
    return r;
}

SpectralVectorField operator*(double s, const SpectralVectorField& a) {
    SpectralVectorField r(a.grid);
    for (int d = 0; d < 3; ++d) r.c[d] = s * a.c[d];
    return r;
}

SpectralVectorField operator*(Complex s, const SpectralVectorField& a) {
    SpectralVectorField r(a.grid);
    for (int d = 0; d < 3; ++d) r.c[d] = s * a.c[d];
    return r;
}

SpectralVectorField& operator+=(SpectralVectorField& a, const SpectralVectorField& b) {
    check_same_grid(a, b);
    for (int d = 0; d < 3; ++d) a.c[d] += b.c[d];
    return a;
}

SpectralVectorField& operator-=(SpectralVectorField& a, const SpectralVectorField& b) {
    check_same_grid(a, b);
    for (int d = 0; d < 3; ++d) a.c[d] -= b.c[d];
    return a;
}

SpectralVectorField& operator*=(SpectralVectorField& a, double s) {
    for (int d = 0; d < 3; ++d) a.c[d] *= s;
    return a;
}

void axpy(double s, const SpectralVectorField& b, SpectralVectorField& a) {
    check_same_grid(a, b);
    for (int d = 0; d < 3; ++d) a.c[d] += s * b.c[d];
}

void scale_by(SpectralVectorField& a, const Eigen::ArrayXd& w) {
    for (int d = 0; d < 3; ++d) {
        Complex* p = a.c[d].data();
        const double* wp = w.data();
        const Eigen::Index n = a.c[d].size();
        for (Eigen::Index i = 0; i < n; ++i) p[i] *= wp[i];
    }
}

SpectralVectorField scaled(const SpectralVectorField& a, const Eigen::ArrayXd& w) {
    SpectralVectorField r = a;
    scale_by(r, w);
    return r;
}

}  // namespace mhdbfed
