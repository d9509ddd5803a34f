#pragma once

#include "mhdbfed/fields.hpp"

namespace mhdbfed {

/// Velocity and magnetic field in spectral form, plus simulation time.
struct State {
    SpectralVectorField u;
    SpectralVectorField b;
    double t = 0.0;

    State() = default;
    explicit State(const Grid& g) : u(g), b(g) {}
    const Grid& grid() const { return u.grid; }
    bool all_finite() const { return u.all_finite() && b.all_finite(); }
};

}  // namespace mhdbfed
