#pragma once

#include <Eigen/Core>
#include <memory>

#include "mhdbfed/errors.hpp"

namespace mhdbfed {

/// Periodic box [0,L]^3 sampled on an N^3 collocation grid, with the
/// index bookkeeping for the half-complex (r2c) spectral layout.
///
/// Spectral storage is row-major over (kx, ky, kz) with kz fastest and
/// truncated to kz >= 0: dimensions N x N x (N/2+1).  Along x and y the
/// integer frequency of slot i is i for i <= N/2 and i-N beyond.  The
/// physical wavenumber is (2*pi/L) times the integer frequency.
///
/// Grid is a cheap value type; the precomputed wavenumber tables live in
/// an immutable shared block so fields can carry their grid by value.
class Grid {
  public:
    Grid() = default;
    Grid(int N, double L);

    int N() const { return data_->N; }
    double L() const { return data_->L; }

    /// Number of stored spectral slots per scalar component, N*N*(N/2+1).
    Eigen::Index spec_size() const { return data_->spec_size; }
    /// Number of collocation points per scalar component, N^3.
    Eigen::Index phys_size() const { return data_->phys_size; }
    int nz_half() const { return data_->N / 2 + 1; }

    /// Smallest positive eigenvalue of -Laplacian on the box, (2*pi/L)^2.
    double lambda1() const { return data_->lambda1; }
    /// 2*pi/L, the wavenumber of the gravest mode.
    double k0() const { return data_->k0; }
    /// Box volume L^3.
    double volume() const { return data_->volume; }

    /// Integer frequency along x or y for storage index i in [0,N).
    int freq(int i) const { return i <= data_->N / 2 ? i : i - data_->N; }

    Eigen::Index index(int i, int j, int k) const {
        return (static_cast<Eigen::Index>(i) * data_->N + j) * nz_half() + k;
    }

    /// Scaled |k|^2 = (2*pi/L)^2 * (fx^2+fy^2+fz^2) per stored slot.
    const Eigen::ArrayXd& ksq() const { return data_->ksq; }
    /// Scaled wavenumber component along axis (0,1,2) per stored slot.
    /// The Nyquist frequency enters with its positive sign; odd-derivative
    /// operators zero it explicitly instead.
    const Eigen::ArrayXd& kcomp(int axis) const { return data_->kcomp[axis]; }
    /// Odd-derivative multiplier: kcomp with the sign-ambiguous Nyquist
    /// frequency zeroed, so d/dx of a real field stays real.
    const Eigen::ArrayXd& kderiv(int axis) const { return data_->kderiv[axis]; }
    /// Integer frequency component along axis per stored slot.
    const Eigen::ArrayXi& fcomp(int axis) const { return data_->fcomp[axis]; }
    /// 1 on modes kept by the 2/3 rule (max_i 3|f_i| <= N), 0 elsewhere.
    const Eigen::ArrayXd& dealias_mask() const { return data_->dealias_mask; }

    /// Parseval weight per stored slot: 2 for interior kz (conjugate pair
    /// folded away by the half-complex layout), 1 for kz = 0 and kz = N/2.
    const Eigen::ArrayXd& pair_weight() const { return data_->pair_weight; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.data_->N == b.data_->N && a.data_->L == b.data_->L;
    }

  private:
    struct Data {
        int N = 0;
        double L = 0;
        Eigen::Index spec_size = 0, phys_size = 0;
        double lambda1 = 0, k0 = 0, volume = 0;
        Eigen::ArrayXd ksq;
        Eigen::ArrayXd kcomp[3];
        Eigen::ArrayXd kderiv[3];
        Eigen::ArrayXi fcomp[3];
        Eigen::ArrayXd pair_weight;
        Eigen::ArrayXd dealias_mask;
    };
    std::shared_ptr<const Data> data_;
};

/// Validates N (even, >= 4) and L (> 0) and builds the wavenumber tables.
Grid make_grid(int N, double L);

}  // namespace mhdbfed
