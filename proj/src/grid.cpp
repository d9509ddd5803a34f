#include "mhdbfed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mhdbfed/errors.hpp"

namespace mhdbfed {

Grid::Grid(int N, double L) {
    if (N < 4 || N % 2 != 0)
        throw InvalidStateError("grid size N must be even and >= 4, got " + std::to_string(N));
    if (!(L > 0) || !std::isfinite(L))
        throw InvalidStateError("box length L must be positive and finite");

    auto d = std::make_shared<Data>();
    d->N = N;
    d->L = L;
    d->spec_size = static_cast<Eigen::Index>(N) * N * (N / 2 + 1);
    d->phys_size = static_cast<Eigen::Index>(N) * N * N;
    d->k0 = 2.0 * std::numbers::pi / L;
    d->lambda1 = d->k0 * d->k0;
    d->volume = L * L * L;

    d->ksq.resize(d->spec_size);
    d->pair_weight.resize(d->spec_size);
    d->dealias_mask.resize(d->spec_size);
    for (int axis = 0; axis < 3; ++axis) {
        d->kcomp[axis].resize(d->spec_size);
        d->kderiv[axis].resize(d->spec_size);
        d->fcomp[axis].resize(d->spec_size);
    }

    const int nzh = N / 2 + 1;
    Eigen::Index idx = 0;
    for (int i = 0; i < N; ++i) {
        const int fx = i <= N / 2 ? i : i - N;
        for (int j = 0; j < N; ++j) {
            const int fy = j <= N / 2 ? j : j - N;
            for (int k = 0; k < nzh; ++k, ++idx) {
                d->fcomp[0][idx] = fx;
                d->fcomp[1][idx] = fy;
                d->fcomp[2][idx] = k;
                d->kcomp[0][idx] = d->k0 * fx;
                d->kcomp[1][idx] = d->k0 * fy;
                d->kcomp[2][idx] = d->k0 * k;
                d->kderiv[0][idx] = fx == N / 2 ? 0.0 : d->k0 * fx;
                d->kderiv[1][idx] = fy == N / 2 ? 0.0 : d->k0 * fy;
                d->kderiv[2][idx] = k == N / 2 ? 0.0 : d->k0 * k;
                d->ksq[idx] = d->lambda1 * (double(fx) * fx + double(fy) * fy + double(k) * k);
                // kz = 0 and kz = N/2 slots carry their own conjugate image;
                // every other stored slot stands for a +/- kz pair.
                d->pair_weight[idx] = (k == 0 || k == N / 2) ? 1.0 : 2.0;
                const int fmax = std::max({std::abs(fx), std::abs(fy), k});
                d->dealias_mask[idx] = 3 * fmax <= N ? 1.0 : 0.0;
            }
        }
    }
    data_ = std::move(d);
}

Grid make_grid(int N, double L) { return Grid(N, L); }

}  // namespace mhdbfed
