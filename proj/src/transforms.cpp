#include "mhdbfed/transforms.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include "mhdbfed/errors.hpp"

namespace mhdbfed {

namespace {

// ---- FFTW plan cache -------------------------------------------------------
// One r2c/c2r plan pair per collocation size, created with FFTW_ESTIMATE so
// planning never depends on runtime measurements (bit-reproducible runs).
// Execution uses the new-array interface on fftw_malloc'd scratch, which is
// thread-safe; creation and cache access are serialized by a mutex.

struct PlanSet {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    ~PlanSet() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }
};

std::mutex g_plan_mutex;
std::map<int, std::unique_ptr<PlanSet>> g_plan_cache;
int g_threads = 1;

struct FftwBuf {
    void* p = nullptr;
    explicit FftwBuf(size_t bytes) : p(fftw_malloc(bytes)) {
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuf() { fftw_free(p); }
    FftwBuf(const FftwBuf&) = delete;
    FftwBuf& operator=(const FftwBuf&) = delete;
};

PlanSet& plan_for(int M) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = g_plan_cache.find(M);
    if (it != g_plan_cache.end()) return *it->second;

    static bool threads_ready = [] {
        fftw_init_threads();
        return true;
    }();
    (void)threads_ready;
    fftw_plan_with_nthreads(g_threads);

    const size_t nreal = static_cast<size_t>(M) * M * M;
    const size_t ncplx = static_cast<size_t>(M) * M * (M / 2 + 1);
    FftwBuf real_proto(nreal * sizeof(double));
    FftwBuf cplx_proto(ncplx * sizeof(fftw_complex));

    auto ps = std::make_unique<PlanSet>();
    ps->r2c = fftw_plan_dft_r2c_3d(M, M, M, static_cast<double*>(real_proto.p),
                                   static_cast<fftw_complex*>(cplx_proto.p), FFTW_ESTIMATE);
    ps->c2r = fftw_plan_dft_c2r_3d(M, M, M, static_cast<fftw_complex*>(cplx_proto.p),
                                   static_cast<double*>(real_proto.p), FFTW_ESTIMATE);
    if (!ps->r2c || !ps->c2r) throw Error("fftw plan creation failed for M=" + std::to_string(M));
    auto& ref = *ps;
    g_plan_cache.emplace(M, std::move(ps));
    return ref;
}

inline Eigen::Index half_idx(int i, int j, int k, int n, int nzh) {
    return (static_cast<Eigen::Index>(i) * n + j) * nzh + k;
}

// Zero-embed an N-grid half spectrum into an M-grid one (M >= N).  A Nyquist
// frequency N/2 of the coarse grid is no longer self-paired on the fine grid,
// so its amplitude splits evenly between +N/2 and -N/2; along z the -N/2 half
// stays implicit in the Hermitian symmetry, leaving weight 1/2 on the stored
// +N/2 plane.
void embed_half(const Complex* src, int N, Complex* dst, int M) {
    const int nzh_s = N / 2 + 1, nzh_d = M / 2 + 1;
    std::memset(static_cast<void*>(dst), 0,
                sizeof(Complex) * static_cast<size_t>(M) * M * nzh_d);
    const bool pad = M > N;
    for (int i = 0; i < N; ++i) {
        const int fx = i <= N / 2 ? i : i - N;
        const bool nyx = pad && fx == N / 2;
        const int ix0 = fx >= 0 ? fx : fx + M;
        for (int j = 0; j < N; ++j) {
            const int fy = j <= N / 2 ? j : j - N;
            const bool nyy = pad && fy == N / 2;
            const int iy0 = fy >= 0 ? fy : fy + M;
            for (int k = 0; k < nzh_s; ++k) {
                Complex val = src[half_idx(i, j, k, N, nzh_s)];
                if (val == Complex(0.0, 0.0)) continue;
                if (pad && k == N / 2) val *= 0.5;
                const int nx = nyx ? 2 : 1;
                const int ny = nyy ? 2 : 1;
                for (int bx = 0; bx < nx; ++bx) {
                    const int ix = bx == 0 ? ix0 : M - N / 2;
                    for (int by = 0; by < ny; ++by) {
                        const int iy = by == 0 ? iy0 : M - N / 2;
                        dst[half_idx(ix, iy, k, M, nzh_d)] +=
                            val * (nyx ? 0.5 : 1.0) * (nyy ? 0.5 : 1.0);
                    }
                }
            }
        }
    }
}

// Fold an M-grid half spectrum down to N (M >= N): every coarse slot collects
// all fine-grid frequencies congruent to it, i.e. the two +/- N/2 images on
// Nyquist rows.  Negative-kz images are read through the Hermitian mirror.
// This is the exact inverse of embed_half on Hermitian-consistent input.
void fold_half(const Complex* src, int M, Complex* dst, int N) {
    const int nzh_s = M / 2 + 1, nzh_d = N / 2 + 1;
    const bool pad = M > N;
    auto lookup = [&](int gx, int gy, int gz) -> Complex {
        if (gz < 0) {
            gx = -gx;
            gy = -gy;
            gz = -gz;
            const int ix = gx >= 0 ? gx : gx + M;
            const int iy = gy >= 0 ? gy : gy + M;
            return std::conj(src[half_idx(ix, iy, gz, M, nzh_s)]);
        }
        const int ix = gx >= 0 ? gx : gx + M;
        const int iy = gy >= 0 ? gy : gy + M;
        return src[half_idx(ix, iy, gz, M, nzh_s)];
    };
    for (int i = 0; i < N; ++i) {
        const int fx = i <= N / 2 ? i : i - N;
        const bool nyx = pad && fx == N / 2;
        for (int j = 0; j < N; ++j) {
            const int fy = j <= N / 2 ? j : j - N;
            const bool nyy = pad && fy == N / 2;
            for (int k = 0; k < nzh_d; ++k) {
                const bool nyz = pad && k == N / 2;
                Complex acc(0.0, 0.0);
                for (int bx = 0; bx < (nyx ? 2 : 1); ++bx) {
                    const int gx = bx == 0 ? fx : -N / 2;
                    for (int by = 0; by < (nyy ? 2 : 1); ++by) {
                        const int gy = by == 0 ? fy : -N / 2;
                        for (int bz = 0; bz < (nyz ? 2 : 1); ++bz) {
                            const int gz = bz == 0 ? k : -N / 2;
                            acc += lookup(gx, gy, gz);
                        }
                    }
                }
                dst[half_idx(i, j, k, N, nzh_d)] = acc;
            }
        }
    }
}

// Forward r2c with 1/M^3 normalization so coefficients are mode amplitudes.
void run_r2c(const double* in, int M, Complex* out) {
    PlanSet& ps = plan_for(M);
    const size_t nreal = static_cast<size_t>(M) * M * M;
    const size_t ncplx = static_cast<size_t>(M) * M * (M / 2 + 1);
    FftwBuf rbuf(nreal * sizeof(double));
    FftwBuf cbuf(ncplx * sizeof(fftw_complex));
    std::memcpy(rbuf.p, in, nreal * sizeof(double));
    fftw_execute_dft_r2c(ps.r2c, static_cast<double*>(rbuf.p),
                         static_cast<fftw_complex*>(cbuf.p));
    const double scale = 1.0 / (static_cast<double>(M) * M * M);
    const Complex* cp = static_cast<const Complex*>(cbuf.p);
    for (size_t idx = 0; idx < ncplx; ++idx) out[idx] = scale * cp[idx];
}

// Inverse c2r; FFTW's unnormalized sum matches the amplitude convention.
void run_c2r(const Complex* in, int M, double* out) {
    PlanSet& ps = plan_for(M);
    const size_t nreal = static_cast<size_t>(M) * M * M;
    const size_t ncplx = static_cast<size_t>(M) * M * (M / 2 + 1);
    FftwBuf rbuf(nreal * sizeof(double));
    FftwBuf cbuf(ncplx * sizeof(fftw_complex));
    std::memcpy(cbuf.p, in, ncplx * sizeof(Complex));
    fftw_execute_dft_c2r(ps.c2r, static_cast<fftw_complex*>(cbuf.p),
                         static_cast<double*>(rbuf.p));
    std::memcpy(out, rbuf.p, nreal * sizeof(double));
}

void backward_scalar(const Eigen::ArrayXcd& coeff, int N, int M, Eigen::ArrayXd& out) {
    if (M == N) {
        run_c2r(coeff.data(), M, out.data());
        return;
    }
    const size_t ncplx = static_cast<size_t>(M) * M * (M / 2 + 1);
    std::vector<Complex> padded(ncplx);
    embed_half(coeff.data(), N, padded.data(), M);
    run_c2r(padded.data(), M, out.data());
}

void forward_scalar(const Eigen::ArrayXd& samples, int M, int N, Eigen::ArrayXcd& out) {
    if (M == N) {
        run_r2c(samples.data(), M, out.data());
        return;
    }
    const size_t ncplx = static_cast<size_t>(M) * M * (M / 2 + 1);
    std::vector<Complex> full(ncplx);
    run_r2c(samples.data(), M, full.data());
    fold_half(full.data(), M, out.data(), N);
}

}  // namespace

void set_fft_threads(int n) {
    if (n < 1) throw InvalidStateError("fft thread count must be >= 1");
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    if (n != g_threads) {
        g_plan_cache.clear();
        g_threads = n;
    }
}

int fft_threads() {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    return g_threads;
}

PhysicalField to_physical(const SpectralVectorField& f, int M) {
    const int N = f.grid.N();
    if (M < N) throw InvalidStateError("to_physical: collocation size below grid size");
    PhysicalField out(f.grid, M);
    for (int d = 0; d < 3; ++d) backward_scalar(f.c[d], N, M, out.v[d]);
    return out;
}

PhysicalScalarField to_physical(const SpectralScalarField& f, int M) {
    const int N = f.grid.N();
    if (M < N) throw InvalidStateError("to_physical: collocation size below grid size");
    PhysicalScalarField out(f.grid, M);
    backward_scalar(f.c, N, M, out.v);
    return out;
}

SpectralVectorField to_spectral(const PhysicalField& f) {
    const int N = f.grid.N();
    if (f.M < N) throw InvalidStateError("to_spectral: collocation size below grid size");
    SpectralVectorField out(f.grid);
    for (int d = 0; d < 3; ++d) forward_scalar(f.v[d], f.M, N, out.c[d]);
    return out;
}

SpectralScalarField to_spectral(const PhysicalScalarField& f) {
    const int N = f.grid.N();
    if (f.M < N) throw InvalidStateError("to_spectral: collocation size below grid size");
    SpectralScalarField out(f.grid);
    forward_scalar(f.v, f.M, N, out.c);
    return out;
}

SpectralVectorField regrid(const SpectralVectorField& f, const Grid& target) {
    if (target.L() != f.grid.L())
        throw InvalidStateError("regrid: source and target must share the box length");
    SpectralVectorField out(target);
    const int N = f.grid.N(), Nt = target.N();
    for (int d = 0; d < 3; ++d) {
        if (Nt >= N)
            embed_half(f.c[d].data(), N, out.c[d].data(), Nt);
        else
            fold_half(f.c[d].data(), N, out.c[d].data(), Nt);
    }
    return out;
}

namespace {

void enforce_hermitian_scalar(Eigen::ArrayXcd& c, const Grid& g) {
    const int N = g.N();
    const int nzh = g.nz_half();
    for (int kplane = 0; kplane <= N / 2; kplane += N / 2) {  // kz = 0 and kz = N/2
        for (int i = 0; i < N; ++i) {
            const int ip = (N - i) % N;
            for (int j = 0; j < N; ++j) {
                const int jp = (N - j) % N;
                if (i > ip || (i == ip && j > jp)) continue;
                const Eigen::Index a = half_idx(i, j, kplane, N, nzh);
                const Eigen::Index b = half_idx(ip, jp, kplane, N, nzh);
                if (a == b) {
                    c[a] = Complex(c[a].real(), 0.0);
                } else {
                    const Complex avg = 0.5 * (c[a] + std::conj(c[b]));
                    c[a] = avg;
                    c[b] = std::conj(avg);
                }
            }
        }
    }
}

}  // namespace

void enforce_hermitian(SpectralVectorField& f) {
    for (int d = 0; d < 3; ++d) enforce_hermitian_scalar(f.c[d], f.grid);
}

void enforce_hermitian(SpectralScalarField& f) { enforce_hermitian_scalar(f.c, f.grid); }

double hermitian_residual(const SpectralVectorField& f) {
    const Grid& g = f.grid;
    const int N = g.N();
    const int nzh = g.nz_half();
    double worst = 0.0, largest = 0.0;
    for (int d = 0; d < 3; ++d) {
        largest = std::max(largest, f.c[d].abs().maxCoeff());
        for (int kplane = 0; kplane <= N / 2; kplane += N / 2) {
            for (int i = 0; i < N; ++i) {
                const int ip = (N - i) % N;
                for (int j = 0; j < N; ++j) {
                    const int jp = (N - j) % N;
                    const Complex a = f.c[d][half_idx(i, j, kplane, N, nzh)];
                    const Complex b = f.c[d][half_idx(ip, jp, kplane, N, nzh)];
                    worst = std::max(worst, std::abs(a - std::conj(b)));
                }
            }
        }
    }
    return largest > 0 ? worst / largest : 0.0;
}

}  // namespace mhdbfed
