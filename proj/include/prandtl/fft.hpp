#pragma once

// Cached FFTW plans for the two transforms the grid needs: a batched real
// FFT along x and an in-place DST-I along the interior y nodes.
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED, so they can be
// executed on any std::vector storage and give bit-identical results run to run.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace prandtl::fft {

namespace detail {

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        if (p) fftw_destroy_plan(p);
    }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

} // namespace detail

// Real-to-complex transform along x for a row-major field values[ix*ny + iy].
// Output layout: coeff[k*ny + iy], k in [0, nx/2].
class XTransform {
public:
    static const XTransform& get(int nx, int ny) {
        static std::map<std::pair<int, int>, std::unique_ptr<XTransform>> cache;
        std::lock_guard lock(detail::planner_mutex());
        auto& slot = cache[{nx, ny}];
        if (!slot) slot.reset(new XTransform(nx, ny));
        return *slot;
    }

    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_.get(), const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }

    // Unnormalized; the input is destroyed.
    void backward(std::complex<double>* in, double* out) const {
        fftw_execute_dft_c2r(bwd_.get(), reinterpret_cast<fftw_complex*>(in), out);
    }

private:
    XTransform(int nx, int ny) {
        const int n[1] = {nx};
        const int nk = nx / 2 + 1;
        double* r = fftw_alloc_real(static_cast<size_t>(nx) * ny);
        fftw_complex* c = fftw_alloc_complex(static_cast<size_t>(nk) * ny);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_.reset(fftw_plan_many_dft_r2c(1, n, ny, r, nullptr, ny, 1, c, nullptr, ny, 1, flags));
        bwd_.reset(fftw_plan_many_dft_c2r(1, n, ny, c, nullptr, ny, 1, r, nullptr, ny, 1,
                                          flags | FFTW_DESTROY_INPUT));
        fftw_free(r);
        fftw_free(c);
    }

    detail::PlanPtr fwd_, bwd_;
};

// DST-I over the ny-2 interior nodes of every x-row, in place; boundary
// entries are not touched. Applying it twice multiplies by 2(ny-1).
class YSine {
public:
    static const YSine& get(int nx, int ny) {
        static std::map<std::pair<int, int>, std::unique_ptr<YSine>> cache;
        std::lock_guard lock(detail::planner_mutex());
        auto& slot = cache[{nx, ny}];
        if (!slot) slot.reset(new YSine(nx, ny));
        return *slot;
    }

    void apply(double* values) const {
        fftw_execute_r2r(plan_.get(), values + 1, values + 1);
    }

private:
    YSine(int nx, int ny) {
        const int n[1] = {ny - 2};
        const fftw_r2r_kind kind[1] = {FFTW_RODFT00};
        double* buf = fftw_alloc_real(static_cast<size_t>(nx) * ny);
        plan_.reset(fftw_plan_many_r2r(1, n, nx, buf + 1, nullptr, 1, ny, buf + 1, nullptr, 1, ny,
                                       kind, FFTW_ESTIMATE | FFTW_UNALIGNED));
        fftw_free(buf);
    }

    detail::PlanPtr plan_;
};

} // namespace prandtl::fft
