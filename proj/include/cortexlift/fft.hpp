#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cortexlift {

// Serialized access to FFTW. Plans are cached per shape together with their
// own aligned buffers and all executions copy through those buffers under a
// single lock, so transforms are reproducible regardless of how many caller
// threads exist. FFTW_ESTIMATE keeps planning deterministic.
class FftEngine {
  public:
    static FftEngine& instance() {
        static FftEngine e;
        return e;
    }

    // Real-to-complex forward transform of a d0 x d1 x d2 row-major array.
    // Output is the half spectrum: d0 x d1 x (d2/2+1) complex values.
    void forward(std::array<int, 3> dims, const double* in, std::complex<double>* out) {
        std::lock_guard<std::mutex> lock(mu_);
        Entry& e = entry(dims);
        std::memcpy(e.real, in, sizeof(double) * e.nreal);
        fftw_execute(e.fwd);
        std::memcpy(out, e.cplx, sizeof(fftw_complex) * e.ncplx);
    }

    // Complex-to-real inverse of forward, normalized by 1/(d0*d1*d2).
    void backward(std::array<int, 3> dims, const std::complex<double>* in, double* out) {
        std::lock_guard<std::mutex> lock(mu_);
        Entry& e = entry(dims);
        std::memcpy(e.cplx, in, sizeof(fftw_complex) * e.ncplx);
        fftw_execute(e.bwd);
        const double scale = 1.0 / (double(dims[0]) * dims[1] * dims[2]);
        for (std::size_t i = 0; i < e.nreal; ++i) out[i] = e.real[i] * scale;
    }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

  private:
    struct Entry {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
        double* real = nullptr;
        fftw_complex* cplx = nullptr;
        std::size_t nreal = 0, ncplx = 0;
    };

    FftEngine() = default;

    ~FftEngine() {
        for (auto& [dims, e] : cache_) {
            if (e.fwd) fftw_destroy_plan(e.fwd);
            if (e.bwd) fftw_destroy_plan(e.bwd);
            if (e.real) fftw_free(e.real);
            if (e.cplx) fftw_free(e.cplx);
        }
    }

    Entry& entry(std::array<int, 3> dims) {
        auto it = cache_.find(dims);
        if (it != cache_.end()) return it->second;
        Entry e;
        e.nreal = std::size_t(dims[0]) * dims[1] * dims[2];
        e.ncplx = std::size_t(dims[0]) * dims[1] * (dims[2] / 2 + 1);
        e.real = static_cast<double*>(fftw_malloc(sizeof(double) * e.nreal));
        e.cplx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * e.ncplx));
        if (!e.real || !e.cplx) throw std::bad_alloc();
        e.fwd = fftw_plan_dft_r2c_3d(dims[0], dims[1], dims[2], e.real, e.cplx, FFTW_ESTIMATE);
        e.bwd = fftw_plan_dft_c2r_3d(dims[0], dims[1], dims[2], e.cplx, e.real, FFTW_ESTIMATE);
        if (!e.fwd || !e.bwd) throw std::runtime_error("fft: planning failed");
        return cache_.emplace(dims, e).first->second;
    }

    std::mutex mu_;
    std::map<std::array<int, 3>, Entry> cache_;
};

inline void fft_forward(std::array<int, 3> dims, const double* in, std::complex<double>* out) {
    FftEngine::instance().forward(dims, in, out);
}

inline void fft_backward(std::array<int, 3> dims, const std::complex<double>* in, double* out) {
    FftEngine::instance().backward(dims, in, out);
}

}  // namespace cortexlift
