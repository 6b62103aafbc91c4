#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "scotlab/common.hpp"

namespace scotlab {

// 2D real<->complex FFT on an n x n periodic grid. Plan creation is not
// thread-safe in FFTW, so it happens under a global lock; execution on a
// plan's own buffers is fine. One instance per worker thread.
class Fft2 {
 public:
  explicit Fft2(int64_t n) : n_(n), nk_(n / 2 + 1) {
    if (n < 8 || n % 2 != 0) throw ValueError("spectral grid needs even N >= 8, got " + std::to_string(n));
    real_ = fftw_alloc_real(size_t(n_ * n_));
    spec_ = fftw_alloc_complex(size_t(n_ * nk_));
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd_ = fftw_plan_dft_r2c_2d(int(n_), int(n_), real_, spec_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(int(n_), int(n_), spec_, real_, FFTW_ESTIMATE);
  }

  ~Fft2() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  int64_t n() const { return n_; }
  int64_t nk() const { return nk_; }
  int64_t spec_size() const { return n_ * nk_; }

  // real [n*n] row-major -> spectrum [n * (n/2+1)]
  void forward(const double* field, std::complex<double>* out) {
    std::copy(field, field + n_ * n_, real_);
    fftw_execute(fwd_);
    const double scale = 1.0 / double(n_ * n_);
    for (int64_t i = 0; i < spec_size(); ++i)
      out[i] = std::complex<double>(spec_[i][0], spec_[i][1]) * scale;
  }

  // spectrum -> real field (spectrum argument is preserved)
  void backward(const std::complex<double>* spec, double* field) {
    for (int64_t i = 0; i < spec_size(); ++i) {
      spec_[i][0] = spec[i].real();
      spec_[i][1] = spec[i].imag();
    }
    fftw_execute(bwd_);
    std::copy(real_, real_ + n_ * n_, field);
  }

  // integer wavenumber of row iy (the full dimension)
  int64_t ky(int64_t iy) const { return iy <= n_ / 2 ? iy : iy - n_; }
  // column index is the (non-negative) kx wavenumber directly
  int64_t kx(int64_t ix) const { return ix; }

 private:
  static std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
  }

  int64_t n_, nk_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_, bwd_;
};

}  // namespace scotlab
