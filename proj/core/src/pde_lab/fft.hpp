#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace pip2::pde_lab::detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Unnormalized real transforms of length n on caller-owned buffers (new-array execute).
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    std::vector<double> r(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> c(static_cast<std::size_t>(n / 2 + 1));
    std::lock_guard lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(n, r.data(), reinterpret_cast<fftw_complex*>(c.data()),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    inv_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }

  int size() const { return n_; }

  void forward(const double* in, std::complex<double>* out) const {
    // Out-of-place r2c preserves its input.
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  }
  // Destroys `in`.
  void inverse(std::complex<double>* in, double* out) const {
    fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  int n_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

}  // namespace pip2::pde_lab::detail
