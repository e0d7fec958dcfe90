#include "mcflab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "mcflab/errors.hpp"

namespace mcflab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

PeriodicFFT::PeriodicFFT(std::size_t n) : n_(n) {
  if (n < 4 || n % 2 != 0) throw ArgumentError("PeriodicFFT needs an even size >= 4");
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(n);
  auto* spec = fftw_alloc_complex(n / 2 + 1);
  spec_ = spec;
  const int ni = static_cast<int>(n);
  plan_fwd_ = fftw_plan_dft_r2c_1d(ni, real_, spec, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_c2r_1d(ni, spec, real_, FFTW_ESTIMATE);
}

PeriodicFFT::~PeriodicFFT() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(real_);
  fftw_free(spec_);
}

std::vector<std::complex<double>> PeriodicFFT::forward(std::span<const double> values) {
  if (values.size() != n_) throw ArgumentError("PeriodicFFT::forward: size mismatch");
  std::copy(values.begin(), values.end(), real_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  auto* spec = static_cast<fftw_complex*>(spec_);
  std::vector<std::complex<double>> out(n_ / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec[k][0], spec[k][1]};
  return out;
}

std::vector<double> PeriodicFFT::backward(std::span<const std::complex<double>> coeffs) {
  if (coeffs.size() != n_ / 2 + 1) throw ArgumentError("PeriodicFFT::backward: size mismatch");
  auto* spec = static_cast<fftw_complex*>(spec_);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    spec[k][0] = coeffs[k].real();
    spec[k][1] = coeffs[k].imag();
  }
  // c2r destroys its input, which is fine since spec_ is scratch.
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  std::vector<double> out(real_, real_ + n_);
  const double inv = 1.0 / static_cast<double>(n_);
  for (double& v : out) v *= inv;
  return out;
}

std::vector<double> PeriodicFFT::derivative(std::span<const double> values, int order) {
  if (order < 0) throw ArgumentError("derivative order must be non-negative");
  auto c = forward(values);
  const std::size_t nyq = n_ / 2;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    std::complex<double> m = 1.0;
    for (int p = 0; p < order; ++p) m *= std::complex<double>(0.0, kk);
    if (k == nyq && order % 2 == 1) m = 0.0;
    c[k] *= m;
  }
  return backward(c);
}

PeriodicFFT& thread_fft(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<PeriodicFFT>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PeriodicFFT>(n);
  return *slot;
}

}  // namespace mcflab
