#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mcflab {

/// Real periodic FFT on a fixed grid of N equispaced samples over [0, 2 pi).
///
/// Owns its FFTW plans and work buffers, so an instance must not be shared
/// between threads. Plan creation itself is serialized internally.
class PeriodicFFT {
public:
  explicit PeriodicFFT(std::size_t n);
  ~PeriodicFFT();
  PeriodicFFT(const PeriodicFFT&) = delete;
  PeriodicFFT& operator=(const PeriodicFFT&) = delete;

  std::size_t size() const { return n_; }

  /// Unnormalized coefficients c_k = sum_j f_j exp(-i k phi_j), k = 0..N/2.
  std::vector<std::complex<double>> forward(std::span<const double> values);
  /// Inverse of forward (includes the 1/N factor).
  std::vector<double> backward(std::span<const std::complex<double>> coeffs);

  /// Spectral derivative of the given order. The Nyquist mode is treated as a
  /// cosine, so odd derivatives drop it.
  std::vector<double> derivative(std::span<const double> values, int order);

  /// Multiply mode k by factor(k) for k = 0..N/2.
  template <class Fn>
  std::vector<double> apply_multiplier(std::span<const double> values, Fn&& factor) {
    auto c = forward(values);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= factor(static_cast<int>(k));
    return backward(c);
  }

private:
  std::size_t n_;
  double* real_ = nullptr;
  void* spec_ = nullptr;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

/// Per-thread cached transform for size n.
PeriodicFFT& thread_fft(std::size_t n);

}  // namespace mcflab
