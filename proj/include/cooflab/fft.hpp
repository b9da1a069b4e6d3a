#ifndef COOFLAB_FFT_HPP
#define COOFLAB_FFT_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "cooflab/types.hpp"

namespace cooflab {

/// In-place FFT workspace of a fixed length backed by FFTW.
///
/// forward() computes X[k] = sum_n x[n] exp(-2 pi i k n / N); inverse() is the
/// unnormalized conjugate transform. Planning is serialized internally, so
/// workspaces may be created from concurrent workers; each workspace itself
/// is single-threaded.
class FftWorkspace {
 public:
  explicit FftWorkspace(std::size_t n);
  ~FftWorkspace();
  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;

  std::size_t size() const { return n_; }
  std::span<Complex> data() { return {buffer_, n_}; }
  std::span<const Complex> data() const { return {buffer_, n_}; }

  void forward();
  void inverse();

 private:
  std::size_t n_;
  Complex* buffer_;
  void* forward_plan_;
  void* inverse_plan_;
};

std::vector<Complex> fft(std::span<const Complex> x);
/// Normalized inverse (includes the 1/N factor).
std::vector<Complex> ifft(std::span<const Complex> x);

/// Signed frequency of FFT bin k for length n at sample rate fs.
double bin_frequency(std::size_t k, std::size_t n, double fs);

}  // namespace cooflab

#endif  // COOFLAB_FFT_HPP
