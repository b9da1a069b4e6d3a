#include "cooflab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace cooflab {

namespace {
// FFTW's planner is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftWorkspace::FftWorkspace(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("FftWorkspace: zero length");
  std::lock_guard lock(planner_mutex());
  auto* buf = fftw_alloc_complex(n);
  if (buf == nullptr) throw std::bad_alloc();
  buffer_ = reinterpret_cast<Complex*>(buf);
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  std::fill_n(buffer_, n_, Complex{});
}

FftWorkspace::~FftWorkspace() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(buffer_);
}

void FftWorkspace::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void FftWorkspace::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

std::vector<Complex> fft(std::span<const Complex> x) {
  FftWorkspace ws(x.size());
  std::copy(x.begin(), x.end(), ws.data().begin());
  ws.forward();
  return {ws.data().begin(), ws.data().end()};
}

std::vector<Complex> ifft(std::span<const Complex> x) {
  FftWorkspace ws(x.size());
  std::copy(x.begin(), x.end(), ws.data().begin());
  ws.inverse();
  const double scale = 1.0 / static_cast<double>(x.size());
  std::vector<Complex> out(ws.data().begin(), ws.data().end());
  for (auto& v : out) v *= scale;
  return out;
}

double bin_frequency(std::size_t k, std::size_t n, double fs) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  return (2 * k < n ? kk : kk - nn) * fs / nn;
}

}  // namespace cooflab
