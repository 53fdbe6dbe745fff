#include "aftrack/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace aftrack {

namespace {

// FFTW planning is not thread-safe, execution with the new-array interface
// is. Plans are created once per (cols, rows, direction) and never freed.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int cols, int rows, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(cols, rows, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> a(static_cast<std::size_t>(cols) * rows);
    auto* buf = reinterpret_cast<fftw_complex*>(a.data());
    // In-place plan; callers always execute in place.
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fft: failed to create FFTW plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void check_size(std::size_t n, int cols, int rows) {
  if (cols < 1 || rows < 1 || n != static_cast<std::size_t>(cols) * rows) {
    throw std::invalid_argument("fft: buffer size does not match grid dimensions");
  }
}

}  // namespace

Spectrum::Spectrum(int c, int r, int ch)
    : cols(c), rows(r), channels(ch), data(static_cast<std::size_t>(c) * r * ch) {}

void fft2(std::span<const double> in, int cols, int rows, std::span<Complex> out) {
  check_size(in.size(), cols, rows);
  check_size(out.size(), cols, rows);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i];
  fftw_plan plan = PlanCache::instance().get(cols, rows, FFTW_FORWARD);
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, p, p);
}

void ifft2_real(std::span<const Complex> in, int cols, int rows, std::span<double> out) {
  check_size(in.size(), cols, rows);
  check_size(out.size(), cols, rows);
  std::vector<Complex> work(in.begin(), in.end());
  fftw_plan plan = PlanCache::instance().get(cols, rows, FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(work.data());
  fftw_execute_dft(plan, p, p);
  const double scale = 1.0 / static_cast<double>(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) out[i] = work[i].real() * scale;
}

Spectrum fft2(const FeatureMap& features) {
  Spectrum out(features.cols, features.rows, features.channels);
  for (int c = 0; c < features.channels; ++c) {
    fft2(features.channel(c), features.cols, features.rows, out.channel(c));
  }
  return out;
}

Spectrum fft2(const RealGrid& grid) {
  Spectrum out(grid.cols, grid.rows, 1);
  fft2(grid.values, grid.cols, grid.rows, out.channel(0));
  return out;
}

RealGrid ifft2_real(const Spectrum& spectrum, int channel) {
  RealGrid out(spectrum.cols, spectrum.rows);
  ifft2_real(spectrum.channel(channel), spectrum.cols, spectrum.rows, out.values);
  return out;
}

}  // namespace aftrack
