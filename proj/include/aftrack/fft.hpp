#pragma once

#include <complex>
#include <span>
#include <vector>

#include "aftrack/features.hpp"
#include "aftrack/grid.hpp"

namespace aftrack {

using Complex = std::complex<double>;

/// Per-channel 2-D spectra, channel-planar like FeatureMap. Transforms are
/// unnormalized forward / 1/N-normalized inverse.
struct Spectrum {
  int cols = 0;
  int rows = 0;
  int channels = 0;
  std::vector<Complex> data;

  Spectrum() = default;
  Spectrum(int c, int r, int ch);

  std::size_t plane_size() const { return static_cast<std::size_t>(cols) * rows; }
  std::span<Complex> channel(int c) { return {data.data() + c * plane_size(), plane_size()}; }
  std::span<const Complex> channel(int c) const {
    return {data.data() + c * plane_size(), plane_size()};
  }
};

/// Forward 2-D DFT of a real row-major cols x rows plane into `out`.
void fft2(std::span<const double> in, int cols, int rows, std::span<Complex> out);

/// Inverse 2-D DFT (scaled by 1/N); returns the real part.
void ifft2_real(std::span<const Complex> in, int cols, int rows, std::span<double> out);

Spectrum fft2(const FeatureMap& features);
Spectrum fft2(const RealGrid& grid);
RealGrid ifft2_real(const Spectrum& spectrum, int channel = 0);

}  // namespace aftrack
