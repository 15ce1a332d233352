#include "mdat/spectral_frontend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mdat/error.hpp"

namespace mdat {
namespace {

constexpr std::size_t kLog2Size = 8;
static_assert(std::size_t{1} << kLog2Size == kFrameSize);

struct FftPlan {
  std::array<Complex, kFrameSize / 2> twiddle{};  // exp(-2 pi i k / N)
  std::array<std::size_t, kFrameSize> bit_reverse{};

  FftPlan() {
    for (std::size_t k = 0; k < twiddle.size(); ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / kFrameSize;
      twiddle[k] = Complex(std::cos(angle), std::sin(angle));
    }
    for (std::size_t i = 0; i < kFrameSize; ++i) {
      std::size_t r = 0;
      for (std::size_t bit = 0; bit < kLog2Size; ++bit) r |= ((i >> bit) & 1U) << (kLog2Size - 1 - bit);
      bit_reverse[i] = r;
    }
  }
};

const FftPlan& plan() {
  static const FftPlan instance;
  return instance;
}

// In-place iterative Cooley-Tukey. inverse=true uses conjugate twiddles, no scaling.
void transform(std::array<Complex, kFrameSize>& data, bool inverse) {
  const FftPlan& p = plan();
  for (std::size_t i = 0; i < kFrameSize; ++i) {
    const std::size_t j = p.bit_reverse[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= kFrameSize; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = kFrameSize / len;
    for (std::size_t start = 0; start < kFrameSize; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        Complex w = p.twiddle[j * stride];
        if (inverse) w = std::conj(w);
        const Complex t = w * data[start + j + half];
        data[start + j + half] = data[start + j] - t;
        data[start + j] += t;
      }
    }
  }
}

}  // namespace

std::vector<Frame> frames_of(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorKind::kArgument, "cannot frame an empty signal");
  const std::size_t count = (signal.size() + kFrameSize - 1) / kFrameSize;
  std::vector<Frame> frames(count);
  for (std::size_t t = 0; t < count; ++t) {
    frames[t].index = t;
    const std::size_t begin = t * kFrameSize;
    const std::size_t n = std::min(kFrameSize, signal.size() - begin);
    std::copy_n(signal.begin() + static_cast<std::ptrdiff_t>(begin), n, frames[t].samples.begin());
  }
  return frames;
}

SpectralFrame dft(const Frame& frame) {
  SpectralFrame out;
  out.index = frame.index;
  for (std::size_t n = 0; n < kFrameSize; ++n) out.bins[n] = Complex(frame.samples[n], 0.0);
  transform(out.bins, false);
  return out;
}

Frame idft(const SpectralFrame& spectrum) {
  double peak = 0.0;
  for (const Complex& x : spectrum.bins) peak = std::max(peak, std::abs(x));
  const double scale = std::max(peak, 1.0);

  double asymmetry = std::abs(spectrum.bins[0].imag()) + std::abs(spectrum.bins[kNyquistBin].imag());
  for (std::size_t k = 1; k < kNyquistBin; ++k) {
    asymmetry = std::max(asymmetry,
                         std::abs(spectrum.bins[kFrameSize - k] - std::conj(spectrum.bins[k])));
  }
  if (asymmetry > 1e-6 * scale) {
    throw Error(ErrorKind::kNumerical, "inverse DFT input is not conjugate-symmetric (defect " +
                                           std::to_string(asymmetry) + ")");
  }

  std::array<Complex, kFrameSize> data = spectrum.bins;
  transform(data, true);

  Frame out;
  out.index = spectrum.index;
  double residue = 0.0;
  for (std::size_t n = 0; n < kFrameSize; ++n) {
    out.samples[n] = data[n].real() / kFrameSize;
    residue = std::max(residue, std::abs(data[n].imag()) / kFrameSize);
  }
  if (residue > 1e-9 * scale) {
    throw Error(ErrorKind::kNumerical,
                "inverse DFT left an imaginary residue of " + std::to_string(residue));
  }
  return out;
}

AmpPhase amp_phase(Complex value) noexcept {
  const double r = std::abs(value);
  if (r == 0.0) return {0.0, 0.0};
  double f = std::arg(value);
  if (f == -std::numbers::pi) f = std::numbers::pi;
  return {r, f};
}

AmpPhase amp_phase(const SpectralFrame& spectrum, std::size_t k) {
  if (k >= kFrameSize) throw Error(ErrorKind::kArgument, "bin index out of range");
  return amp_phase(spectrum.bins[k]);
}

double single_sided_energy(const SpectralFrame& spectrum) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < kNyquistBin; ++k) sum += std::norm(spectrum.bins[k]);
  return sum;
}

}  // namespace mdat
