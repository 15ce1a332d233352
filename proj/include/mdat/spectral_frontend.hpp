#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mdat {

inline constexpr std::size_t kFrameSize = 256;
inline constexpr std::size_t kNyquistBin = kFrameSize / 2;

using Complex = std::complex<double>;

/// 256 consecutive time samples. The final frame of a signal is zero-padded.
struct Frame {
  std::array<double, kFrameSize> samples{};
  std::size_t index = 0;
};

/// Complex DFT of one frame, unnormalized forward convention.
struct SpectralFrame {
  std::array<Complex, kFrameSize> bins{};
  std::size_t index = 0;
};

struct AmpPhase {
  double amplitude = 0.0;
  double phase = 0.0;  // in (-pi, pi]; 0 for a zero bin
};

/// Splits a signal into ceil(len/256) non-overlapping rectangular frames.
std::vector<Frame> frames_of(std::span<const double> signal);

/// X_k = sum_n x_n exp(-2 pi i n k / 256), radix-2 FFT.
SpectralFrame dft(const Frame& frame);

/// Inverse DFT with the 1/256 factor. The spectrum must be conjugate-symmetric to
/// within 1e-6 of its peak magnitude; the imaginary residue of the result must stay
/// below 1e-9 of it. Violations throw Error(kNumerical).
Frame idft(const SpectralFrame& spectrum);

AmpPhase amp_phase(Complex value) noexcept;
AmpPhase amp_phase(const SpectralFrame& spectrum, std::size_t k);

/// Single-sided energy sum_{k=0..127} |X_k|^2.
double single_sided_energy(const SpectralFrame& spectrum) noexcept;

}  // namespace mdat
