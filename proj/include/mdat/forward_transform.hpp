#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mdat/band_tables.hpp"
#include "mdat/spectral_frontend.hpp"

namespace mdat {

/// Tone-masking-noise and noise-masking-tone levels in dB.
inline constexpr double kToneMaskingNoiseDb = 18.0;
inline constexpr double kNoiseMaskingToneDb = 6.0;

using BinArray = std::array<double, kTableBins>;

/// Complex spectra of the two most recent frames, bins 0..127.
class PredictorState {
 public:
  /// Shifts history by one frame.
  void push(const SpectralFrame& spectrum);

  int frames_seen() const noexcept { return frames_seen_; }

  /// Bin k of the frame `lag` steps back (lag 1 or 2).
  Complex previous(std::size_t k, int lag) const;

 private:
  std::array<Complex, kTableBins> last_{};
  std::array<Complex, kTableBins> before_last_{};
  int frames_seen_ = 0;
};

struct Prediction {
  double amplitude = 0.0;  // 2 r(t-1) - r(t-2); may be negative
  double phase = 0.0;      // 2 f(t-1) - f(t-2), not wrapped
};

/// Linear two-frame extrapolation of amplitude and phase. Requires frames_seen() >= 2.
Prediction predict(const PredictorState& state, std::size_t k);

/// c(k) = |X - X_pred| / (|X| + |X_pred|) for bins 0..127.
///
/// With fewer than two frames of history every c(k) is 1. A bin where both terms
/// vanish gets c = 0.
BinArray unpredictability(const SpectralFrame& spectrum, const PredictorState& state);

/// Per-band vectors are indexed by band 0..J.
std::vector<double> band_energy(const SpectralFrame& spectrum, const BandTable& table);
std::vector<double> weighted_unpredictability(const SpectralFrame& spectrum,
                                              std::span<const double> c, const BandTable& table);

/// Schroeder spreading shape in dB at a bark distance dz = bark(b) - bark(b').
double spreading_db(double dz) noexcept;

/// Spreading over the AC bands. Entry (i, j) holds spread(bark(i+1), bark(j+1)),
/// i.e. the leakage from band i+1 into band j+1.
class SpreadingMatrix {
 public:
  explicit SpreadingMatrix(const BandTable& table);
  /// Arbitrary J x J spreading, for experiments and tests.
  explicit SpreadingMatrix(Eigen::MatrixXd matrix);

  int size() const noexcept { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  double operator()(int from_band, int to_band) const { return matrix_(from_band - 1, to_band - 1); }

 private:
  Eigen::MatrixXd matrix_;
};

inline SpreadingMatrix spreading_matrix(const BandTable& table) { return SpreadingMatrix(table); }

struct SpreadBands {
  std::vector<double> ecb;  // band 0 unused (0)
  std::vector<double> ct;
};

/// ecb(b) = sum_{b'=1..J} e(b') S(b', b), ct likewise from ec.
SpreadBands spread_convolve(std::span<const double> e, std::span<const double> ec,
                            const SpreadingMatrix& spread);

/// ct/ecb, with 0 where ecb is 0.
double noise_to_signal(double ecb, double ct) noexcept;
/// clamp(-0.299 - 0.43 ln cb, 0, 1); cb = 0 gives 1.
double tonality(double cb) noexcept;
/// 18 tb + 6 (1 - tb) dB.
double band_snr(double tb) noexcept;

/// Full perceptual description of one frame. Vectors are indexed by band 0..J;
/// the spread/tonality/SNR entries are defined for AC bands 1..J and hold 0 at band 0.
struct PerceptionVector {
  std::vector<double> e;
  std::vector<double> ec;
  std::vector<double> ecb;
  std::vector<double> ct;
  std::vector<double> cb;
  std::vector<double> tb;
  std::vector<double> snr;
};

/// Derives ecb, ct, cb, tb and snr from (e, ec).
PerceptionVector perceive(std::vector<double> e, std::vector<double> ec,
                          const SpreadingMatrix& spread);

/// Per-frame quantities the inverse treats as known.
struct SideInfo {
  std::array<float, kTableBins> c{};      // unpredictability of bins 0..127
  std::array<float, kTableBins> phase{};  // phase of bins 0..127
  Complex dc{};
  Complex nyquist{};
};

/// The stored (V2) payload of one frame: e and ec over bands 0..J plus side info.
struct FrameRecord {
  std::vector<double> e;
  std::vector<double> ec;
  SideInfo side;
};

/// Everything the forward transform produces for a signal.
struct MdatPayload {
  int sample_rate = 0;
  std::uint64_t original_length = 0;
  int num_ac_bands = 0;
  std::vector<FrameRecord> frames;
};

/// Sequential forward transform. One instance per channel; push frames in order.
class ForwardTransform {
 public:
  explicit ForwardTransform(const BandTable& table);

  struct Output {
    FrameRecord record;
    PerceptionVector perception;
    BinArray c{};  // the float-rounded c values used for ec, as doubles
  };

  Output push(const SpectralFrame& spectrum);

  const BandTable& table() const noexcept { return *table_; }
  const SpreadingMatrix& spread() const noexcept { return spread_; }

 private:
  const BandTable* table_;
  SpreadingMatrix spread_;
  PredictorState state_;
};

/// Frames, transforms and analyzes a whole signal.
MdatPayload analyze(std::span<const double> signal, int sample_rate);

}  // namespace mdat
