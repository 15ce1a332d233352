#include "mdat/forward_transform.hpp"

#include <algorithm>
#include <cmath>

#include "mdat/error.hpp"

namespace mdat {
namespace {

Complex unit_phasor(Complex x) noexcept {
  const double r = std::abs(x);
  return r == 0.0 ? Complex(1.0, 0.0) : x / r;
}

}  // namespace

void PredictorState::push(const SpectralFrame& spectrum) {
  before_last_ = last_;
  std::copy_n(spectrum.bins.begin(), kTableBins, last_.begin());
  frames_seen_ = std::min(frames_seen_ + 1, 2);
}

Complex PredictorState::previous(std::size_t k, int lag) const {
  if (k >= kTableBins || lag < 1 || lag > 2) {
    throw Error(ErrorKind::kArgument, "predictor history lookup out of range");
  }
  return lag == 1 ? last_[k] : before_last_[k];
}

Prediction predict(const PredictorState& state, std::size_t k) {
  if (state.frames_seen() < 2) {
    throw Error(ErrorKind::kArgument, "prediction needs two frames of history");
  }
  const AmpPhase last = amp_phase(state.previous(k, 1));
  const AmpPhase before = amp_phase(state.previous(k, 2));
  return {2.0 * last.amplitude - before.amplitude, 2.0 * last.phase - before.phase};
}

BinArray unpredictability(const SpectralFrame& spectrum, const PredictorState& state) {
  BinArray c;
  if (state.frames_seen() < 2) {
    c.fill(1.0);
    return c;
  }
  for (std::size_t k = 0; k < kTableBins; ++k) {
    const Complex last = state.previous(k, 1);
    const Complex before = state.previous(k, 2);
    // r_pred * exp(i (2 f1 - f2)) written with unit phasors.
    const Complex u1 = unit_phasor(last);
    const Complex predicted =
        (2.0 * std::abs(last) - std::abs(before)) * (u1 * u1 * std::conj(unit_phasor(before)));
    const Complex actual = spectrum.bins[k];
    const double denom = std::abs(actual) + std::abs(predicted);
    c[k] = denom == 0.0 ? 0.0 : std::min(1.0, std::abs(actual - predicted) / denom);
  }
  return c;
}

std::vector<double> band_energy(const SpectralFrame& spectrum, const BandTable& table) {
  std::vector<double> e(table.bands().size(), 0.0);
  for (const Band& band : table.bands()) {
    double sum = 0.0;
    for (int k = band.low_bin; k <= band.high_bin; ++k) sum += std::norm(spectrum.bins[k]);
    e[band.index] = sum;
  }
  return e;
}

std::vector<double> weighted_unpredictability(const SpectralFrame& spectrum,
                                              std::span<const double> c, const BandTable& table) {
  if (c.size() != kTableBins) throw Error(ErrorKind::kArgument, "c must have 128 entries");
  std::vector<double> ec(table.bands().size(), 0.0);
  for (const Band& band : table.bands()) {
    double sum = 0.0;
    for (int k = band.low_bin; k <= band.high_bin; ++k) sum += std::norm(spectrum.bins[k]) * c[k];
    ec[band.index] = sum;
  }
  return ec;
}

double spreading_db(double dz) noexcept {
  const double x = dz + 0.474;
  return 15.81 + 7.5 * x - 17.5 * std::sqrt(1.0 + x * x);
}

SpreadingMatrix::SpreadingMatrix(const BandTable& table) {
  const int j = table.num_ac_bands();
  matrix_.resize(j, j);
  for (int from = 1; from <= j; ++from) {
    for (int to = 1; to <= j; ++to) {
      const double dz = table.band(to).bark - table.band(from).bark;
      matrix_(from - 1, to - 1) = std::pow(10.0, spreading_db(dz) / 10.0);
    }
  }
}

SpreadingMatrix::SpreadingMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw Error(ErrorKind::kArgument, "spreading matrix must be square");
}

SpreadBands spread_convolve(std::span<const double> e, std::span<const double> ec,
                            const SpreadingMatrix& spread) {
  const int j = spread.size();
  if (e.size() != static_cast<std::size_t>(j) + 1 || ec.size() != e.size()) {
    throw Error(ErrorKind::kArgument, "band vectors must have J+1 entries");
  }
  SpreadBands out{std::vector<double>(e.size(), 0.0), std::vector<double>(e.size(), 0.0)};
  const Eigen::MatrixXd& s = spread.matrix();
  for (int to = 0; to < j; ++to) {
    double ecb = 0.0;
    double ct = 0.0;
    for (int from = 0; from < j; ++from) {
      ecb += e[from + 1] * s(from, to);
      ct += ec[from + 1] * s(from, to);
    }
    out.ecb[to + 1] = ecb;
    out.ct[to + 1] = ct;
  }
  return out;
}

double noise_to_signal(double ecb, double ct) noexcept { return ecb > 0.0 ? ct / ecb : 0.0; }

double tonality(double cb) noexcept {
  if (cb <= 0.0) return 1.0;
  return std::clamp(-0.299 - 0.43 * std::log(cb), 0.0, 1.0);
}

double band_snr(double tb) noexcept {
  return tb * kToneMaskingNoiseDb + (1.0 - tb) * kNoiseMaskingToneDb;
}

PerceptionVector perceive(std::vector<double> e, std::vector<double> ec,
                          const SpreadingMatrix& spread) {
  SpreadBands spreadBands = spread_convolve(e, ec, spread);
  PerceptionVector v;
  const std::size_t n = e.size();
  v.cb.assign(n, 0.0);
  v.tb.assign(n, 0.0);
  v.snr.assign(n, 0.0);
  for (std::size_t b = 1; b < n; ++b) {
    v.cb[b] = noise_to_signal(spreadBands.ecb[b], spreadBands.ct[b]);
    v.tb[b] = tonality(v.cb[b]);
    v.snr[b] = band_snr(v.tb[b]);
  }
  v.e = std::move(e);
  v.ec = std::move(ec);
  v.ecb = std::move(spreadBands.ecb);
  v.ct = std::move(spreadBands.ct);
  return v;
}

ForwardTransform::ForwardTransform(const BandTable& table) : table_(&table), spread_(table) {}

ForwardTransform::Output ForwardTransform::push(const SpectralFrame& spectrum) {
  const BinArray raw = unpredictability(spectrum, state_);
  state_.push(spectrum);

  Output out;
  SideInfo& side = out.record.side;
  for (std::size_t k = 0; k < kTableBins; ++k) {
    side.c[k] = static_cast<float>(raw[k]);
    out.c[k] = side.c[k];
    side.phase[k] = static_cast<float>(amp_phase(spectrum.bins[k]).phase);
  }
  side.dc = spectrum.bins[0];
  side.nyquist = spectrum.bins[kNyquistBin];

  out.record.e = band_energy(spectrum, *table_);
  out.record.ec = weighted_unpredictability(spectrum, out.c, *table_);
  out.perception = perceive(out.record.e, out.record.ec, spread_);
  return out;
}

MdatPayload analyze(std::span<const double> signal, int sample_rate) {
  const BandTable& table = table_for(sample_rate);
  MdatPayload payload;
  payload.sample_rate = sample_rate;
  payload.original_length = signal.size();
  payload.num_ac_bands = table.num_ac_bands();

  ForwardTransform forward(table);
  const std::vector<Frame> frames = frames_of(signal);
  payload.frames.reserve(frames.size());
  for (const Frame& frame : frames) payload.frames.push_back(forward.push(dft(frame)).record);
  return payload;
}

}  // namespace mdat
