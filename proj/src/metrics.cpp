#include "mdat/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mdat/error.hpp"

namespace mdat {

double relative_l2(std::span<const double> original, std::span<const double> reconstructed) {
  if (original.size() != reconstructed.size()) {
    throw Error(ErrorKind::kArgument, "relative l2 needs equal lengths (" +
                                          std::to_string(original.size()) + " vs " +
                                          std::to_string(reconstructed.size()) + ")");
  }
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double d = original[i] - reconstructed[i];
    diff += d * d;
    norm += original[i] * original[i];
  }
  if (norm == 0.0) return diff == 0.0 ? 0.0 : std::sqrt(diff) / std::sqrt(norm);
  return std::sqrt(diff / norm);
}

double band_energy_max_rel_error(const MdatPayload& payload, std::span<const double> signal) {
  const BandTable& table = table_for(payload.sample_rate);
  const std::vector<Frame> frames = frames_of(signal);
  if (frames.size() != payload.frames.size()) {
    throw Error(ErrorKind::kArgument, "signal and payload frame counts differ");
  }
  double worst = 0.0;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const std::vector<double> e = band_energy(dft(frames[t]), table);
    const std::vector<double>& ref = payload.frames[t].e;
    const double peak = *std::max_element(ref.begin(), ref.end());
    if (peak == 0.0) {
      worst = std::max(worst, *std::max_element(e.begin(), e.end()) > 0.0 ? 1.0 : 0.0);
      continue;
    }
    for (std::size_t b = 0; b < e.size(); ++b) {
      worst = std::max(worst, std::abs(e[b] - ref[b]) / std::max(ref[b], 1e-12 * peak));
    }
  }
  return worst;
}

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

}  // namespace mdat
