#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "mdat/forward_transform.hpp"

namespace mdat {

/// ||original - reconstructed||_2 / ||original||_2, with 0/0 defined as 0.
/// Throws Error(kArgument) on a length mismatch.
double relative_l2(std::span<const double> original, std::span<const double> reconstructed);

/// Largest relative deviation between the band energies of `payload` and those of
/// `signal` re-analyzed frame by frame. Bands below 1e-12 of their frame's peak
/// band energy are measured against that floor.
double band_energy_max_rel_error(const MdatPayload& payload, std::span<const double> signal);

struct ComparisonReport {
  double relative_l2 = 0.0;
  double band_energy_max_rel_error = 0.0;
  double theta_max_abs_error = 0.0;  // largest theta deviation caused by clamping
  std::size_t clip_count = 0;
  std::size_t clamped_bands = 0;
  std::size_t active_bands = 0;
  std::string spectra_csv;   // file names, relative to the output directory
  std::string waveform_csv;
};

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace mdat
