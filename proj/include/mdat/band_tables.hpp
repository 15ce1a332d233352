#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mdat {

/// Number of single-sided DFT bins covered by the band tables (bins 0..127).
inline constexpr std::size_t kTableBins = 128;

/// One critical band: an inclusive run of DFT bins and its bark value.
struct Band {
  int index = 0;
  int low_bin = 0;
  int high_bin = 0;
  int width = 0;
  double bark = 0.0;
};

/// Fixed partition of DFT bins 0..127 into critical bands for one sampling rate.
///
/// Band 0 is the DC bin; bands 1..J are the AC bands. Instances are immutable and
/// the two supported tables are process-wide singletons.
class BandTable {
 public:
  BandTable(int sample_rate, std::vector<Band> bands);

  int sample_rate() const noexcept { return sample_rate_; }

  /// J: index of the highest band (number of AC bands).
  int num_ac_bands() const noexcept { return static_cast<int>(bands_.size()) - 1; }

  std::span<const Band> bands() const noexcept { return bands_; }
  const Band& band(int b) const;

  /// The unique band containing bin k. Throws for k outside 0..127.
  const Band& band_of_bin(int k) const;

  /// First band with width >= 3. Every later band is also at least 3 wide, so
  /// bins first_wide_band().low_bin..127 form one contiguous range.
  const Band& first_wide_band() const;

  /// Throws Error if the tiling, width, or bark ordering invariants are violated.
  void validate() const;

  /// CSV with header "band,low,high,width,bark".
  std::string to_csv() const;

 private:
  int sample_rate_;
  std::vector<Band> bands_;
  std::array<int, kTableBins> bin_to_band_{};
  int first_wide_ = -1;
};

/// Table for 16000 or 44100 Hz. Any other rate throws Error(kArgument).
const BandTable& table_for(int sample_rate);

inline const Band& band_of_bin(const BandTable& table, int k) { return table.band_of_bin(k); }

bool is_supported_rate(int sample_rate) noexcept;

}  // namespace mdat
