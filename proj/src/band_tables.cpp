#include "mdat/band_tables.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mdat/error.hpp"

namespace mdat {
namespace {

struct Row {
  int low;
  int high;
  int width;
  double bark;
};

// 256-point FFT at 16 kHz. Columns: low bin, high bin, width, bark.
constexpr Row kRows16k[] = {
    {0, 0, 1, 0.00},       {1, 1, 1, 0.63},       {2, 2, 1, 1.26},       {3, 3, 1, 1.88},
    {4, 4, 1, 2.50},       {5, 5, 1, 3.11},       {6, 6, 1, 3.70},       {7, 7, 1, 4.28},
    {8, 8, 1, 4.85},       {9, 9, 1, 5.39},       {10, 10, 1, 5.92},     {11, 11, 1, 6.43},
    {12, 12, 1, 6.93},     {13, 13, 1, 7.40},     {14, 14, 1, 7.85},     {15, 15, 1, 8.29},
    {16, 16, 1, 8.70},     {17, 17, 1, 9.10},     {18, 18, 1, 9.49},     {19, 19, 1, 9.85},
    {20, 20, 1, 10.20},    {21, 22, 2, 10.85},    {23, 24, 2, 11.44},    {25, 26, 2, 11.99},
    {27, 28, 2, 12.50},    {29, 30, 2, 12.96},    {31, 32, 2, 13.39},    {33, 34, 2, 13.78},
    {35, 36, 2, 14.15},    {37, 39, 3, 14.57},    {40, 42, 3, 15.03},    {43, 45, 3, 15.45},
    {46, 48, 3, 15.84},    {49, 51, 3, 16.19},    {52, 55, 4, 16.57},    {56, 59, 4, 16.97},
    {60, 63, 4, 17.33},    {64, 68, 5, 17.71},    {69, 73, 5, 18.09},    {74, 78, 5, 18.44},
    {79, 84, 6, 18.80},    {85, 90, 6, 19.17},    {91, 97, 7, 19.53},    {98, 104, 7, 19.89},
    {105, 112, 8, 20.25},  {113, 120, 8, 20.61},  {121, 127, 7, 20.92},
};

// 256-point FFT at 44.1 kHz. The top four bands share bark 24.00.
constexpr Row kRows44k[] = {
    {0, 0, 1, 0.00},       {1, 1, 1, 1.73},       {2, 2, 1, 3.41},       {3, 3, 1, 4.99},
    {4, 4, 1, 6.45},       {5, 5, 1, 7.75},       {6, 6, 1, 8.92},       {7, 7, 1, 9.96},
    {8, 8, 1, 10.87},      {9, 9, 1, 11.68},      {10, 10, 1, 12.39},    {11, 11, 1, 13.03},
    {12, 12, 1, 13.61},    {13, 13, 1, 14.12},    {14, 14, 1, 14.59},    {15, 15, 1, 15.01},
    {16, 16, 1, 15.40},    {17, 17, 1, 15.76},    {18, 19, 2, 16.39},    {20, 21, 2, 16.95},
    {22, 23, 2, 17.45},    {24, 25, 2, 17.89},    {26, 27, 2, 18.30},    {28, 29, 2, 18.67},
    {30, 31, 2, 19.02},    {32, 34, 3, 19.41},    {35, 37, 3, 19.85},    {38, 40, 3, 20.25},
    {41, 43, 3, 20.62},    {44, 47, 4, 21.01},    {48, 51, 4, 21.43},    {52, 55, 4, 21.81},
    {56, 59, 4, 22.15},    {60, 64, 5, 22.51},    {65, 69, 5, 22.87},    {70, 75, 6, 23.23},
    {76, 81, 6, 23.59},    {82, 88, 7, 23.93},    {89, 96, 8, 24.00},    {97, 105, 9, 24.00},
    {106, 115, 10, 24.00}, {116, 127, 12, 24.00},
};

template <std::size_t N>
std::vector<Band> to_bands(const Row (&rows)[N]) {
  std::vector<Band> bands;
  bands.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    bands.push_back(Band{static_cast<int>(i), rows[i].low, rows[i].high, rows[i].width,
                         rows[i].bark});
  }
  return bands;
}

}  // namespace

BandTable::BandTable(int sample_rate, std::vector<Band> bands)
    : sample_rate_(sample_rate), bands_(std::move(bands)) {
  validate();
  for (const Band& band : bands_) {
    for (int k = band.low_bin; k <= band.high_bin; ++k) bin_to_band_[k] = band.index;
    if (first_wide_ < 0 && band.width >= 3) first_wide_ = band.index;
  }
}

const Band& BandTable::band(int b) const {
  if (b < 0 || b > num_ac_bands()) {
    throw Error(ErrorKind::kArgument, "band index " + std::to_string(b) + " outside 0.." +
                                          std::to_string(num_ac_bands()));
  }
  return bands_[static_cast<std::size_t>(b)];
}

const Band& BandTable::band_of_bin(int k) const {
  if (k < 0 || k >= static_cast<int>(kTableBins)) {
    throw Error(ErrorKind::kArgument, "bin index " + std::to_string(k) + " outside 0..127");
  }
  return bands_[static_cast<std::size_t>(bin_to_band_[static_cast<std::size_t>(k)])];
}

const Band& BandTable::first_wide_band() const {
  return bands_.at(static_cast<std::size_t>(first_wide_));
}

void BandTable::validate() const {
  auto fail = [this](const std::string& what) {
    throw Error(ErrorKind::kArgument,
                "band table " + std::to_string(sample_rate_) + " Hz: " + what);
  };
  if (bands_.empty()) fail("no bands");
  if (bands_.front().low_bin != 0 || bands_.front().high_bin != 0) fail("band 0 must be bin 0");

  int next_bin = 0;
  int width_sum = 0;
  bool seen_wide = false;
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    const Band& band = bands_[i];
    const std::string where = "band " + std::to_string(i);
    if (band.index != static_cast<int>(i)) fail(where + " has wrong index");
    if (band.low_bin != next_bin) fail(where + " leaves a gap or overlaps");
    if (band.high_bin < band.low_bin) fail(where + " is empty");
    if (band.width != band.high_bin - band.low_bin + 1) fail(where + " width mismatch");
    if (band.bark < 0.0) fail(where + " has negative bark");
    if (i > 0 && band.bark < bands_[i - 1].bark) fail(where + " bark decreases");
    if (seen_wide && band.width < 3) fail(where + " breaks the contiguous wide-band run");
    seen_wide = seen_wide || band.width >= 3;
    width_sum += band.width;
    next_bin = band.high_bin + 1;
  }
  if (width_sum != static_cast<int>(kTableBins)) fail("widths do not sum to 128");
  if (next_bin != static_cast<int>(kTableBins)) fail("bands do not end at bin 127");
  if (!seen_wide) fail("no band of width >= 3");
}

std::string BandTable::to_csv() const {
  std::ostringstream out;
  out << "band,low,high,width,bark\n";
  char bark[32];
  for (const Band& band : bands_) {
    std::snprintf(bark, sizeof bark, "%.2f", band.bark);
    out << band.index << ',' << band.low_bin << ',' << band.high_bin << ',' << band.width << ','
        << bark << '\n';
  }
  return out.str();
}

bool is_supported_rate(int sample_rate) noexcept {
  return sample_rate == 16000 || sample_rate == 44100;
}

const BandTable& table_for(int sample_rate) {
  static const BandTable table16k(16000, to_bands(kRows16k));
  static const BandTable table44k(44100, to_bands(kRows44k));
  switch (sample_rate) {
    case 16000:
      return table16k;
    case 44100:
      return table44k;
    default:
      throw Error(ErrorKind::kArgument, "unsupported sample rate " + std::to_string(sample_rate) +
                                            " Hz (supported: 16000, 44100)");
  }
}

}  // namespace mdat
