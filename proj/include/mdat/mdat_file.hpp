#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mdat/forward_transform.hpp"

namespace mdat {

/// MDAT container, little-endian throughout.
///
/// Header (32 bytes):
///   char[4] magic "MDAT", u32 version, u32 sample_rate, u64 original_length,
///   u64 frame_count, u32 J
/// Frame record (repeated frame_count times):
///   f64 e[J+1], f64 ec[J+1], f32 c[128], f32 phase[128],
///   f64 dc.re, f64 dc.im, f64 nyquist.re, f64 nyquist.im
inline constexpr std::uint32_t kMdatVersion = 1;
inline constexpr std::size_t kMdatHeaderSize = 32;

/// Bytes per frame record: 16 (J+1) + 1056.
constexpr std::size_t mdat_record_size(int num_ac_bands) {
  return 16 * (static_cast<std::size_t>(num_ac_bands) + 1) + 4 * 2 * kTableBins + 4 * 8;
}

std::vector<std::uint8_t> encode_mdat(const MdatPayload& payload);

/// Rejects bad magic, unknown version, frame counts that disagree with the
/// original length, a band count that disagrees with the table, wrong total size,
/// and negative or non-finite energies. Throws FormatError.
MdatPayload decode_mdat(std::span<const std::uint8_t> bytes);

void write_mdat(const std::filesystem::path& path, const MdatPayload& payload);
MdatPayload read_mdat(const std::filesystem::path& path);

}  // namespace mdat
