#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mdat {

/// Mono audio with samples nominally in [-1, 1].
struct AudioBuffer {
  int sample_rate = 0;
  std::vector<double> samples;
};

/// Decodes a RIFF/WAVE image: 16-bit PCM or 32-bit IEEE float, mono or stereo
/// (stereo averaged to mono). Any sample rate is accepted here; callers decide
/// whether they can process it. Malformed input throws FormatError.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);
AudioBuffer read_wav(const std::filesystem::path& path);

struct WavEncoding {
  std::vector<std::uint8_t> bytes;
  std::size_t clip_count = 0;  // samples outside [-1, 1] that were clipped
};

/// 16-bit PCM mono. Samples are clipped to [-1, 1], scaled by 32768, rounded and
/// saturated to the int16 range.
WavEncoding encode_wav(const AudioBuffer& buffer);

/// Writes 16-bit PCM and returns the clip count.
std::size_t write_wav(const std::filesystem::path& path, const AudioBuffer& buffer);

/// Whole-file helpers shared with the container code.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace mdat
