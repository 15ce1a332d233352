#include "mdat/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "mdat/byte_io.hpp"
#include "mdat/error.hpp"

namespace mdat {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;
constexpr double kPcm16Scale = 32768.0;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  if (in.get_tag("RIFF tag") != "RIFF") throw FormatError("not a RIFF file", 0);
  in.get<std::uint32_t>("RIFF size");
  if (in.get_tag("WAVE tag") != "WAVE") throw FormatError("not a WAVE file", 8);

  FmtChunk fmt;
  bool have_fmt = false;
  while (true) {
    const std::size_t chunk_start = in.position();
    const std::string id = in.get_tag("chunk id");
    const auto size = in.get<std::uint32_t>("chunk size");

    if (id == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk too small", chunk_start);
      in.require(size, "fmt chunk");
      fmt.format = in.get<std::uint16_t>("format tag");
      fmt.channels = in.get<std::uint16_t>("channel count");
      fmt.sample_rate = in.get<std::uint32_t>("sample rate");
      in.get<std::uint32_t>("byte rate");
      in.get<std::uint16_t>("block align");
      fmt.bits = in.get<std::uint16_t>("bits per sample");
      std::size_t consumed = 16;
      if (fmt.format == kFormatExtensible && size >= 40) {
        in.skip(8, "extensible header");
        fmt.format = in.get<std::uint16_t>("extensible subformat");
        consumed += 10;
      }
      in.skip(size - consumed + (size & 1U), "fmt chunk tail");
      have_fmt = true;
      continue;
    }

    if (id == "data") {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk", chunk_start);
      const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
      const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
      if (!pcm16 && !float32) {
        throw FormatError("unsupported codec (format " + std::to_string(fmt.format) + ", " +
                              std::to_string(fmt.bits) + " bits); need 16-bit PCM or 32-bit float",
                          chunk_start);
      }
      if (fmt.channels != 1 && fmt.channels != 2) {
        throw FormatError("unsupported channel count " + std::to_string(fmt.channels), chunk_start);
      }
      in.require(size, "data chunk");
      const std::size_t width = fmt.bits / 8;
      const std::size_t frame_bytes = width * fmt.channels;
      const std::size_t count = size / frame_bytes;

      AudioBuffer out;
      out.sample_rate = static_cast<int>(fmt.sample_rate);
      out.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        double sum = 0.0;
        for (std::size_t ch = 0; ch < fmt.channels; ++ch) {
          double value;
          if (pcm16) {
            value = static_cast<double>(in.get<std::int16_t>("sample")) / kPcm16Scale;
          } else {
            value = static_cast<double>(in.get<float>("sample"));
            if (!std::isfinite(value)) throw FormatError("non-finite float sample", in.position() - 4);
          }
          sum += value;
        }
        out.samples[i] = sum / static_cast<double>(fmt.channels);
      }
      return out;
    }

    in.skip(size + (size & 1U), "chunk body");
  }
}

AudioBuffer read_wav(const std::filesystem::path& path) { return decode_wav(read_file(path)); }

WavEncoding encode_wav(const AudioBuffer& buffer) {
  if (buffer.samples.empty()) throw Error(ErrorKind::kArgument, "cannot write an empty audio buffer");
  if (buffer.sample_rate <= 0) throw Error(ErrorKind::kArgument, "sample rate must be positive");

  WavEncoding out;
  const auto data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);
  detail::ByteWriter w;
  w.put_tag("RIFF");
  w.put<std::uint32_t>(36 + data_bytes);
  w.put_tag("WAVE");
  w.put_tag("fmt ");
  w.put<std::uint32_t>(16);
  w.put<std::uint16_t>(kFormatPcm);
  w.put<std::uint16_t>(1);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(buffer.sample_rate));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(buffer.sample_rate) * 2);
  w.put<std::uint16_t>(2);
  w.put<std::uint16_t>(16);
  w.put_tag("data");
  w.put<std::uint32_t>(data_bytes);
  for (double x : buffer.samples) {
    if (!std::isfinite(x)) throw Error(ErrorKind::kArgument, "cannot encode a non-finite sample");
    if (x > 1.0 || x < -1.0) {
      ++out.clip_count;
      x = std::clamp(x, -1.0, 1.0);
    }
    const double scaled = std::clamp(std::round(x * kPcm16Scale), -32768.0, 32767.0);
    w.put<std::int16_t>(static_cast<std::int16_t>(scaled));
  }
  out.bytes = std::move(w.bytes());
  return out;
}

std::size_t write_wav(const std::filesystem::path& path, const AudioBuffer& buffer) {
  WavEncoding encoded = encode_wav(buffer);
  write_file(path, encoded.bytes);
  return encoded.clip_count;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::kIo, "error reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "error writing " + path.string());
}

}  // namespace mdat
