#include "mdat/mdat_file.hpp"

#include <cmath>

#include "mdat/byte_io.hpp"
#include "mdat/error.hpp"
#include "mdat/inversion_core.hpp"
#include "mdat/wav_io.hpp"

namespace mdat {

std::vector<std::uint8_t> encode_mdat(const MdatPayload& payload) {
  validate_payload(payload);
  detail::ByteWriter w;
  w.put_tag("MDAT");
  w.put<std::uint32_t>(kMdatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(payload.sample_rate));
  w.put<std::uint64_t>(payload.original_length);
  w.put<std::uint64_t>(payload.frames.size());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(payload.num_ac_bands));
  for (const FrameRecord& frame : payload.frames) {
    for (double v : frame.e) w.put<double>(v);
    for (double v : frame.ec) w.put<double>(v);
    for (float v : frame.side.c) w.put<float>(v);
    for (float v : frame.side.phase) w.put<float>(v);
    w.put<double>(frame.side.dc.real());
    w.put<double>(frame.side.dc.imag());
    w.put<double>(frame.side.nyquist.real());
    w.put<double>(frame.side.nyquist.imag());
  }
  return std::move(w.bytes());
}

MdatPayload decode_mdat(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  if (in.get_tag("magic") != "MDAT") throw FormatError("bad magic, not an MDAT file", 0);
  const auto version = in.get<std::uint32_t>("version");
  if (version != kMdatVersion) {
    throw FormatError("unsupported MDAT version " + std::to_string(version) + " (expected " +
                          std::to_string(kMdatVersion) + ")",
                      4);
  }
  MdatPayload payload;
  payload.sample_rate = static_cast<int>(in.get<std::uint32_t>("sample rate"));
  payload.original_length = in.get<std::uint64_t>("original length");
  const auto frame_count = in.get<std::uint64_t>("frame count");
  payload.num_ac_bands = static_cast<int>(in.get<std::uint32_t>("band count"));

  if (!is_supported_rate(payload.sample_rate)) {
    throw FormatError("unsupported sample rate " + std::to_string(payload.sample_rate), 8);
  }
  if (payload.num_ac_bands != table_for(payload.sample_rate).num_ac_bands()) {
    throw FormatError("band count " + std::to_string(payload.num_ac_bands) +
                          " does not match the table for this sample rate",
                      28);
  }
  if (payload.original_length == 0 ||
      frame_count != (payload.original_length + kFrameSize - 1) / kFrameSize) {
    throw FormatError("frame count inconsistent with original length", 20);
  }
  const std::size_t record = mdat_record_size(payload.num_ac_bands);
  if (in.remaining() != frame_count * record) {
    throw FormatError("file size does not match " + std::to_string(frame_count) + " frame records",
                      kMdatHeaderSize);
  }

  const auto bands = static_cast<std::size_t>(payload.num_ac_bands) + 1;
  payload.frames.resize(frame_count);
  for (FrameRecord& frame : payload.frames) {
    const std::size_t start = in.position();
    frame.e.resize(bands);
    frame.ec.resize(bands);
    for (double& v : frame.e) v = in.get<double>("e");
    for (double& v : frame.ec) v = in.get<double>("ec");
    for (float& v : frame.side.c) v = in.get<float>("c");
    for (float& v : frame.side.phase) v = in.get<float>("phase");
    const double dc_re = in.get<double>("dc");
    const double dc_im = in.get<double>("dc");
    const double ny_re = in.get<double>("nyquist");
    const double ny_im = in.get<double>("nyquist");
    frame.side.dc = Complex(dc_re, dc_im);
    frame.side.nyquist = Complex(ny_re, ny_im);
    for (std::size_t b = 0; b < bands; ++b) {
      if (!(frame.e[b] >= 0.0) || !(frame.ec[b] >= 0.0) || !std::isfinite(frame.e[b]) ||
          !std::isfinite(frame.ec[b])) {
        throw FormatError("negative or non-finite band energy", start);
      }
    }
  }
  return payload;
}

void write_mdat(const std::filesystem::path& path, const MdatPayload& payload) {
  write_file(path, encode_mdat(payload));
}

MdatPayload read_mdat(const std::filesystem::path& path) { return decode_mdat(read_file(path)); }

}  // namespace mdat
