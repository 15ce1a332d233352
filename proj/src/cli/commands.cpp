#include "mdat/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mdat/band_tables.hpp"
#include "mdat/mdat_file.hpp"
#include "mdat/spectral_frontend.hpp"

namespace mdat::cli {
namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "error writing " + path.string());
}

// Writes to `path`, or to `fallback` when no path was given.
void emit(const std::filesystem::path& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
  } else {
    write_text_file(path, text);
  }
}

const char* mode_name(InversionMode mode) { return mode == InversionMode::kV1 ? "v1" : "v2"; }

void print_diagnostics(const InversionDiagnostics& d, const InversionOptions& options, std::ostream& out) {
  out << "frames: " << d.frames << "\n"
      << "mode: " << mode_name(options.mode) << "  tau: " << format_double(options.tau) << "\n"
      << "active bands: " << d.active_bands << "  clamped: " << d.clamped_bands << "\n"
      << "max theta deviation (clamped bands): " << format_double(d.max_theta_deviation) << "\n";
  if (options.mode == InversionMode::kV1) {
    out << "max QP residual: " << format_double(d.max_qp_residual)
        << "  non-converged frames: " << d.qp_failures << "\n";
  }
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kFormat:
      return kExitFormat;
    case ErrorKind::kNumerical:
      return kExitNumerical;
    case ErrorKind::kArgument:
      return kExitArgument;
  }
  return kExitNumerical;
}

DumpField parse_dump_field(const std::string& name) {
  if (name == "c") return DumpField::kC;
  if (name == "ec") return DumpField::kEc;
  if (name == "e") return DumpField::kE;
  if (name == "cb") return DumpField::kCb;
  if (name == "tb") return DumpField::kTb;
  if (name == "snr") return DumpField::kSnr;
  throw Error(ErrorKind::kArgument, "unknown dump field '" + name + "' (expected c, ec, e, cb, tb, snr)");
}

std::string dump_csv(const MdatPayload& payload, DumpField what, std::size_t first, std::size_t last) {
  const std::size_t count = payload.frames.size();
  if (first > last || last >= count) {
    throw Error(ErrorKind::kArgument, "frame range " + std::to_string(first) + ":" +
                                          std::to_string(last) + " outside 0:" +
                                          std::to_string(count == 0 ? 0 : count - 1));
  }
  const BandTable& table = table_for(payload.sample_rate);
  const SpreadingMatrix spread(table);
  const std::size_t bands = table.bands().size();

  std::vector<std::vector<double>> columns;
  for (std::size_t t = first; t <= last; ++t) {
    const FrameRecord& frame = payload.frames[t];
    switch (what) {
      case DumpField::kC:
        columns.emplace_back(frame.side.c.begin(), frame.side.c.end());
        break;
      case DumpField::kE:
        columns.push_back(frame.e);
        break;
      case DumpField::kEc:
        columns.push_back(frame.ec);
        break;
      case DumpField::kCb:
      case DumpField::kTb:
      case DumpField::kSnr: {
        PerceptionVector v = perceive(frame.e, frame.ec, spread);
        std::vector<double>& src = what == DumpField::kCb ? v.cb : what == DumpField::kTb ? v.tb : v.snr;
        columns.emplace_back(src.begin() + 1, src.end());
        break;
      }
    }
  }

  const bool bins = what == DumpField::kC;
  const std::size_t first_index = (what == DumpField::kCb || what == DumpField::kTb || what == DumpField::kSnr) ? 1 : 0;
  const std::size_t rows = bins ? kTableBins : bands - first_index;

  std::ostringstream out;
  out << (bins ? "k" : "band");
  for (std::size_t t = first; t <= last; ++t) out << ",frame_" << t;
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out << r + first_index;
    for (const auto& col : columns) out << ',' << format_double(col[r]);
    out << '\n';
  }
  return out.str();
}

std::string format_report(const ComparisonReport& report) {
  std::ostringstream out;
  out << "relative_l2=" << format_double(report.relative_l2) << '\n'
      << "band_energy_max_rel_error=" << format_double(report.band_energy_max_rel_error) << '\n'
      << "theta_max_abs_error=" << format_double(report.theta_max_abs_error) << '\n'
      << "clip_count=" << report.clip_count << '\n'
      << "active_bands=" << report.active_bands << '\n'
      << "clamped_bands=" << report.clamped_bands << '\n'
      << "spectra_csv=" << report.spectra_csv << '\n'
      << "waveform_csv=" << report.waveform_csv << '\n';
  return out.str();
}

ComparisonReport round_trip(const AudioBuffer& input, const InversionOptions& options,
                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  const MdatPayload analyzed = analyze(input.samples, input.sample_rate);
  const std::vector<std::uint8_t> container = encode_mdat(analyzed);
  write_file(out_dir / "analysis.mdat", container);
  const MdatPayload payload = decode_mdat(container);

  InversionDiagnostics diagnostics;
  const std::vector<FrameInversion> frames = invert_frames(payload, options, &diagnostics);
  std::vector<double> reconstructed = synthesize(frames);

  ComparisonReport report;
  report.band_energy_max_rel_error = band_energy_max_rel_error(payload, reconstructed);
  report.theta_max_abs_error = diagnostics.max_theta_deviation;
  report.clamped_bands = diagnostics.clamped_bands;
  report.active_bands = diagnostics.active_bands;

  // Amplitude spectra of original and reconstructed frames, bins 0..128.
  const std::vector<Frame> original_frames = frames_of(input.samples);
  std::ostringstream spectra;
  spectra << "frame,k,original,reconstructed\n";
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const SpectralFrame original = dft(original_frames[t]);
    for (std::size_t k = 0; k <= kNyquistBin; ++k) {
      spectra << t << ',' << k << ',' << format_double(std::abs(original.bins[k])) << ','
              << format_double(std::abs(frames[t].spectrum.bins[k])) << '\n';
    }
  }

  reconstructed.resize(input.samples.size());
  report.relative_l2 = relative_l2(input.samples, reconstructed);

  std::ostringstream waveform;
  waveform << "n,original,reconstructed\n";
  for (std::size_t n = 0; n < reconstructed.size(); ++n) {
    waveform << n << ',' << format_double(input.samples[n]) << ',' << format_double(reconstructed[n])
             << '\n';
  }

  report.clip_count = write_wav(out_dir / "reconstructed.wav", {input.sample_rate, reconstructed});
  report.spectra_csv = "spectra.csv";
  report.waveform_csv = "waveform.csv";
  write_text_file(out_dir / report.spectra_csv, spectra.str());
  write_text_file(out_dir / report.waveform_csv, waveform.str());
  write_text_file(out_dir / "report.txt", format_report(report));
  return report;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const AudioBuffer audio = read_wav(args.input);
    const MdatPayload payload = analyze(audio.samples, audio.sample_rate);
    write_mdat(args.output, payload);

    double total = 0.0;
    double peak = 0.0;
    for (const FrameRecord& frame : payload.frames) {
      double frame_energy = 0.0;
      for (double e : frame.e) frame_energy += e;
      total += frame_energy;
      peak = std::max(peak, frame_energy);
    }
    out << "frames: " << payload.frames.size() << "  J: " << payload.num_ac_bands
        << "  sample rate: " << payload.sample_rate << "\n"
        << "mean frame energy: " << format_double(total / static_cast<double>(payload.frames.size()))
        << "  peak frame energy: " << format_double(peak) << "\n";
    return kExitOk;
  });
}

int cmd_invert(const InvertArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MdatPayload payload = read_mdat(args.input);
    InversionDiagnostics diagnostics;
    std::vector<double> signal = invert(payload, args.options, &diagnostics);
    const std::size_t clips = write_wav(args.output, {payload.sample_rate, std::move(signal)});
    print_diagnostics(diagnostics, args.options, out);
    out << "clipped samples: " << clips << "\n";
    return kExitOk;
  });
}

int cmd_roundtrip(const RoundTripArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const AudioBuffer audio = read_wav(args.input);
    const ComparisonReport report = round_trip(audio, args.options, args.out_dir);
    out << format_report(report);
    return kExitOk;
  });
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const AudioBuffer a = read_wav(args.original);
    const AudioBuffer b = read_wav(args.reconstructed);
    out << "relative_l2=" << format_double(relative_l2(a.samples, b.samples)) << '\n';
    return kExitOk;
  });
}

int cmd_dump(const DumpArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MdatPayload payload = read_mdat(args.input);
    const std::size_t first = args.first_frame.value_or(0);
    const std::size_t last = args.last_frame.value_or(payload.frames.size() - 1);
    emit(args.output, dump_csv(payload, args.what, first, last), out);
    return kExitOk;
  });
}

int cmd_tables(const TablesArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    emit(args.output, table_for(args.sample_rate).to_csv(), out);
    return kExitOk;
  });
}

}  // namespace mdat::cli
