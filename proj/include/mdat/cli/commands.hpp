#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mdat/error.hpp"
#include "mdat/forward_transform.hpp"
#include "mdat/inversion_core.hpp"
#include "mdat/metrics.hpp"
#include "mdat/wav_io.hpp"

namespace mdat::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitFormat = 3,
  kExitNumerical = 4,
  kExitArgument = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

struct AnalyzeArgs {
  std::filesystem::path input;
  std::filesystem::path output;
};

struct InvertArgs {
  std::filesystem::path input;
  std::filesystem::path output;
  InversionOptions options;
};

struct RoundTripArgs {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  InversionOptions options;
};

struct CompareArgs {
  std::filesystem::path original;
  std::filesystem::path reconstructed;
};

enum class DumpField { kC, kEc, kE, kCb, kTb, kSnr };

struct DumpArgs {
  std::filesystem::path input;
  DumpField what = DumpField::kC;
  std::optional<std::size_t> first_frame;
  std::optional<std::size_t> last_frame;  // inclusive
  std::filesystem::path output;           // empty: stdout
};

struct TablesArgs {
  int sample_rate = 16000;
  std::filesystem::path output;  // empty: stdout
};

/// Parses "c", "ec", "e", "cb", "tb" or "snr".
DumpField parse_dump_field(const std::string& name);

/// One row per index (bins 0..127 for c, bands 0..J for e/ec, bands 1..J for
/// cb/tb/snr), one column per frame in [first, last].
std::string dump_csv(const MdatPayload& payload, DumpField what, std::size_t first, std::size_t last);

/// analyze -> container encode/decode -> invert -> compare. Writes
/// analysis.mdat, reconstructed.wav, spectra.csv, waveform.csv and report.txt into
/// out_dir (created if missing).
ComparisonReport round_trip(const AudioBuffer& input, const InversionOptions& options,
                            const std::filesystem::path& out_dir);

std::string format_report(const ComparisonReport& report);

// Each command reports failures on `err` and returns a nonzero ExitCode.
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_invert(const InvertArgs& args, std::ostream& out, std::ostream& err);
int cmd_roundtrip(const RoundTripArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);
int cmd_dump(const DumpArgs& args, std::ostream& out, std::ostream& err);
int cmd_tables(const TablesArgs& args, std::ostream& out, std::ostream& err);

}  // namespace mdat::cli
