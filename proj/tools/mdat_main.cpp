// mdat: command-line driver for the many-to-one discrete auditory transform.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mdat/cli/commands.hpp"
#include "mdat/spectral_smoother.hpp"

namespace {

void add_inversion_flags(CLI::App& cmd, mdat::InversionOptions& options, std::string& mode) {
  options.tau = mdat::kDefaultFlowTime;
  cmd.add_option("--tau", options.tau, "Smoothing flow time (0 disables smoothing)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--mode", mode, "Theta source: v2 (stored ec) or v1 (recovered from cb)")
      ->check(CLI::IsMember({"v1", "v2"}));
  cmd.add_option("--jobs", options.jobs, "Worker threads for frame inversion")
      ->check(CLI::PositiveNumber);
}

// "A" or "A:B", inclusive.
void parse_frames(const std::string& text, mdat::cli::DumpArgs& args) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      args.first_frame = args.last_frame = std::stoull(text);
    } else {
      args.first_frame = std::stoull(text.substr(0, colon));
      args.last_frame = std::stoull(text.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--frames", "expected N or FIRST:LAST");
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mdat::cli;

  CLI::App app{"Many-to-one discrete auditory transform: analysis, inversion and comparison"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "WAV -> MDAT perception payload");
  analyze->add_option("input", analyze_args.input, "Input WAV (16 or 44.1 kHz)")->required();
  analyze->add_option("--out", analyze_args.output, "Output MDAT file")->required();

  InvertArgs invert_args;
  std::string invert_mode = "v2";
  auto* invert = app.add_subcommand("invert", "MDAT -> reconstructed WAV");
  invert->add_option("input", invert_args.input, "Input MDAT file")->required();
  invert->add_option("--out", invert_args.output, "Output WAV")->required();
  add_inversion_flags(*invert, invert_args.options, invert_mode);

  RoundTripArgs roundtrip_args;
  std::string roundtrip_mode = "v2";
  auto* roundtrip = app.add_subcommand("roundtrip", "Analyze, invert and compare in one run");
  roundtrip->add_option("input", roundtrip_args.input, "Input WAV")->required();
  roundtrip->add_option("--out", roundtrip_args.out_dir, "Output directory")->required();
  add_inversion_flags(*roundtrip, roundtrip_args.options, roundtrip_mode);

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Relative l2 error between two WAV files");
  compare->add_option("original", compare_args.original)->required();
  compare->add_option("reconstructed", compare_args.reconstructed)->required();

  DumpArgs dump_args;
  std::string dump_what = "c";
  std::string dump_frames;
  auto* dump = app.add_subcommand("dump", "Export per-frame quantities as CSV");
  dump->add_option("input", dump_args.input, "Input MDAT file")->required();
  dump->add_option("--what", dump_what, "c, ec, e, cb, tb or snr")
      ->check(CLI::IsMember({"c", "ec", "e", "cb", "tb", "snr"}));
  dump->add_option("--frames", dump_frames, "Frame N or inclusive range FIRST:LAST");
  dump->add_option("--out", dump_args.output, "Output CSV (default stdout)");

  TablesArgs tables_args;
  auto* tables = app.add_subcommand("tables", "Print a band table as CSV");
  tables->add_option("--rate", tables_args.sample_rate, "16000 or 44100");
  tables->add_option("--out", tables_args.output, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
    if (!dump_frames.empty()) parse_frames(dump_frames, dump_args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto mode_of = [](const std::string& m) {
    return m == "v1" ? mdat::InversionMode::kV1 : mdat::InversionMode::kV2;
  };

  if (*analyze) return cmd_analyze(analyze_args, std::cout, std::cerr);
  if (*invert) {
    invert_args.options.mode = mode_of(invert_mode);
    return cmd_invert(invert_args, std::cout, std::cerr);
  }
  if (*roundtrip) {
    roundtrip_args.options.mode = mode_of(roundtrip_mode);
    return cmd_roundtrip(roundtrip_args, std::cout, std::cerr);
  }
  if (*compare) return cmd_compare(compare_args, std::cout, std::cerr);
  if (*dump) {
    dump_args.what = parse_dump_field(dump_what);
    return cmd_dump(dump_args, std::cout, std::cerr);
  }
  if (*tables) return cmd_tables(tables_args, std::cout, std::cerr);
  return kExitUsage;
}
