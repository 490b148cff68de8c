// foa: synthetic scene generation, sequence processing and reference
// histogram export.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "foa/cli.hpp"

namespace {

template <typename T>
std::optional<T> opt_if(const CLI::Option* o, const T& v) {
  return o->count() ? std::optional<T>(v) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace foa::cli;
  CLI::App app{"Top-view depth head tracking and wall attention maps"};
  app.require_subcommand(1);

  std::string synth_script, synth_config, synth_out;
  std::uint64_t synth_seed = 0;
  bool default_set = false;
  auto* synth = app.add_subcommand("synth", "Render scripted scenes with their ground truth");
  auto* o_script = synth->add_option("--script", synth_script, "Scenario script (INI)")->check(CLI::ExistingFile);
  synth->add_flag("--default-set", default_set, "Render the nine built-in scenarios into seq_* directories");
  auto* o_sconfig = synth->add_option("--config", synth_config, "Room and pipeline configuration")->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory")->required();
  auto* o_sseed = synth->add_option("--seed", synth_seed, "Override the noise seed");

  std::string run_config, run_frames, run_out, run_refs;
  std::uint64_t run_seed = 0;
  bool no_track = false;
  int px_per_sample = 1;
  auto* run = app.add_subcommand("run", "Detect, track and accumulate attention over a sequence");
  auto* o_rconfig = run->add_option("--config", run_config, "Room and pipeline configuration")->check(CLI::ExistingFile);
  run->add_option("--frames", run_frames, "Sequence directory or manifest file")->required();
  run->add_option("--out", run_out, "Output directory")->required();
  auto* o_rseed = run->add_option("--seed", run_seed, "Recorded in the run summary");
  run->add_flag("--no-track", no_track, "Stop after detection");
  run->add_option("--heatmap-px-per-sample", px_per_sample, "Heatmap columns per wall sample")
      ->check(CLI::PositiveNumber);
  auto* o_refs = run->add_option("--refs", run_refs, "Reference histogram table")->check(CLI::ExistingFile);

  std::string ref_out, ref_config;
  auto* refhist = app.add_subcommand("refhist", "Write the five reference histograms");
  refhist->add_option("--out", ref_out, "Output file")->required();
  auto* o_fconfig = refhist->add_option("--config", ref_config, "Room and pipeline configuration")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (synth->parsed()) {
      SynthOptions o;
      o.script = opt_if<std::filesystem::path>(o_script, synth_script);
      o.default_set = default_set;
      o.config = opt_if<std::filesystem::path>(o_sconfig, synth_config);
      o.out = synth_out;
      o.seed = opt_if(o_sseed, synth_seed);
      if (o.script.has_value() == o.default_set) {
        std::cerr << "synth: give exactly one of --script or --default-set\n";
        return kUsage;
      }
      for (const auto& d : cmd_synth(o)) std::cout << d.string() << "\n";
    } else if (run->parsed()) {
      RunOptions o;
      o.config = opt_if<std::filesystem::path>(o_rconfig, run_config);
      o.frames = run_frames;
      o.out = run_out;
      o.seed = opt_if(o_rseed, run_seed);
      o.no_track = no_track;
      o.heatmap_px_per_sample = px_per_sample;
      o.refs = opt_if<std::filesystem::path>(o_refs, run_refs);
      const auto s = cmd_run(o);
      std::cout << to_json(s).dump(2) << "\n";
    } else if (refhist->parsed()) {
      const auto refs = cmd_refhist(ref_out, opt_if<std::filesystem::path>(o_fconfig, ref_config));
      std::cout << ref_out << ": " << refs.histograms.size() << " histograms\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kOk;
}
