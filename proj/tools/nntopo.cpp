// nntopo: layer-wise neighbourhood similarity and persistence for
// activation dumps.
//
//   nntopo synth   --scenario random-walk --n 500 --d 32 --layers 6 --out data/
//   nntopo nnts    --manifest data/manifest.json --k 15 --k 100 --svg --out report/
//   nntopo persist --manifest data/manifest.json --k 15 --scale 1000 --out report/
//   nntopo heatmap --matrix report/nnts_k15.csv --out report/nnts_k15.svg
//
// Exit codes: 0 ok, 2 validation error, 3 I/O error, 4 internal invariant.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nntopo/app.hpp"
#include "nntopo/error.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

constexpr const char* kThreadsEnv = "NNTOPO_THREADS";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nearest-neighbour topology of layer activations"};
  app.set_version_flag("--version", std::string(nntopo::kVersion));
  app.require_subcommand(1);

  nntopo::RunConfig cfg;
  std::string scenario = "identical-chain";
  double scale = 0.0;
  std::size_t threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--manifest", cfg.manifest, "Activation manifest JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
  };

  auto* nnts = app.add_subcommand("nnts", "NNTS matrix for one or more k");
  add_common(nnts);
  nnts->add_option("--k", cfg.ks, "Neighbour count; repeat for a sweep")
      ->required()
      ->check(CLI::PositiveNumber);
  nnts->add_flag("--svg", cfg.svg, "Also render an SVG heatmap per k");
  nnts->add_flag("--dump-graph", cfg.dump_graph,
                 "Write per-layer neighbour lists at the largest k");

  auto* persist = app.add_subcommand("persist", "0-persistence run matrix");
  add_common(persist);
  persist->add_option("--k", cfg.ks, "Neighbour count")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* scale_opt = persist->add_option("--scale", scale,
                                        "Divide CSV counts for display (e.g. 1000)")
                        ->check(CLI::PositiveNumber);
  persist->add_flag("--dump-edges", cfg.dump_edges, "Write every run as i,j,start,end");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic activation chain");
  synth->add_option("--scenario", scenario,
                    "identical-chain | gaussian-clusters | random-walk | permuted-copy")
      ->capture_default_str();
  synth->add_option("--n", cfg.synth.samples, "Samples")->capture_default_str();
  synth->add_option("--d", cfg.synth.features, "Features")->capture_default_str();
  synth->add_option("--layers", cfg.synth.layers, "Layers")->capture_default_str();
  synth->add_option("--seed", cfg.synth.seed, "RNG seed")->capture_default_str();
  synth->add_option("--clusters", cfg.synth.clusters, "Cluster count")
      ->capture_default_str();
  synth->add_option("--walk-step", cfg.synth.walk_step, "Random-walk noise std")
      ->capture_default_str();
  synth->add_option("--out", cfg.output_dir, "Output directory")->required();

  auto* heatmap = app.add_subcommand("heatmap", "Render a matrix CSV as SVG");
  heatmap->add_option("--matrix", cfg.matrix_csv, "CSV from nnts or persist")
      ->required()
      ->check(CLI::ExistingFile);
  heatmap->add_option("--out", cfg.svg_out, "SVG path (default: next to the CSV)");

  bool threads_given = false;
  try {
    app.parse(argc, argv);
    threads_given = nnts->count("--threads") + persist->count("--threads") > 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*nnts) cfg.command = nntopo::Command::nnts;
    if (*persist) cfg.command = nntopo::Command::persist;
    if (*synth) {
      cfg.command = nntopo::Command::synth;
      const auto parsed = nntopo::parse_scenario(scenario);
      if (!parsed) throw nntopo::ValidationError("unknown scenario '" + scenario + "'");
      cfg.synth.scenario = *parsed;
    }
    if (*heatmap) cfg.command = nntopo::Command::heatmap;
    if (scale_opt->count() > 0) cfg.scale = scale;

    cfg.threads = threads;
    if (!threads_given) {
      if (const char* env = std::getenv(kThreadsEnv); env && *env) {
        try {
          cfg.threads = std::stoul(env);
        } catch (const std::exception&) {
          throw nntopo::ValidationError(std::string(kThreadsEnv) +
                                        " is not a thread count: " + env);
        }
      }
    }

    const auto artifacts = nntopo::run(cfg);
    for (const auto& f : artifacts.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const nntopo::Error& e) {
    std::cerr << "nntopo: " << e.what() << '\n';
    switch (e.kind()) {
      case nntopo::ErrorKind::validation: return kExitValidation;
      case nntopo::ErrorKind::io: return kExitIo;
      case nntopo::ErrorKind::invariant: return kExitInvariant;
    }
  } catch (const std::exception& e) {
    std::cerr << "nntopo: internal error: " << e.what() << '\n';
  }
  return kExitInvariant;
}
