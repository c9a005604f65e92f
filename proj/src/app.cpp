#include "nntopo/app.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nntopo/activation_store.hpp"
#include "nntopo/error.hpp"
#include "nntopo/heatmap.hpp"
#include "nntopo/nng.hpp"
#include "nntopo/nnts.hpp"
#include "nntopo/parallel.hpp"
#include "nntopo/persistence.hpp"
#include "nntopo/report.hpp"

namespace nntopo {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

class Timings {
 public:
  void mark(const std::string& phase) {
    const auto now = Clock::now();
    record_[phase] =
        std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }
  nlohmann::json json() const { return record_; }

 private:
  Clock::time_point last_ = Clock::now();
  nlohmann::json record_ = nlohmann::json::object();
};

const char* command_name(Command c) {
  switch (c) {
    case Command::nnts: return "nnts";
    case Command::persist: return "persist";
    case Command::synth: return "synth";
    case Command::heatmap: return "heatmap";
  }
  return "?";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("output directory " + dir.string() + " is not writable");
  }
}

void write_text(const fs::path& path, const std::string& text, RunArtifacts& out) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot create " + path.string());
  f << text;
  if (!f) throw IoError("error writing " + path.string());
  out.files.push_back(path);
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j = {{"command", command_name(cfg.command)},
                      {"threads", resolve_threads(cfg.threads)}};
  switch (cfg.command) {
    case Command::nnts:
    case Command::persist:
      j["manifest"] = cfg.manifest.string();
      j["k"] = cfg.ks;
      j["output_dir"] = cfg.output_dir.string();
      j["scale"] = cfg.scale ? nlohmann::json(*cfg.scale) : nlohmann::json();
      j["dump_edges"] = cfg.dump_edges;
      j["dump_graph"] = cfg.dump_graph;
      j["svg"] = cfg.svg;
      break;
    case Command::synth:
      j["output_dir"] = cfg.output_dir.string();
      j["synth"] = {{"n", cfg.synth.samples},
                    {"d", cfg.synth.features},
                    {"layers", cfg.synth.layers},
                    {"seed", cfg.synth.seed},
                    {"scenario", std::string(scenario_name(cfg.synth.scenario))},
                    {"clusters", cfg.synth.clusters},
                    {"cluster_sigma", cfg.synth.cluster_sigma},
                    {"walk_step", cfg.synth.walk_step}};
      break;
    case Command::heatmap:
      j["matrix"] = cfg.matrix_csv.string();
      j["svg_out"] = cfg.svg_out.string();
      break;
  }
  return j;
}

void write_invocation(Command command, RunConfig cfg, const fs::path& dir,
                      const Timings& t, const nlohmann::json& extra, RunArtifacts& out) {
  cfg.command = command;
  nlohmann::json record = {{"tool", "nntopo"},
                           {"version", kVersion},
                           {"config", config_json(cfg)},
                           {"timings_ms", t.json()},
                           {"outputs", nlohmann::json::array()}};
  for (const auto& f : out.files) record["outputs"].push_back(f.filename().string());
  if (!extra.is_null()) record["summary"] = extra;
  write_text(dir / (std::string("invocation_") + command_name(command) + ".json"),
             record.dump(2) + "\n", out);
}

void check_k(std::size_t k, const ActivationChain& chain) {
  if (k < 1 || k > chain.samples() - 1) {
    throw ValidationError("k = " + std::to_string(k) +
                          " violates 1 <= k <= n-1 (n = " +
                          std::to_string(chain.samples()) + ")");
  }
}

void check_nnts_invariants(const NntsMatrix& m) {
  const std::size_t l = m.layers();
  for (std::size_t a = 0; a < l; ++a) {
    if (m(a, a) != 1.0) throw InvariantError("NNTS diagonal is not exactly 1");
    for (std::size_t b = 0; b < l; ++b) {
      if (m(a, b) != m(b, a)) throw InvariantError("NNTS matrix is not symmetric");
      if (!(m(a, b) >= 0.0 && m(a, b) <= 1.0)) {
        throw InvariantError("NNTS value outside [0, 1]");
      }
    }
  }
}

}  // namespace

RunArtifacts run_nnts(const RunConfig& cfg) {
  if (cfg.ks.empty()) throw ValidationError("nnts needs at least one --k");
  Timings timings;
  const auto chain = load_chain(cfg.manifest);
  timings.mark("load");

  std::vector<std::size_t> ks = cfg.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (std::size_t k : ks) check_k(k, chain);
  ensure_dir(cfg.output_dir);

  const std::size_t kmax = ks.back();
  KnnOptions knn;
  knn.threads = cfg.threads;
  std::vector<NeighbourGraph> full;
  full.reserve(chain.size());
  for (const auto& layer : chain) full.push_back(build_knn_graph(layer, kmax, knn));
  timings.mark("graphs");

  RunArtifacts out;
  if (cfg.dump_graph) {
    for (std::size_t v = 0; v < chain.size(); ++v) {
      std::ostringstream csv;
      write_graph_csv(csv, full[v], chain[v].data);
      write_text(cfg.output_dir / ("graph_" + chain[v].name + "_k" +
                                   std::to_string(kmax) + ".csv"),
                 csv.str(), out);
    }
  }

  nlohmann::json summary = nlohmann::json::object();
  for (std::size_t k : ks) {
    std::vector<NeighbourGraph> graphs;
    graphs.reserve(full.size());
    for (const auto& g : full) graphs.push_back(g.prefix(k));
    const auto matrix = nnts_matrix(graphs, chain.names(), cfg.threads);
    check_nnts_invariants(matrix);

    const std::string stem = "nnts_k" + std::to_string(k);
    std::ostringstream csv;
    write_nnts_csv(csv, matrix);
    write_text(cfg.output_dir / (stem + ".csv"), csv.str(), out);
    write_text(cfg.output_dir / (stem + ".json"), nnts_json(matrix).dump(2) + "\n", out);
    if (cfg.svg) {
      write_text(cfg.output_dir / (stem + ".svg"),
                 render_heatmap_svg(parse_matrix_csv(csv.str()),
                                    "NNTS k=" + std::to_string(k)),
                 out);
    }
    summary[std::to_string(k)] = {{"layers", matrix.layers()}, {"n", chain.samples()}};
    timings.mark("nnts_k" + std::to_string(k));
  }
  write_invocation(Command::nnts, cfg, cfg.output_dir, timings, summary, out);
  return out;
}

RunArtifacts run_persist(const RunConfig& cfg) {
  if (cfg.ks.size() != 1) {
    throw ValidationError("persist takes exactly one --k, got " +
                          std::to_string(cfg.ks.size()));
  }
  if (cfg.scale && !(*cfg.scale > 0.0)) {
    throw ValidationError("--scale must be positive");
  }
  Timings timings;
  const auto chain = load_chain(cfg.manifest);
  timings.mark("load");
  const std::size_t k = cfg.ks.front();
  check_k(k, chain);
  ensure_dir(cfg.output_dir);

  KnnOptions knn;
  knn.threads = cfg.threads;
  PresenceTable table(chain.samples(), chain.size());
  for (std::size_t v = 0; v < chain.size(); ++v) {
    table.add_layer(v, to_undirected(build_knn_graph(chain[v], k, knn)));
  }
  timings.mark("graphs");

  const auto matrix = persistence_matrix(table, chain.names(), cfg.threads);
  check_conservation(matrix, table, k);
  timings.mark("persistence");

  RunArtifacts out;
  const std::string stem = "persistence_k" + std::to_string(k);
  std::ostringstream csv;
  write_persistence_csv(csv, matrix, cfg.scale);
  write_text(cfg.output_dir / (stem + ".csv"), csv.str(), out);
  write_text(cfg.output_dir / (stem + ".json"), persistence_json(matrix).dump(2) + "\n",
             out);
  if (cfg.dump_edges) {
    std::ostringstream runs;
    write_runs_csv(runs, table);
    write_text(cfg.output_dir / ("runs_k" + std::to_string(k) + ".csv"), runs.str(), out);
  }
  timings.mark("write");

  nlohmann::json summary = {{"n", chain.samples()},
                            {"layers", chain.size()},
                            {"k", k},
                            {"distinct_pairs", table.size()},
                            {"layer_edges", std::vector<std::size_t>(
                                                table.layer_edge_counts().begin(),
                                                table.layer_edge_counts().end())}};
  write_invocation(Command::persist, cfg, cfg.output_dir, timings, summary, out);
  return out;
}

RunArtifacts run_synth(const RunConfig& cfg) {
  Timings timings;
  const auto chain = generate(cfg.synth);
  timings.mark("generate");
  RunArtifacts out;
  const auto manifest = write_chain(chain, cfg.output_dir);
  out.files.push_back(manifest);
  timings.mark("write");
  write_invocation(Command::synth, cfg, cfg.output_dir, timings, {{"manifest", manifest.filename().string()}},
                   out);
  return out;
}

RunArtifacts run_heatmap(const RunConfig& cfg) {
  Timings timings;
  std::ifstream in(cfg.matrix_csv, std::ios::binary);
  if (!in) throw IoError("cannot open matrix CSV " + cfg.matrix_csv.string());
  std::ostringstream text;
  text << in.rdbuf();
  const auto matrix = parse_matrix_csv(text.str());
  timings.mark("parse");

  fs::path target = cfg.svg_out;
  if (target.empty()) target = fs::path(cfg.matrix_csv).replace_extension(".svg");
  const auto dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  ensure_dir(dir);
  RunArtifacts out;
  write_text(target, render_heatmap_svg(matrix, cfg.matrix_csv.filename().string()),
             out);
  timings.mark("render");
  write_invocation(Command::heatmap, cfg, dir, timings, nullptr, out);
  return out;
}

RunArtifacts run(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::nnts: return run_nnts(cfg);
    case Command::persist: return run_persist(cfg);
    case Command::synth: return run_synth(cfg);
    case Command::heatmap: return run_heatmap(cfg);
  }
  throw InvariantError("unknown command");
}

}  // namespace nntopo
