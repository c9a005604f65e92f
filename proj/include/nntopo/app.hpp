#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nntopo/synthgen.hpp"

namespace nntopo {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { nnts, persist, synth, heatmap };

struct RunConfig {
  Command command = Command::nnts;
  std::filesystem::path manifest;
  std::vector<std::size_t> ks;
  std::filesystem::path output_dir = ".";
  std::optional<double> scale;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool dump_edges = false;  // persist: per-run CSV
  bool dump_graph = false;  // nnts: per-layer neighbour CSV at max k
  bool svg = false;         // nnts: heatmap next to each matrix
  std::filesystem::path matrix_csv;  // heatmap input
  std::filesystem::path svg_out;     // heatmap output
  SynthSpec synth;
};

/// Paths written by one run, invocation record included.
struct RunArtifacts {
  std::vector<std::filesystem::path> files;
};

/// One NNTS matrix per k. Graphs are built once at max(k) and every smaller
/// k takes list prefixes.
RunArtifacts run_nnts(const RunConfig& cfg);

/// 0-persistence matrix for a single k. The run-length conservation check
/// must pass before anything is written.
RunArtifacts run_persist(const RunConfig& cfg);

RunArtifacts run_synth(const RunConfig& cfg);

RunArtifacts run_heatmap(const RunConfig& cfg);

RunArtifacts run(const RunConfig& cfg);

}  // namespace nntopo
