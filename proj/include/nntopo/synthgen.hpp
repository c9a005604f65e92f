#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "nntopo/activation_store.hpp"

namespace nntopo {

enum class Scenario {
  identical_chain,    // every layer an exact copy of layer 0
  gaussian_clusters,  // fixed cluster assignment, fresh within-cluster noise per layer
  random_walk,        // each layer = previous layer + independent noise
  permuted_copy,      // each layer = previous layer with its features permuted
};

std::optional<Scenario> parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);

struct SynthSpec {
  std::size_t samples = 100;
  std::size_t features = 8;
  std::size_t layers = 4;
  std::uint64_t seed = 0;
  Scenario scenario = Scenario::identical_chain;
  std::size_t clusters = 2;      // gaussian_clusters only
  double cluster_sigma = 1.0;    // gaussian_clusters only
  double walk_step = 0.3;        // random_walk only: noise std per layer
};

/// Portable random stream: mt19937_64 seeded through splitmix64 so that
/// (seed, stream) pairs give independent, platform-stable sequences.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Pairwise distance between cluster centers; at least 20 sigma and grown
/// with sqrt(d) so within-cluster spread never reaches another cluster.
double cluster_separation(const SynthSpec& spec);

/// Cluster of sample i under gaussian_clusters.
inline std::size_t cluster_of(std::size_t i, const SynthSpec& spec) {
  return i % spec.clusters;
}

/// Deterministic function of spec. Layers are named "L0", "L1", ...
ActivationChain generate(const SynthSpec& spec);

}  // namespace nntopo
