#include "nntopo/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "nntopo/error.hpp"

namespace nntopo {

std::optional<Scenario> parse_scenario(std::string_view name) {
  if (name == "identical-chain") return Scenario::identical_chain;
  if (name == "gaussian-clusters") return Scenario::gaussian_clusters;
  if (name == "random-walk") return Scenario::random_walk;
  if (name == "permuted-copy") return Scenario::permuted_copy;
  return std::nullopt;
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::identical_chain: return "identical-chain";
    case Scenario::gaussian_clusters: return "gaussian-clusters";
    case Scenario::random_walk: return "random-walk";
    case Scenario::permuted_copy: return "permuted-copy";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return x % bound;
  }
}

double cluster_separation(const SynthSpec& spec) {
  return 20.0 * spec.cluster_sigma *
         std::max(1.0, std::sqrt(static_cast<double>(spec.features)));
}

namespace {

void validate(const SynthSpec& spec) {
  if (spec.samples < 2) throw ValidationError("synth: n must be at least 2");
  if (spec.features < 1) throw ValidationError("synth: d must be at least 1");
  if (spec.layers < 1) throw ValidationError("synth: L must be at least 1");
  if (spec.scenario == Scenario::gaussian_clusters) {
    if (spec.clusters < 1 || spec.clusters > spec.samples) {
      throw ValidationError("synth: cluster count must be in [1, n]");
    }
    if (!(spec.cluster_sigma > 0.0) || !std::isfinite(spec.cluster_sigma)) {
      throw ValidationError("synth: cluster sigma must be positive");
    }
  }
  if (spec.scenario == Scenario::random_walk &&
      (!(spec.walk_step >= 0.0) || !std::isfinite(spec.walk_step))) {
    throw ValidationError("synth: walk step must be non-negative");
  }
}

Matrix gaussian(std::size_t rows, std::size_t cols, RandomStream& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.normal();
  return m;
}

// Center c sits on axis c % d at distance sep * (1 + c / d) from the origin,
// so any two centers are at least sep apart.
Matrix cluster_centers(const SynthSpec& spec) {
  const double sep = cluster_separation(spec);
  Matrix centers(spec.clusters, spec.features);
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    centers(c, c % spec.features) =
        sep * (1.0 + static_cast<double>(c / spec.features));
  }
  return centers;
}

}  // namespace

ActivationChain generate(const SynthSpec& spec) {
  validate(spec);
  const std::size_t n = spec.samples;
  const std::size_t d = spec.features;

  std::vector<Matrix> data;
  data.reserve(spec.layers);
  switch (spec.scenario) {
    case Scenario::identical_chain: {
      RandomStream rng(spec.seed, 0);
      data.push_back(gaussian(n, d, rng));
      for (std::size_t v = 1; v < spec.layers; ++v) data.push_back(data.front());
      break;
    }
    case Scenario::gaussian_clusters: {
      const Matrix centers = cluster_centers(spec);
      for (std::size_t v = 0; v < spec.layers; ++v) {
        RandomStream rng(spec.seed, v);
        Matrix m(n, d);
        for (std::size_t i = 0; i < n; ++i) {
          const auto center = centers.row(cluster_of(i, spec));
          auto row = m.row(i);
          for (std::size_t t = 0; t < d; ++t) {
            row[t] = center[t] + spec.cluster_sigma * rng.normal();
          }
        }
        data.push_back(std::move(m));
      }
      break;
    }
    case Scenario::random_walk: {
      RandomStream base(spec.seed, 0);
      data.push_back(gaussian(n, d, base));
      for (std::size_t v = 1; v < spec.layers; ++v) {
        RandomStream rng(spec.seed, v);
        Matrix m = data.back();
        for (double& x : m.data()) x += spec.walk_step * rng.normal();
        data.push_back(std::move(m));
      }
      break;
    }
    case Scenario::permuted_copy: {
      RandomStream base(spec.seed, 0);
      data.push_back(gaussian(n, d, base));
      for (std::size_t v = 1; v < spec.layers; ++v) {
        RandomStream rng(spec.seed, v);
        std::vector<std::size_t> perm(d);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t t = d; t > 1; --t) {
          std::swap(perm[t - 1], perm[rng.below(t)]);
        }
        const Matrix& prev = data.back();
        Matrix m(n, d);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t t = 0; t < d; ++t) m(i, t) = prev(i, perm[t]);
        }
        data.push_back(std::move(m));
      }
      break;
    }
  }

  std::vector<LayerActivations> layers;
  layers.reserve(spec.layers);
  for (std::size_t v = 0; v < spec.layers; ++v) {
    layers.push_back({v, "L" + std::to_string(v), std::move(data[v])});
  }
  return ActivationChain(std::move(layers));
}

}  // namespace nntopo
