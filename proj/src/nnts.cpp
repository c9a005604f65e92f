#include "nntopo/nnts.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "nntopo/error.hpp"
#include "nntopo/parallel.hpp"

namespace nntopo {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

std::size_t sorted_overlap(std::span<const SampleIndex> a,
                           std::span<const SampleIndex> b) noexcept {
  std::size_t m = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++m;
      ++ia;
      ++ib;
    }
  }
  return m;
}

// Each neighbour list sorted by index, so IoU reduces to a merge count.
std::vector<SampleIndex> sorted_lists(const NeighbourGraph& g) {
  std::vector<SampleIndex> out(g.flat().begin(), g.flat().end());
  const std::size_t k = g.k();
  for (std::size_t i = 0; i < g.samples(); ++i) {
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(i * k),
              out.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
  }
  return out;
}

double mean_iou(std::span<const SampleIndex> a, std::span<const SampleIndex> b,
                std::size_t samples, std::size_t k) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto m = sorted_overlap(a.subspan(i * k, k), b.subspan(i * k, k));
    sum.add(static_cast<double>(m) / static_cast<double>(2 * k - m));
  }
  return sum.value() / static_cast<double>(samples);
}

void check_compatible(const NeighbourGraph& a, const NeighbourGraph& b) {
  if (a.samples() != b.samples()) {
    throw ValidationError("NNTS: sample-count mismatch (" +
                          std::to_string(a.samples()) + " vs " +
                          std::to_string(b.samples()) + ")");
  }
  if (a.k() != b.k()) {
    throw ValidationError("NNTS: graphs use different k (" +
                          std::to_string(a.k()) + " vs " +
                          std::to_string(b.k()) + ")");
  }
}

}  // namespace

double nnts_sample(std::span<const SampleIndex> a, std::span<const SampleIndex> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("nnts_sample: neighbour lists must be non-empty");
  }
  std::vector<SampleIndex> sa(a.begin(), a.end());
  std::vector<SampleIndex> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (std::adjacent_find(sa.begin(), sa.end()) != sa.end() ||
      std::adjacent_find(sb.begin(), sb.end()) != sb.end()) {
    throw ValidationError("nnts_sample: neighbour lists must be duplicate-free");
  }
  const std::size_t m = sorted_overlap(sa, sb);
  return static_cast<double>(m) / static_cast<double>(sa.size() + sb.size() - m);
}

double nnts_pair(const NeighbourGraph& a, const NeighbourGraph& b) {
  check_compatible(a, b);
  if (a == b) return 1.0;
  const auto sa = sorted_lists(a);
  const auto sb = sorted_lists(b);
  return mean_iou(sa, sb, a.samples(), a.k());
}

NntsMatrix nnts_matrix(std::span<const NeighbourGraph> graphs,
                       std::vector<std::string> names, std::size_t threads) {
  if (graphs.empty()) throw ValidationError("NNTS matrix needs at least one layer");
  const std::size_t layers = graphs.size();
  for (std::size_t v = 1; v < layers; ++v) check_compatible(graphs[0], graphs[v]);
  if (names.empty()) {
    for (std::size_t v = 0; v < layers; ++v) names.push_back(std::to_string(v));
  }
  if (names.size() != layers) {
    throw ValidationError("NNTS matrix: " + std::to_string(names.size()) +
                          " names for " + std::to_string(layers) + " layers");
  }

  const std::size_t n = graphs[0].samples();
  const std::size_t k = graphs[0].k();
  std::vector<std::vector<SampleIndex>> sorted(layers);
  parallel_for(layers, threads, [&](std::size_t v) { sorted[v] = sorted_lists(graphs[v]); });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < layers; ++a) {
    for (std::size_t b = a + 1; b < layers; ++b) pairs.emplace_back(a, b);
  }

  NntsMatrix out;
  out.k = k;
  out.layer_names = std::move(names);
  out.values.assign(layers * layers, 1.0);
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    const double q = mean_iou(sorted[a], sorted[b], n, k);
    out.values[a * layers + b] = q;
    out.values[b * layers + a] = q;
  });
  return out;
}

}  // namespace nntopo
