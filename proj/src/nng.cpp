#include "nntopo/nng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "nntopo/error.hpp"
#include "nntopo/parallel.hpp"
#include "nntopo/report.hpp"

namespace nntopo {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("squared_distance: length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  constexpr std::size_t lanes = 8;
  std::array<double, lanes> acc{};
  const std::size_t d = a.size();
  const std::size_t body = d - d % lanes;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t t = 0; t < body; t += lanes) {
    for (std::size_t l = 0; l < lanes; ++l) {
      const double diff = pa[t + l] - pb[t + l];
      acc[l] += diff * diff;
    }
  }
  for (std::size_t t = body; t < d; ++t) {
    const double diff = pa[t] - pb[t];
    acc[t - body] += diff * diff;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

NeighbourGraph::NeighbourGraph(std::size_t samples, std::size_t k,
                               std::vector<SampleIndex> flat)
    : samples_(samples), k_(k), flat_(std::move(flat)) {
  if (samples_ < 2) throw ValidationError("neighbour graph needs n >= 2");
  if (k_ < 1 || k_ > samples_ - 1) {
    throw ValidationError("k = " + std::to_string(k_) +
                          " violates 1 <= k <= n-1 with n = " +
                          std::to_string(samples_));
  }
  if (flat_.size() != samples_ * k_) {
    throw ValidationError("neighbour graph storage has " +
                          std::to_string(flat_.size()) + " entries, expected " +
                          std::to_string(samples_ * k_));
  }
  std::vector<SampleIndex> sorted(k_);
  for (std::size_t i = 0; i < samples_; ++i) {
    const auto list = neighbours(i);
    sorted.assign(list.begin(), list.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.back() >= samples_) {
      throw ValidationError("neighbour index out of range in list " +
                            std::to_string(i));
    }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("duplicate neighbour in list " + std::to_string(i));
    }
    if (std::binary_search(sorted.begin(), sorted.end(),
                           static_cast<SampleIndex>(i))) {
      throw ValidationError("self-loop in list " + std::to_string(i));
    }
  }
}

NeighbourGraph NeighbourGraph::prefix(std::size_t k) const {
  if (k < 1 || k > k_) {
    throw ValidationError("prefix k = " + std::to_string(k) +
                          " outside [1, " + std::to_string(k_) + "]");
  }
  if (k == k_) return *this;
  std::vector<SampleIndex> out;
  out.reserve(samples_ * k);
  for (std::size_t i = 0; i < samples_; ++i) {
    const auto list = neighbours(i).first(k);
    out.insert(out.end(), list.begin(), list.end());
  }
  return NeighbourGraph(samples_, k, std::move(out));
}

namespace {

struct Candidate {
  double dist;
  SampleIndex index;

  bool operator<(const Candidate& o) const noexcept {
    return dist < o.dist || (dist == o.dist && index < o.index);
  }
};

}  // namespace

NeighbourGraph build_knn_graph(const Matrix& points, std::size_t k,
                               const KnnOptions& options) {
  const std::size_t n = points.rows();
  if (n < 2) throw ValidationError("k-NN graph needs at least 2 samples");
  if (k < 1 || k > n - 1) {
    throw ValidationError("k = " + std::to_string(k) +
                          " violates 1 <= k <= n-1 with n = " +
                          std::to_string(n));
  }
  if (n > std::numeric_limits<SampleIndex>::max()) {
    throw ValidationError("too many samples for 32-bit sample indices");
  }

  const std::size_t block = std::max<std::size_t>(1, options.query_block);
  const std::size_t tile = std::max<std::size_t>(1, options.candidate_tile);
  const std::size_t blocks = (n + block - 1) / block;
  std::vector<SampleIndex> flat(n * k);

  parallel_for(blocks, options.threads, [&](std::size_t b) {
    const std::size_t q0 = b * block;
    const std::size_t q1 = std::min(n, q0 + block);
    const std::size_t rows = q1 - q0;
    std::vector<double> dist(rows * n);

    // Candidate tiles stay cache-resident while every query in the block
    // visits them.
    for (std::size_t c0 = 0; c0 < n; c0 += tile) {
      const std::size_t c1 = std::min(n, c0 + tile);
      for (std::size_t q = q0; q < q1; ++q) {
        const auto query = points.row(q);
        double* out = dist.data() + (q - q0) * n;
        for (std::size_t c = c0; c < c1; ++c) {
          out[c] = squared_distance(query, points.row(c));
        }
      }
    }

    std::vector<Candidate> pool;
    pool.reserve(n - 1);
    for (std::size_t q = q0; q < q1; ++q) {
      const double* row = dist.data() + (q - q0) * n;
      pool.clear();
      for (std::size_t c = 0; c < n; ++c) {
        if (c != q) pool.push_back({row[c], static_cast<SampleIndex>(c)});
      }
      const auto kth = pool.begin() + static_cast<std::ptrdiff_t>(k);
      if (kth != pool.end()) std::nth_element(pool.begin(), kth, pool.end());
      std::sort(pool.begin(), kth);
      SampleIndex* dst = flat.data() + q * k;
      for (std::size_t r = 0; r < k; ++r) dst[r] = pool[r].index;
    }
  });

  return NeighbourGraph(n, k, std::move(flat));
}

NeighbourGraph build_knn_graph(const LayerActivations& layer, std::size_t k,
                               const KnnOptions& options) {
  try {
    return build_knn_graph(layer.data, k, options);
  } catch (const ValidationError& e) {
    throw ValidationError("layer '" + layer.name + "': " + e.what());
  }
}

UndirectedEdgeSet::UndirectedEdgeSet(std::size_t samples,
                                     std::vector<SamplePair> edges)
    : samples_(samples), edges_(std::move(edges)) {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& p = edges_[e];
    if (p.i >= p.j || p.j >= samples_) {
      throw ValidationError("edge (" + std::to_string(p.i) + ", " +
                            std::to_string(p.j) + ") is not canonical within n = " +
                            std::to_string(samples_));
    }
    if (e > 0 && !(edges_[e - 1] < p)) {
      throw ValidationError("edge set is not strictly sorted");
    }
  }
}

bool UndirectedEdgeSet::contains(SamplePair p) const {
  if (p.i > p.j) std::swap(p.i, p.j);
  return std::binary_search(edges_.begin(), edges_.end(), p);
}

UndirectedEdgeSet to_undirected(const NeighbourGraph& graph) {
  std::vector<SamplePair> edges;
  edges.reserve(graph.samples() * graph.k());
  for (std::size_t i = 0; i < graph.samples(); ++i) {
    const auto self = static_cast<SampleIndex>(i);
    for (const SampleIndex j : graph.neighbours(i)) {
      edges.push_back(self < j ? SamplePair{self, j} : SamplePair{j, self});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return UndirectedEdgeSet(graph.samples(), std::move(edges));
}

void write_graph_csv(std::ostream& out, const NeighbourGraph& graph,
                     const Matrix& points) {
  if (points.rows() != graph.samples()) {
    throw ValidationError("graph dump: points and graph disagree on n");
  }
  out << "sample_index,rank,neighbour_index,distance\n";
  for (std::size_t i = 0; i < graph.samples(); ++i) {
    const auto list = graph.neighbours(i);
    for (std::size_t r = 0; r < list.size(); ++r) {
      const double d = std::sqrt(squared_distance(points.row(i), points.row(list[r])));
      out << i << ',' << r << ',' << list[r] << ',' << format_decimal(d) << '\n';
    }
  }
}

}  // namespace nntopo
