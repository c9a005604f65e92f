#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nntopo/activation_store.hpp"
#include "nntopo/matrix.hpp"

namespace nntopo {

using SampleIndex = std::uint32_t;

/// Sum of squared coordinate differences. The accumulation order is fixed
/// (eight interleaved partial sums, combined pairwise) so every caller sees
/// bit-identical values for the same pair, in either argument order.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Directed k-nearest-neighbour graph of one layer. Each list holds k
/// distinct indices other than the owner, nearest first, ties broken by
/// lower index.
class NeighbourGraph {
 public:
  NeighbourGraph() = default;
  /// `flat` holds n*k indices, row i at [i*k, (i+1)*k). Throws
  /// ValidationError if any structural invariant is violated.
  NeighbourGraph(std::size_t samples, std::size_t k, std::vector<SampleIndex> flat);

  std::size_t samples() const noexcept { return samples_; }
  std::size_t k() const noexcept { return k_; }

  std::span<const SampleIndex> neighbours(std::size_t i) const noexcept {
    return {flat_.data() + i * k_, k_};
  }
  std::span<const SampleIndex> flat() const noexcept { return flat_; }

  /// The graph for a smaller k: the first `k` entries of every list.
  NeighbourGraph prefix(std::size_t k) const;

  bool operator==(const NeighbourGraph&) const = default;

 private:
  std::size_t samples_ = 0;
  std::size_t k_ = 0;
  std::vector<SampleIndex> flat_;
};

struct KnnOptions {
  std::size_t threads = 0;      // 0: hardware concurrency
  std::size_t query_block = 16; // query rows sharing one pass over candidates
  std::size_t candidate_tile = 256;
};

/// Exact brute-force search. Output is independent of thread count and
/// blocking. Throws ValidationError unless 1 <= k <= n-1.
NeighbourGraph build_knn_graph(const Matrix& points, std::size_t k,
                               const KnnOptions& options = {});
NeighbourGraph build_knn_graph(const LayerActivations& layer, std::size_t k,
                               const KnnOptions& options = {});

struct SamplePair {
  SampleIndex i = 0;
  SampleIndex j = 0;  // i < j

  auto operator<=>(const SamplePair&) const = default;
};

/// Undirected edges of one layer: {i, j} is present iff j in K_i or i in K_j.
/// Stored once per pair with i < j, sorted ascending.
class UndirectedEdgeSet {
 public:
  UndirectedEdgeSet() = default;
  UndirectedEdgeSet(std::size_t samples, std::vector<SamplePair> edges);

  std::size_t samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return edges_.size(); }
  std::span<const SamplePair> edges() const noexcept { return edges_; }
  bool contains(SamplePair p) const;

 private:
  std::size_t samples_ = 0;
  std::vector<SamplePair> edges_;
};

UndirectedEdgeSet to_undirected(const NeighbourGraph& graph);

/// Debug dump: `sample_index,rank,neighbour_index,distance` with the
/// Euclidean distance, one row per directed edge.
void write_graph_csv(std::ostream& out, const NeighbourGraph& graph,
                     const Matrix& points);

}  // namespace nntopo
