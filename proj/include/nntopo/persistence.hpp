#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nntopo/nng.hpp"

namespace nntopo {

/// Read-only view of a per-layer presence bit vector. Bit v lives in
/// word v / 64 at position v % 64.
class MaskView {
 public:
  MaskView() = default;
  MaskView(std::span<const std::uint64_t> words, std::size_t layers)
      : words_(words), layers_(layers) {}

  std::size_t layers() const noexcept { return layers_; }
  bool test(std::size_t v) const noexcept {
    return (words_[v / 64] >> (v % 64)) & 1u;
  }
  bool any() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

 private:
  std::span<const std::uint64_t> words_;
  std::size_t layers_ = 0;
};

inline std::size_t mask_words(std::size_t layers) noexcept {
  return (layers + 63) / 64;
}

/// Owning presence bit vector.
class LayerMask {
 public:
  explicit LayerMask(std::size_t layers)
      : words_(mask_words(layers), 0), layers_(layers) {}

  /// "10100" sets bits 0 and 2: character v is layer v.
  static LayerMask from_string(std::string_view bits);

  std::size_t layers() const noexcept { return layers_; }
  void set(std::size_t v) { words_[v / 64] |= std::uint64_t{1} << (v % 64); }
  bool test(std::size_t v) const noexcept { return view().test(v); }
  MaskView view() const noexcept { return {words_, layers_}; }
  std::string to_string() const;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t layers_;
};

/// An undirected sample pair and the layers in which it is an edge.
struct EdgePresence {
  SamplePair pair;
  MaskView mask;
};

/// Every pair present in at least one layer, sorted by pair, with masks
/// stored contiguously. Built one layer at a time so only the current
/// layer's edge set needs to be alive.
class PresenceTable {
 public:
  PresenceTable(std::size_t samples, std::size_t layers);

  /// Merges the edges of layer `v`. Layers may be added in any order but
  /// each at most once.
  void add_layer(std::size_t v, const UndirectedEdgeSet& edges);

  std::size_t samples() const noexcept { return samples_; }
  std::size_t layers() const noexcept { return layers_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  EdgePresence operator[](std::size_t e) const noexcept {
    return {pairs_[e], MaskView({masks_.data() + e * words_, words_}, layers_)};
  }
  /// Edge count of each layer as merged.
  std::span<const std::size_t> layer_edge_counts() const noexcept {
    return layer_edges_;
  }

 private:
  std::size_t samples_;
  std::size_t layers_;
  std::size_t words_;
  std::vector<SamplePair> pairs_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::size_t> layer_edges_;
  std::vector<bool> added_;
};

PresenceTable collect_presence(std::span<const UndirectedEdgeSet> edge_sets);

/// A maximal interval [start, end] of consecutive layers holding the edge.
struct PersistenceRun {
  SamplePair pair;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const PersistenceRun&) const = default;
};

/// Maximal runs of set bits, in increasing layer order.
std::vector<PersistenceRun> maximal_runs(const EdgePresence& p);

/// True iff bits a and b are set and no gap of clear bits inside [a, b] is
/// longer than alpha. Gaps are never allowed to touch the endpoints, so for
/// alpha > 0 an interval still has to begin and end on a present layer.
bool is_alpha_persistent(const EdgePresence& p, std::size_t a, std::size_t b,
                         std::size_t alpha);

/// Upper-triangular counts of maximal 0-persistent runs keyed by
/// (start, end). A reappearing edge contributes one run per appearance.
struct PersistenceMatrix {
  std::vector<std::string> layer_names;
  std::vector<std::uint64_t> counts;  // row-major L x L, zero below diagonal

  std::size_t layers() const noexcept { return layer_names.size(); }
  std::uint64_t operator()(std::size_t a, std::size_t b) const {
    return counts[a * layers() + b];
  }
  /// Sum of count * run length; equals the total per-layer edge count.
  std::uint64_t run_length_total() const;
};

PersistenceMatrix persistence_matrix(const PresenceTable& presences,
                                     std::vector<std::string> names = {},
                                     std::size_t threads = 0);

/// Throws InvariantError unless the matrix conserves the table's per-layer
/// edge counts and each layer's count lies in [ceil(nk/2), nk].
void check_conservation(const PersistenceMatrix& matrix, const PresenceTable& table,
                        std::size_t k);

}  // namespace nntopo
