#include "nntopo/persistence.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>

#include "nntopo/error.hpp"
#include "nntopo/parallel.hpp"

namespace nntopo {

bool MaskView::any() const noexcept {
  return std::any_of(words_.begin(), words_.end(),
                     [](std::uint64_t w) { return w != 0; });
}

LayerMask LayerMask::from_string(std::string_view bits) {
  LayerMask mask(bits.size());
  for (std::size_t v = 0; v < bits.size(); ++v) {
    if (bits[v] == '1') {
      mask.set(v);
    } else if (bits[v] != '0') {
      throw ValidationError("mask literal may only contain 0 and 1: " +
                            std::string(bits));
    }
  }
  return mask;
}

std::string LayerMask::to_string() const {
  std::string s(layers_, '0');
  for (std::size_t v = 0; v < layers_; ++v) {
    if (test(v)) s[v] = '1';
  }
  return s;
}

PresenceTable::PresenceTable(std::size_t samples, std::size_t layers)
    : samples_(samples),
      layers_(layers),
      words_(mask_words(layers)),
      layer_edges_(layers, 0),
      added_(layers, false) {
  if (layers_ == 0) throw ValidationError("presence table needs at least one layer");
}

void PresenceTable::add_layer(std::size_t v, const UndirectedEdgeSet& edges) {
  if (v >= layers_) {
    throw ValidationError("layer " + std::to_string(v) + " outside chain of " +
                          std::to_string(layers_));
  }
  if (added_[v]) throw ValidationError("layer " + std::to_string(v) + " added twice");
  if (edges.samples() != samples_) {
    throw ValidationError("inconsistent n across layers: layer " +
                          std::to_string(v) + " has " +
                          std::to_string(edges.samples()) + " samples, expected " +
                          std::to_string(samples_));
  }

  const auto incoming = edges.edges();
  const std::uint64_t bit = std::uint64_t{1} << (v % 64);
  const std::size_t word = v / 64;

  std::vector<SamplePair> pairs;
  std::vector<std::uint64_t> masks;
  pairs.reserve(pairs_.size() + incoming.size());
  masks.reserve((pairs_.size() + incoming.size()) * words_);

  std::size_t old = 0;
  std::size_t add = 0;
  auto copy_old = [&] {
    pairs.push_back(pairs_[old]);
    const auto* src = masks_.data() + old * words_;
    masks.insert(masks.end(), src, src + words_);
    ++old;
  };
  auto fresh = [&] {
    pairs.push_back(incoming[add]);
    masks.resize(masks.size() + words_, 0);
    ++add;
  };
  while (old < pairs_.size() || add < incoming.size()) {
    if (add == incoming.size() ||
        (old < pairs_.size() && pairs_[old] < incoming[add])) {
      copy_old();
      continue;
    }
    if (old < pairs_.size() && pairs_[old] == incoming[add]) {
      copy_old();
      ++add;
    } else {
      fresh();
    }
    masks[masks.size() - words_ + word] |= bit;
  }

  pairs_ = std::move(pairs);
  masks_ = std::move(masks);
  layer_edges_[v] = incoming.size();
  added_[v] = true;
}

PresenceTable collect_presence(std::span<const UndirectedEdgeSet> edge_sets) {
  if (edge_sets.empty()) throw ValidationError("no edge sets to collect");
  PresenceTable table(edge_sets[0].samples(), edge_sets.size());
  for (std::size_t v = 0; v < edge_sets.size(); ++v) {
    table.add_layer(v, edge_sets[v]);
  }
  return table;
}

std::vector<PersistenceRun> maximal_runs(const EdgePresence& p) {
  std::vector<PersistenceRun> runs;
  const std::size_t layers = p.mask.layers();
  std::size_t v = 0;
  while (v < layers) {
    if (!p.mask.test(v)) {
      ++v;
      continue;
    }
    const std::size_t start = v;
    while (v + 1 < layers && p.mask.test(v + 1)) ++v;
    runs.push_back({p.pair, start, v});
    ++v;
  }
  return runs;
}

bool is_alpha_persistent(const EdgePresence& p, std::size_t a, std::size_t b,
                         std::size_t alpha) {
  const std::size_t layers = p.mask.layers();
  if (a > b) {
    throw ValidationError("alpha-persistence query with start " +
                          std::to_string(a) + " after end " + std::to_string(b));
  }
  if (b >= layers) {
    throw ValidationError("alpha-persistence query end " + std::to_string(b) +
                          " outside chain of " + std::to_string(layers));
  }
  if (!p.mask.test(a) || !p.mask.test(b)) return false;
  std::size_t gap = 0;
  for (std::size_t v = a; v <= b; ++v) {
    if (p.mask.test(v)) {
      gap = 0;
    } else if (++gap > alpha) {
      return false;
    }
  }
  return true;
}

std::uint64_t PersistenceMatrix::run_length_total() const {
  std::uint64_t total = 0;
  const std::size_t l = layers();
  for (std::size_t a = 0; a < l; ++a) {
    for (std::size_t b = a; b < l; ++b) total += counts[a * l + b] * (b - a + 1);
  }
  return total;
}

namespace {

// Adds the runs encoded in one mask word sequence. Bits are scanned with
// countr_zero / countr_one instead of one layer at a time.
void accumulate_runs(MaskView mask, std::vector<std::uint64_t>& counts) {
  const std::size_t layers = mask.layers();
  std::size_t v = 0;
  while (v < layers) {
    // Skip clear bits.
    while (v < layers && !mask.test(v)) {
      const std::uint64_t rest = mask.words()[v / 64] >> (v % 64);
      v += rest == 0 ? 64 - v % 64 : static_cast<std::size_t>(std::countr_zero(rest));
    }
    if (v >= layers) break;
    const std::size_t start = v;
    while (v < layers && mask.test(v)) {
      const std::uint64_t rest = mask.words()[v / 64] >> (v % 64);
      v += static_cast<std::size_t>(std::countr_one(rest));
    }
    const std::size_t end = std::min(v, layers) - 1;
    ++counts[start * layers + end];
  }
}

}  // namespace

PersistenceMatrix persistence_matrix(const PresenceTable& presences,
                                     std::vector<std::string> names,
                                     std::size_t threads) {
  const std::size_t layers = presences.layers();
  if (names.empty()) {
    for (std::size_t v = 0; v < layers; ++v) names.push_back(std::to_string(v));
  }
  if (names.size() != layers) {
    throw ValidationError("persistence matrix: " + std::to_string(names.size()) +
                          " names for " + std::to_string(layers) + " layers");
  }

  // Disjoint slices of the pair table, summed afterwards; integer sums make
  // the result independent of scheduling.
  const std::size_t slice = 1 << 16;
  const std::size_t slices = (presences.size() + slice - 1) / slice;
  std::vector<std::vector<std::uint64_t>> partial(
      slices, std::vector<std::uint64_t>(layers * layers, 0));
  parallel_for(slices, threads, [&](std::size_t s) {
    const std::size_t e1 = std::min(presences.size(), (s + 1) * slice);
    for (std::size_t e = s * slice; e < e1; ++e) {
      accumulate_runs(presences[e].mask, partial[s]);
    }
  });

  PersistenceMatrix out;
  out.layer_names = std::move(names);
  out.counts.assign(layers * layers, 0);
  for (const auto& part : partial) {
    for (std::size_t c = 0; c < part.size(); ++c) out.counts[c] += part[c];
  }
  return out;
}

void check_conservation(const PersistenceMatrix& matrix, const PresenceTable& table,
                        std::size_t k) {
  const std::size_t layers = matrix.layers();
  if (layers != table.layers()) {
    throw InvariantError("persistence matrix and presence table disagree on L");
  }
  for (std::size_t a = 0; a < layers; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (matrix(a, b) != 0) {
        throw InvariantError("persistence count below the diagonal at (" +
                             std::to_string(a) + ", " + std::to_string(b) + ")");
      }
    }
  }
  const std::uint64_t nk = static_cast<std::uint64_t>(table.samples()) * k;
  std::uint64_t edges = 0;
  for (std::size_t v = 0; v < layers; ++v) {
    const std::uint64_t count = table.layer_edge_counts()[v];
    if (count < (nk + 1) / 2 || count > nk) {
      throw InvariantError("layer " + std::to_string(v) + " has " +
                           std::to_string(count) + " undirected edges, outside [" +
                           std::to_string((nk + 1) / 2) + ", " +
                           std::to_string(nk) + "]");
    }
    edges += count;
  }
  const std::uint64_t runs = matrix.run_length_total();
  if (runs != edges) {
    throw InvariantError("run-length conservation violated: runs cover " +
                         std::to_string(runs) + " layer-edges, layers hold " +
                         std::to_string(edges));
  }
}

}  // namespace nntopo
