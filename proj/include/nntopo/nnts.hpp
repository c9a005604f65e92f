#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nntopo/nng.hpp"

namespace nntopo {

/// L x L similarity matrix between layer graphs built with one shared k.
struct NntsMatrix {
  std::size_t k = 0;
  std::vector<std::string> layer_names;
  std::vector<double> values;  // row-major L x L

  std::size_t layers() const noexcept { return layer_names.size(); }
  double operator()(std::size_t a, std::size_t b) const {
    return values[a * layers() + b];
  }
};

/// Intersection over union of two neighbour lists, ignoring order.
/// Lists must be non-empty and duplicate-free.
double nnts_sample(std::span<const SampleIndex> a, std::span<const SampleIndex> b);

/// Mean per-sample IoU between two graphs over the same samples.
double nnts_pair(const NeighbourGraph& a, const NeighbourGraph& b);

/// Every layer pair, computed for a <= b and mirrored. The diagonal is 1.
/// `names` may be empty, in which case layers are labelled by position.
NntsMatrix nnts_matrix(std::span<const NeighbourGraph> graphs,
                       std::vector<std::string> names = {},
                       std::size_t threads = 0);

}  // namespace nntopo
