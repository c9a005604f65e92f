#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nntopo/matrix.hpp"

namespace nntopo {

/// One layer's activations: n samples by d features.
struct LayerActivations {
  std::size_t layer_index = 0;
  std::string name;
  Matrix data;

  std::size_t samples() const noexcept { return data.rows(); }
  std::size_t features() const noexcept { return data.cols(); }
};

/// Throws ValidationError unless n >= 2, d >= 1 and every entry is finite.
void validate_layer(const LayerActivations& layer);

/// Ordered causal chain of layers over the same samples. Row i of every
/// layer is the same input sample. Immutable once constructed.
class ActivationChain {
 public:
  /// Validates every layer and the cross-layer invariants: shared n,
  /// contiguous layer_index 0..L-1, unique names.
  explicit ActivationChain(std::vector<LayerActivations> layers);

  std::size_t size() const noexcept { return layers_.size(); }
  std::size_t samples() const noexcept { return samples_; }
  const LayerActivations& operator[](std::size_t v) const { return layers_[v]; }
  std::span<const LayerActivations> layers() const noexcept { return layers_; }
  std::vector<std::string> names() const;

  auto begin() const noexcept { return layers_.begin(); }
  auto end() const noexcept { return layers_.end(); }

 private:
  std::vector<LayerActivations> layers_;
  std::size_t samples_ = 0;
};

/// Collapses all trailing axes of a sample-major tensor into one feature axis.
/// A 1-D shape (n) becomes an n x 1 matrix.
Matrix flatten(std::span<const std::size_t> shape, std::vector<double> values);

/// Reads a manifest JSON {"layers": [{"name", "file"}, ...]} and the NPY
/// files it references (paths relative to the manifest's directory).
ActivationChain load_chain(const std::filesystem::path& manifest_path);

/// Writes one f8 NPY file per layer plus manifest.json into `dir`.
/// Returns the manifest path.
std::filesystem::path write_chain(const ActivationChain& chain,
                                  const std::filesystem::path& dir);

}  // namespace nntopo
