#include "nntopo/activation_store.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "nntopo/error.hpp"
#include "nntopo/npy.hpp"

namespace nntopo {

void validate_layer(const LayerActivations& layer) {
  const std::string label = "layer '" + layer.name + "'";
  if (layer.samples() < 2) {
    throw ValidationError(label + " has " + std::to_string(layer.samples()) +
                          " samples; at least 2 are required");
  }
  if (layer.features() < 1) {
    throw ValidationError(label + " has no features");
  }
  const auto values = layer.data.data();
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    if (!std::isfinite(values[idx])) {
      throw ValidationError(label + " has a non-finite value at sample " +
                            std::to_string(idx / layer.features()) +
                            ", feature " +
                            std::to_string(idx % layer.features()));
    }
  }
}

ActivationChain::ActivationChain(std::vector<LayerActivations> layers)
    : layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("activation chain has no layers");
  samples_ = layers_.front().samples();
  std::set<std::string> seen;
  for (std::size_t v = 0; v < layers_.size(); ++v) {
    const auto& layer = layers_[v];
    validate_layer(layer);
    if (layer.layer_index != v) {
      throw ValidationError("layer '" + layer.name + "' has index " +
                            std::to_string(layer.layer_index) +
                            " at chain position " + std::to_string(v));
    }
    if (layer.samples() != samples_) {
      throw ValidationError("shape mismatch: layer '" + layer.name + "' has " +
                            std::to_string(layer.samples()) +
                            " samples, layer '" + layers_.front().name +
                            "' has " + std::to_string(samples_));
    }
    if (!seen.insert(layer.name).second) {
      throw ValidationError("duplicate layer name '" + layer.name + "'");
    }
  }
}

std::vector<std::string> ActivationChain::names() const {
  std::vector<std::string> out;
  out.reserve(layers_.size());
  for (const auto& l : layers_) out.push_back(l.name);
  return out;
}

Matrix flatten(std::span<const std::size_t> shape, std::vector<double> values) {
  if (shape.empty()) {
    throw ValidationError("cannot flatten a 0-d array: no sample axis");
  }
  std::size_t features = 1;
  for (std::size_t a = 1; a < shape.size(); ++a) {
    if (shape[a] == 0) {
      throw ValidationError("cannot flatten: trailing axis " +
                            std::to_string(a) + " has size 0");
    }
    features *= shape[a];
  }
  return Matrix(shape[0], features, std::move(values));
}

ActivationChain load_chain(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open manifest " + manifest_path.string());

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("manifest " + manifest_path.string() +
                          " is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    throw ValidationError("manifest " + manifest_path.string() +
                          " lacks a \"layers\" array");
  }

  const auto base = manifest_path.parent_path();
  std::vector<LayerActivations> layers;
  for (const auto& entry : doc["layers"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string() || !entry.contains("file") ||
        !entry["file"].is_string()) {
      throw ValidationError("manifest entry " + std::to_string(layers.size()) +
                            " needs string fields \"name\" and \"file\"");
    }
    const auto file = base / entry["file"].get<std::string>();
    if (!std::filesystem::exists(file)) {
      throw IoError("missing tensor file " + file.string());
    }
    auto array = npy::read(file);
    LayerActivations layer;
    layer.layer_index = layers.size();
    layer.name = entry["name"].get<std::string>();
    try {
      layer.data = flatten(array.shape, std::move(array.values));
    } catch (const ValidationError& e) {
      throw ValidationError(file.string() + ": " + e.what());
    }
    layers.push_back(std::move(layer));
  }
  return ActivationChain(std::move(layers));
}

namespace {

std::string file_stem_for(const LayerActivations& layer) {
  std::string safe;
  for (char c : layer.name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    safe.push_back(ok ? c : '_');
  }
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%03zu_", layer.layer_index);
  return prefix + safe;
}

}  // namespace

std::filesystem::path write_chain(const ActivationChain& chain,
                                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  nlohmann::json doc;
  doc["layers"] = nlohmann::json::array();
  for (const auto& layer : chain) {
    const std::string file = file_stem_for(layer) + ".npy";
    const std::size_t shape[] = {layer.samples(), layer.features()};
    npy::write(dir / file, shape, layer.data.data());
    doc["layers"].push_back({{"name", layer.name}, {"file", file}});
  }
  const auto manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw IoError("cannot create manifest " + manifest.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("error writing manifest " + manifest.string());
  return manifest;
}

}  // namespace nntopo
