#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nntopo::npy {

enum class DType { f4, f8 };

/// A decoded array: shape plus values widened to double, C order.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> values;
  DType stored_as = DType::f8;
};

struct Header {
  DType dtype = DType::f8;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

// Parses the python-literal dict of a v1.0 header, e.g.
// "{'descr': '<f8', 'fortran_order': False, 'shape': (3, 4), }".
// Throws ValidationError on unsupported dtype or Fortran order.
Header parse_header(const std::string& dict);

Array decode(std::span<const unsigned char> bytes, const std::string& origin);
std::vector<unsigned char> encode(std::span<const std::size_t> shape,
                                  std::span<const double> values);

Array read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, std::span<const std::size_t> shape,
           std::span<const double> values);

}  // namespace nntopo::npy
