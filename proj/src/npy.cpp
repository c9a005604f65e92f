#include "nntopo/npy.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>

#include "nntopo/error.hpp"

namespace nntopo::npy {

static_assert(std::endian::native == std::endian::little,
              "NPY codec assumes a little-endian host");

namespace {

constexpr unsigned char kMagic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kPreludeSize = 10;  // magic + version + u16 length

// Minimal cursor over the header dict literal.
class DictParser {
 public:
  explicit DictParser(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string string_literal() {
    skip_ws();
    if (pos_ >= text_.size() || (text_[pos_] != '\'' && text_[pos_] != '"')) {
      fail("expected string literal");
    }
    const char quote = text_[pos_++];
    const auto end = text_.find(quote, pos_);
    if (end == std::string::npos) fail("unterminated string literal");
    std::string s = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return s;
  }

  bool boolean() {
    skip_ws();
    if (text_.compare(pos_, 4, "True") == 0) {
      pos_ += 4;
      return true;
    }
    if (text_.compare(pos_, 5, "False") == 0) {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }

  std::vector<std::size_t> tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (!consume(')')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      if (start == pos_) fail("expected integer in shape");
      dims.push_back(std::stoull(text_.substr(start, pos_ - start)));
      if (!consume(',')) {
        expect(')');
        break;
      }
    }
    return dims;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("malformed NPY header (" + msg + " at offset " +
                          std::to_string(pos_) + "): " + text_);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

std::size_t element_count(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_literal(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  return s + ")";
}

}  // namespace

Header parse_header(const std::string& dict) {
  DictParser p(dict);
  Header h;
  bool seen_descr = false, seen_order = false, seen_shape = false;
  p.expect('{');
  while (!p.consume('}')) {
    const std::string key = p.string_literal();
    p.expect(':');
    if (key == "descr") {
      const std::string descr = p.string_literal();
      if (descr == "<f8") {
        h.dtype = DType::f8;
      } else if (descr == "<f4") {
        h.dtype = DType::f4;
      } else {
        throw ValidationError("unsupported NPY dtype '" + descr +
                              "' (accepted: <f4, <f8)");
      }
      seen_descr = true;
    } else if (key == "fortran_order") {
      h.fortran_order = p.boolean();
      seen_order = true;
    } else if (key == "shape") {
      h.shape = p.tuple();
      seen_shape = true;
    } else {
      p.fail("unexpected key '" + key + "'");
    }
    if (!p.consume(',')) {
      p.expect('}');
      break;
    }
  }
  if (!seen_descr || !seen_order || !seen_shape) {
    p.fail("missing one of descr/fortran_order/shape");
  }
  if (h.fortran_order) {
    throw ValidationError("Fortran-order NPY arrays are not supported");
  }
  return h;
}

Array decode(std::span<const unsigned char> bytes, const std::string& origin) {
  if (bytes.size() < kPreludeSize ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw ValidationError(origin + ": not an NPY file (bad magic)");
  }
  if (bytes[6] != 1 || bytes[7] != 0) {
    throw ValidationError(origin + ": unsupported NPY version " +
                          std::to_string(bytes[6]) + "." +
                          std::to_string(bytes[7]) + " (expected 1.0)");
  }
  const std::size_t header_len =
      static_cast<std::size_t>(bytes[8]) |
      (static_cast<std::size_t>(bytes[9]) << 8);
  if (bytes.size() < kPreludeSize + header_len) {
    throw ValidationError(origin + ": truncated NPY header");
  }
  const std::string dict(reinterpret_cast<const char*>(bytes.data()) + kPreludeSize,
                         header_len);
  Header h;
  try {
    h = parse_header(dict);
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }

  const std::size_t count = element_count(h.shape);
  const std::size_t width = h.dtype == DType::f8 ? 8 : 4;
  const auto payload = bytes.subspan(kPreludeSize + header_len);
  if (payload.size() != count * width) {
    throw ValidationError(origin + ": payload has " +
                          std::to_string(payload.size()) + " bytes, shape " +
                          shape_literal(h.shape) + " needs " +
                          std::to_string(count * width));
  }

  Array out;
  out.shape = h.shape;
  out.stored_as = h.dtype;
  out.values.resize(count);
  if (h.dtype == DType::f8) {
    std::memcpy(out.values.data(), payload.data(), payload.size());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, payload.data() + i * 4, 4);
      out.values[i] = static_cast<double>(f);
    }
  }
  return out;
}

std::vector<unsigned char> encode(std::span<const std::size_t> shape,
                                  std::span<const double> values) {
  if (element_count(shape) != values.size()) {
    throw ValidationError("NPY encode: shape " + shape_literal(shape) +
                          " does not match " + std::to_string(values.size()) +
                          " values");
  }
  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': " +
                     shape_literal(shape) + ", }";
  // Pad with spaces so the data section starts on a 64-byte boundary.
  const std::size_t unpadded = kPreludeSize + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict.push_back('\n');
  if (dict.size() > 0xFFFF) {
    throw ValidationError("NPY encode: header too large for v1.0");
  }

  std::vector<unsigned char> out;
  out.reserve(kPreludeSize + dict.size() + values.size() * 8);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<unsigned char>(dict.size() & 0xFF));
  out.push_back(static_cast<unsigned char>(dict.size() >> 8));
  out.insert(out.end(), dict.begin(), dict.end());
  const auto* raw = reinterpret_cast<const unsigned char*>(values.data());
  out.insert(out.end(), raw, raw + values.size() * 8);
  return out;
}

Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open NPY file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading NPY file " + path.string());
  return decode(bytes, path.string());
}

void write(const std::filesystem::path& path, std::span<const std::size_t> shape,
           std::span<const double> values) {
  const auto bytes = encode(shape, values);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create NPY file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing NPY file " + path.string());
}

}  // namespace nntopo::npy
