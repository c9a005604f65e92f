#include "nntopo/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <system_error>

#include "nntopo/error.hpp"

namespace nntopo {

std::string format_decimal(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 6);
  if (res.ec != std::errc()) throw InvariantError("cannot format decimal");
  return std::string(buf.data(), res.ptr);
}

namespace {

void write_header(std::ostream& out, const std::vector<std::string>& names) {
  for (std::size_t v = 0; v < names.size(); ++v) {
    out << (v ? "," : "") << names[v];
  }
  out << '\n';
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

void write_nnts_csv(std::ostream& out, const NntsMatrix& m) {
  write_header(out, m.layer_names);
  const std::size_t l = m.layers();
  for (std::size_t a = 0; a < l; ++a) {
    for (std::size_t b = 0; b < l; ++b) {
      out << (b ? "," : "") << format_decimal(m(a, b));
    }
    out << '\n';
  }
}

nlohmann::json nnts_json(const NntsMatrix& m) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t a = 0; a < m.layers(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < m.layers(); ++b) row.push_back(m(a, b));
    values.push_back(std::move(row));
  }
  return {{"k", m.k}, {"layer_names", m.layer_names}, {"values", std::move(values)}};
}

void write_persistence_csv(std::ostream& out, const PersistenceMatrix& m,
                           std::optional<double> scale) {
  write_header(out, m.layer_names);
  const std::size_t l = m.layers();
  for (std::size_t a = 0; a < l; ++a) {
    for (std::size_t b = 0; b < l; ++b) {
      if (b) out << ',';
      if (b < a) continue;
      if (scale) {
        out << format_decimal(static_cast<double>(m(a, b)) / *scale);
      } else {
        out << m(a, b);
      }
    }
    out << '\n';
  }
}

nlohmann::json persistence_json(const PersistenceMatrix& m) {
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t a = 0; a < m.layers(); ++a) {
    for (std::size_t b = a; b < m.layers(); ++b) {
      runs.push_back({{"start", a},
                      {"end", b},
                      {"start_name", m.layer_names[a]},
                      {"end_name", m.layer_names[b]},
                      {"count", m(a, b)}});
    }
  }
  return {{"layer_names", m.layer_names},
          {"alpha", 0},
          {"run_length_total", m.run_length_total()},
          {"runs", std::move(runs)}};
}

void write_runs_csv(std::ostream& out, const PresenceTable& table) {
  out << "i,j,start,end\n";
  for (std::size_t e = 0; e < table.size(); ++e) {
    for (const auto& run : maximal_runs(table[e])) {
      out << run.pair.i << ',' << run.pair.j << ',' << run.start << ',' << run.end
          << '\n';
    }
  }
}

CsvMatrix parse_matrix_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!trim(line).empty()) lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty()) throw ValidationError("matrix CSV is empty");

  CsvMatrix m;
  for (const auto& f : split_fields(lines[0])) {
    const auto name = trim(f);
    if (name.empty()) throw ValidationError("matrix CSV header has an empty name");
    m.names.emplace_back(name);
  }
  const std::size_t l = m.names.size();
  if (lines.size() - 1 != l) {
    throw ValidationError("matrix CSV has " + std::to_string(lines.size() - 1) +
                          " rows for " + std::to_string(l) + " columns");
  }
  m.cells.reserve(l * l);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (fields.size() != l) {
      throw ValidationError("matrix CSV row " + std::to_string(r) + " has " +
                            std::to_string(fields.size()) + " cells, expected " +
                            std::to_string(l));
    }
    for (const auto& f : fields) {
      const auto cell = trim(f);
      if (cell.empty()) {
        m.cells.emplace_back(std::nullopt);
        continue;
      }
      double value = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw ValidationError("matrix CSV row " + std::to_string(r) +
                              " has a malformed cell '" + std::string(cell) + "'");
      }
      m.cells.emplace_back(value);
    }
  }
  return m;
}

}  // namespace nntopo
