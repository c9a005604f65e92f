#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nntopo/nnts.hpp"
#include "nntopo/persistence.hpp"

namespace nntopo {

/// Six significant digits, '.' separator, independent of the C locale.
std::string format_decimal(double value);

void write_nnts_csv(std::ostream& out, const NntsMatrix& m);
nlohmann::json nnts_json(const NntsMatrix& m);

/// Upper triangle only; cells below the diagonal are left empty. With a
/// scale, cells hold count / scale as decimals instead of raw integers.
void write_persistence_csv(std::ostream& out, const PersistenceMatrix& m,
                           std::optional<double> scale = std::nullopt);
nlohmann::json persistence_json(const PersistenceMatrix& m);

/// Per-run dump `i,j,start,end`, ordered by pair then start.
void write_runs_csv(std::ostream& out, const PresenceTable& table);

/// A matrix read back from one of the CSV reports.
struct CsvMatrix {
  std::vector<std::string> names;
  std::vector<std::optional<double>> cells;  // row-major, empty cell = nullopt

  std::size_t size() const noexcept { return names.size(); }
  const std::optional<double>& at(std::size_t r, std::size_t c) const {
    return cells[r * names.size() + c];
  }
};

/// Throws ValidationError on ragged rows, a non-square matrix, or cells
/// that are neither empty nor a number.
CsvMatrix parse_matrix_csv(std::string_view text);

}  // namespace nntopo
