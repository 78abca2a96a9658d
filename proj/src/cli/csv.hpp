#pragma once

// CSV ingestion and interaction-term resolution for the command line.
//
// Files need a header row; every other cell must be a finite decimal number.
// Anything else is rejected rather than coerced.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exactls/projection.hpp"

namespace exactls::cli {

struct Dataset {
  std::vector<std::string> names;
  std::vector<Vector> columns;
  std::size_t rows = 0;

  /// Throws UsageError for unknown names.
  std::size_t index(std::string_view name) const;
  std::span<const double> column(std::string_view name) const;
};

Dataset parse_csv(std::istream& in, std::string_view source);
Dataset read_csv_file(const std::string& path);

/// Comma separated list with surrounding blanks removed; empty input gives {}.
std::vector<std::string> split_list(std::string_view text, char sep = ',');

/// Column for "_const", "a" or a product "a*b*b".
Vector term_column(const Dataset& data, std::string_view term);

/// RegressorSet holding every listed term, keyed by the term text.
RegressorSet regressors_for(const Dataset& data, const std::vector<std::string>& terms);

void write_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<Vector>& columns);

}  // namespace exactls::cli
