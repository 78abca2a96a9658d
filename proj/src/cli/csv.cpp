#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "exactls/errors.hpp"

namespace exactls::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string strip_quotes(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::string where(std::string_view source, std::size_t line) {
  std::ostringstream s;
  s << source << ":" << line;
  return s.str();
}

}  // namespace

std::size_t Dataset::index(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return j;
  }
  throw UsageError("unknown column '" + std::string(name) + "'");
}

std::span<const double> Dataset::column(std::string_view name) const { return columns[index(name)]; }

Dataset parse_csv(std::istream& in, std::string_view source) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw DataError(std::string(source) + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  for (auto cell : split_line(line)) {
    std::string name = strip_quotes(cell);
    if (name.empty()) throw DataError(where(source, line_no) + ": empty column name");
    for (const auto& existing : data.names) {
      if (existing == name) throw DataError(where(source, line_no) + ": duplicate column '" + name + "'");
    }
    data.names.push_back(std::move(name));
  }
  data.columns.resize(data.names.size());

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != data.names.size()) {
      std::ostringstream msg;
      msg << where(source, line_no) << ": expected " << data.names.size() << " cells, found " << cells.size();
      throw DataError(msg.str());
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto cell = cells[j];
      if (cell.empty()) {
        throw DataError(where(source, line_no) + ": missing value in column '" + data.names[j] + "'");
      }
      double v = 0.0;
      const char* end = cell.data() + cell.size();
      const auto res = std::from_chars(cell.data(), end, v, std::chars_format::general);
      if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw DataError(where(source, line_no) + ": non-numeric value '" + std::string(cell) + "' in column '" +
                        data.names[j] + "'");
      }
      data.columns[j].push_back(v);
    }
    ++data.rows;
  }
  if (data.rows < 2) throw DataError(std::string(source) + ": at least two data rows are required");
  return data;
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (item.empty()) throw UsageError("empty item in list '" + std::string(text) + "'");
    out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Vector term_column(const Dataset& data, std::string_view term) {
  if (term == "_const") return Vector(data.rows, 1.0);
  const auto factors = split_list(term, '*');
  if (factors.empty()) throw UsageError("empty term");
  const auto first = data.column(factors[0]);
  Vector col(first.begin(), first.end());
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const auto f = data.column(factors[k]);
    for (std::size_t i = 0; i < col.size(); ++i) col[i] *= f[i];
  }
  return col;
}

RegressorSet regressors_for(const Dataset& data, const std::vector<std::string>& terms) {
  RegressorSet set(data.rows);
  for (const auto& t : terms) {
    if (!set.contains(t)) set.add(t, term_column(data, t));
  }
  return set;
}

void write_csv(std::ostream& out, const std::vector<std::string>& names, const std::vector<Vector>& columns) {
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << "\n";
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j][i];
    out << "\n";
  }
}

}  // namespace exactls::cli
