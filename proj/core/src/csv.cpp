#include "grassclust/csv.hpp"

#include "grassclust/errors.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace grassclust {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, long line_no, std::size_t column) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(column + 1) +
                     ": cannot parse '" + cell + "' as a number");
  }
  return value;
}

}  // namespace

NamedSeries read_series_csv(std::istream& in) {
  std::string line;
  long line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_row(line);
    break;
  }
  if (header.empty()) throw InputError("series CSV is empty");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], line_no, c);
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw InputError("series CSV needs at least two data rows");

  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return {TimeSeriesMatrix(std::move(data)), std::move(header)};
}

NamedSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_series_csv(in);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& column_names) {
  if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != values.cols()) {
    throw InputError("column name count does not match the matrix");
  }
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    if (c > 0) out << ',';
    if (column_names.empty()) {
      out << c;
    } else {
      out << column_names[static_cast<std::size_t>(c)];
    }
  }
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c > 0) out << ',';
      out << values(r, c);
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& column_names) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_matrix_csv(out, values, column_names);
}

}  // namespace grassclust
