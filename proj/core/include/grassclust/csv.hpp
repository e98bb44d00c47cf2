#pragma once

// Series and matrix CSV: a header row of column names, then one row per
// time sample, '.' decimal separator.

#include "grassclust/karma.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace grassclust {

struct NamedSeries {
  TimeSeriesMatrix series;
  std::vector<std::string> column_names;
};

/// Throws InputError with the offending line on ragged rows or unparsable cells.
NamedSeries read_series_csv(std::istream& in);
NamedSeries read_series_csv(const std::string& path);

/// Column names default to 0 .. q-1. Values use round-trip precision.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& column_names = {});
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& values,
                      const std::vector<std::string>& column_names = {});

}  // namespace grassclust
