#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hfsync::csv {

/// Splits one CSV line on commas. No quoting support; identifiers in this
/// project never contain commas.
std::vector<std::string> split(std::string_view line);

double parse_double(const std::string& token, const std::string& path, std::size_t line);
long long parse_int(const std::string& token, const std::string& path, std::size_t line);

/// Plain numeric matrix, one row per line, no header.
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::string& path);

/// Reads all lines of a text file (trailing CR stripped). Throws IoError.
std::vector<std::string> read_lines(const std::string& path);

/// Writes text atomically enough for our purposes (truncate + write).
void write_text(const std::string& path, const std::string& text);

}  // namespace hfsync::csv
