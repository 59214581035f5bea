#include "selinf/io.hpp"

#include "selinf/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

namespace selinf {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_failure(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::parse, source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, const std::string& source, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    parse_failure(source, line, "invalid number '" + std::string(field) + "'");
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return in;
}

}  // namespace

Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (std::string_view field : split(line)) row.push_back(parse_number(field, source, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      parse_failure(source, line_no,
                    "expected " + std::to_string(rows.front().size()) + " columns, found " +
                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::parse, source + ": no data rows");
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  }
  return out;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_matrix_csv(in, path.string());
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

std::vector<double> read_vector_csv(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.rows() != 1 && m.cols() != 1) {
    throw Error(ErrorCode::parse, path.string() + ": expected a single row or column");
  }
  return std::vector<double>(m.data(), m.data() + m.size());
}

EffectEstimates load_estimates(const std::filesystem::path& estimates_path) {
  std::ifstream in = open_input(estimates_path);
  const std::string source = estimates_path.string();
  std::string line;
  std::size_t line_no = 0;
  EffectEstimates e;
  std::vector<double> values;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "id" || fields[1] != "estimate") {
        parse_failure(source, line_no, "expected header 'id,estimate'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2) parse_failure(source, line_no, "expected 2 fields");
    if (fields[0].empty()) parse_failure(source, line_no, "empty id");
    e.labels.emplace_back(fields[0]);
    values.push_back(parse_number(fields[1], source, line_no));
  }
  if (!header_seen) parse_failure(source, line_no, "missing header 'id,estimate'");
  if (values.empty()) throw Error(ErrorCode::parse, source + ": no effects");
  e.theta_hat = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  e.cov = Eigen::MatrixXd::Identity(e.m(), e.m());
  return e;
}

EffectEstimates load_estimates(const std::filesystem::path& estimates_path,
                               const std::filesystem::path& cov_path) {
  EffectEstimates e = load_estimates(estimates_path);
  e.cov = read_matrix_csv(cov_path);
  e.validate();
  return e;
}

}  // namespace selinf
