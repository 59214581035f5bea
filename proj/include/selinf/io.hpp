#pragma once

#include "selinf/inference.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace selinf {

/// Headerless dense CSV. Throws Error(parse) with the offending line number.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& source);

/// Writes with round-trip precision, LF line endings.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

/// One number per line (or a single comma-separated row).
std::vector<double> read_vector_csv(const std::filesystem::path& path);

/// Estimates CSV with header `id,estimate` plus a headerless m x m covariance
/// CSV in the same row order. Validates EffectEstimates invariants.
EffectEstimates load_estimates(const std::filesystem::path& estimates_path,
                               const std::filesystem::path& cov_path);

/// Estimates only; the covariance defaults to the identity, so estimates are
/// read as t-statistics.
EffectEstimates load_estimates(const std::filesystem::path& estimates_path);

}  // namespace selinf
