#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>

namespace selinf {

struct WildBootstrapResult {
  Eigen::MatrixXd estimates;   // B x m
  Eigen::MatrixXd std_errors;  // B x m, cluster-robust
};

/// Cluster wild bootstrap with Rademacher weights. Replicate b draws one
/// weight per cluster from a generator keyed by (seed, b), so replicates are
/// independent of evaluation order. The replicate estimate of column k is
/// the mean of the weighted residuals; its standard error is the CR0
/// cluster-robust standard error of that mean.
WildBootstrapResult wild_bootstrap(const Eigen::MatrixXd& residuals,
                                   std::span<const int> cluster_ids, int replicates,
                                   std::uint64_t seed);

/// Bootstrapped t-statistics (estimate / standard error), B x m.
/// Throws Error(degenerate) when any replicate standard error vanishes.
Eigen::MatrixXd wild_bootstrap_draws(const Eigen::MatrixXd& residuals,
                                     std::span<const int> cluster_ids, int replicates,
                                     std::uint64_t seed);

/// Headerless CSV, one replicate per row.
Eigen::MatrixXd read_draws_csv(const std::filesystem::path& path);
void write_draws_csv(const std::filesystem::path& path, const Eigen::MatrixXd& draws);

}  // namespace selinf
