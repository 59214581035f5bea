#include "selinf/bootstrap.hpp"

#include "selinf/error.hpp"
#include "selinf/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>

namespace selinf {

WildBootstrapResult wild_bootstrap(const Eigen::MatrixXd& residuals,
                                   std::span<const int> cluster_ids, int replicates,
                                   std::uint64_t seed) {
  const Eigen::Index n = residuals.rows();
  const Eigen::Index m = residuals.cols();
  if (replicates < 2) throw Error(ErrorCode::domain, "wild_bootstrap: need at least 2 replicates");
  if (n < 1 || m < 1) throw Error(ErrorCode::domain, "wild_bootstrap: empty residual matrix");
  if (static_cast<Eigen::Index>(cluster_ids.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch, "wild_bootstrap: one cluster id per row required");
  }

  // Dense cluster index in order of first appearance.
  std::map<int, int> dense;
  std::vector<int> cluster(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, inserted] = dense.try_emplace(cluster_ids[i], static_cast<int>(dense.size()));
    cluster[i] = it->second;
  }
  const int groups = static_cast<int>(dense.size());

  WildBootstrapResult out{Eigen::MatrixXd(replicates, m), Eigen::MatrixXd(replicates, m)};
  std::vector<double> weight(groups);
  Eigen::MatrixXd cluster_sums(groups, m);
  for (int b = 0; b < replicates; ++b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), 0x5eedu};
    std::mt19937_64 engine(seq);
    for (int g = 0; g < groups; ++g) weight[g] = (engine() >> 63) ? 1.0 : -1.0;

    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(m);
    for (Eigen::Index i = 0; i < n; ++i) mean += weight[cluster[i]] * residuals.row(i);
    mean /= static_cast<double>(n);

    cluster_sums.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      cluster_sums.row(cluster[i]) += weight[cluster[i]] * residuals.row(i) - mean;
    }
    out.estimates.row(b) = mean;
    out.std_errors.row(b) =
        (cluster_sums.array().square().colwise().sum().sqrt() / static_cast<double>(n)).matrix();
  }
  return out;
}

Eigen::MatrixXd wild_bootstrap_draws(const Eigen::MatrixXd& residuals,
                                     std::span<const int> cluster_ids, int replicates,
                                     std::uint64_t seed) {
  const WildBootstrapResult r = wild_bootstrap(residuals, cluster_ids, replicates, seed);
  const Eigen::RowVectorXd scale =
      residuals.cwiseAbs().colwise().mean();
  Eigen::MatrixXd t(r.estimates.rows(), r.estimates.cols());
  for (Eigen::Index b = 0; b < t.rows(); ++b) {
    for (Eigen::Index k = 0; k < t.cols(); ++k) {
      const double se = r.std_errors(b, k);
      if (!(se > 1e-12 * scale[k]) || se == 0.0) {
        throw Error(ErrorCode::degenerate,
                    "wild_bootstrap_draws: replicate standard error vanishes (replicate " +
                        std::to_string(b) + ", column " + std::to_string(k) + ")");
      }
      t(b, k) = r.estimates(b, k) / se;
    }
  }
  return t;
}

Eigen::MatrixXd read_draws_csv(const std::filesystem::path& path) { return read_matrix_csv(path); }

void write_draws_csv(const std::filesystem::path& path, const Eigen::MatrixXd& draws) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  write_matrix_csv(out, draws);
  if (!out) throw Error(ErrorCode::io, "failed writing " + path.string());
}

}  // namespace selinf
