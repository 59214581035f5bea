#pragma once

#include "selinf/support.hpp"
#include "selinf/thresholds.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace selinf {

enum class Design { normal, chisq };

std::string_view to_string(Design d);

/// Monte Carlo design: n i.i.d. draws of an m-vector with equicorrelated
/// components, t-tests on the sample means, selection, then inference on
/// effect `target` whenever it is significant.
struct DesignConfig {
  Design design = Design::normal;
  int n = 300;
  std::vector<double> theta = {0.05, 0.03, 0.01, 0.0, 0.0};
  double rho = 0.5;
  int reps = 0;  // 0 picks default_reps(n)
  std::uint64_t seed = 1;
  Family family = Family::holm;
  Sidedness sided = Sidedness::two;
  double beta = 0.1;   // FWER / FDR level of the selection rule
  double alpha = 0.1;  // 1 - confidence level
  EventKind event = EventKind::superset;
  int target = 0;
  int threads = 0;  // 0 uses every hardware thread

  int m() const { return static_cast<int>(theta.size()); }
  int resolved_reps() const { return reps > 0 ? reps : default_reps(n); }
  /// Throws Error(validation).
  void validate() const;
  static int default_reps(int n) { return n == 100 ? 20000 : 5000; }
};

/// Outcome of one replication. Interval fields are only meaningful when
/// `selected`; conditional fields additionally need !failed.
struct ReplicationRecord {
  bool selected = false;
  bool failed = false;
  bool cond_covered = false;
  bool naive_covered = false;
  bool bonf_covered = false;
  double cond_length = 0.0;
  double naive_length = 0.0;
  double bonf_length = 0.0;
  double cond_bias = 0.0;   // estimate_ub - theta
  double naive_bias = 0.0;  // theta_hat - theta
};

/// Empty optionals mark statistics over zero selected replications.
struct SimulationSummary {
  int reps = 0;
  int reps_selected = 0;
  int reps_failed = 0;  // selected, but the conditional interval was degenerate
  double sel_prob = 0.0;
  std::optional<double> cond_coverage;
  std::optional<double> naive_coverage;
  std::optional<double> bonf_coverage;
  std::optional<double> cond_median_length;
  std::optional<double> naive_median_length;
  std::optional<double> bonf_median_length;
  std::optional<double> cond_median_bias;
  std::optional<double> naive_median_bias;
};

/// The n x m sample of replication `index`.
Eigen::MatrixXd draw_sample(const DesignConfig& cfg, std::uint64_t index);

/// Replication `index` of the design. The generator is seeded from
/// (cfg.seed, index) only.
ReplicationRecord simulate_replication(const DesignConfig& cfg, std::uint64_t index);

/// Conditional statistics use the non-failed selected records; naive and
/// Bonferroni ones all selected records. Medians are lower medians.
/// Throws Error(validation) on empty input.
SimulationSummary summarize(std::span<const ReplicationRecord> records);

/// Element floor((k - 1) / 2) of the sorted values. Throws on empty input.
double lower_median(std::vector<double> values);

/// Runs all replications on cfg.threads threads; the result does not depend
/// on the thread count.
std::vector<ReplicationRecord> simulate_records(const DesignConfig& cfg);
SimulationSummary simulate_design(const DesignConfig& cfg);

}  // namespace selinf
