#pragma once

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace selinf {

enum class Family { bonferroni, sidak, holm, sidak_holm, fdp, bh, by, bootstrap, fixed };
enum class Sidedness { one, two };
enum class Procedure { step_down, step_up };

std::string_view to_string(Family f);
std::string_view to_string(Sidedness s);
std::string_view to_string(Procedure p);

/// Threshold function xbar(A) mapping a nonempty hypothesis subset to a
/// critical value.
///
/// Step-down families are subset-monotone: A c B implies xbar(A) <= xbar(B).
/// Cardinality-based families use the step index j = m - |A| + 1 and
/// xbar = Phi^{-1}(1 - alpha_j), with alpha_j halved for two-sided tests.
/// Step-up families (bh, by, ascending fixed tables) expose the increasing
/// sequence xbar_1 <= ... <= xbar_m through step_up_value(); a subset A maps
/// to xbar_{m - |A| + 1}, the threshold met when A is the untested remainder.
/// The bootstrap family is the empirical (1 - level) quantile of the per-row
/// maximum over A of the (absolute, for two-sided tests) bootstrap draws.
class ThresholdSpec {
 public:
  static ThresholdSpec bonferroni(int m, double level, Sidedness sided);
  static ThresholdSpec sidak(int m, double level, Sidedness sided);
  static ThresholdSpec holm(int m, double level, Sidedness sided);
  static ThresholdSpec sidak_holm(int m, double level, Sidedness sided);
  static ThresholdSpec fdp(int m, double level, double gamma, Sidedness sided);
  static ThresholdSpec bh(int m, double level, Sidedness sided);
  static ThresholdSpec by(int m, double level, Sidedness sided);
  /// `draws` is B x m with B >= 2.
  static ThresholdSpec bootstrap(Eigen::MatrixXd draws, double level, Sidedness sided);
  /// `table[k-1]` is the critical value for |A| = k (step-down) or xbar_k
  /// (step-up). Values must be positive and monotone accordingly.
  static ThresholdSpec fixed(std::vector<double> table, Procedure procedure,
                             Sidedness sided);
  /// Any closed-form family; `gamma` is used by fdp only.
  static ThresholdSpec from_family(Family family, int m, double level, Sidedness sided,
                                   double gamma = 0.0);

  Family family() const { return family_; }
  Procedure procedure() const { return procedure_; }
  Sidedness sidedness() const { return sided_; }
  bool two_sided() const { return sided_ == Sidedness::two; }
  int m() const { return m_; }
  double level() const { return level_; }
  double gamma() const { return gamma_; }
  bool depends_only_on_size() const { return family_ != Family::bootstrap; }
  const Eigen::MatrixXd& draws() const { return draws_; }
  const std::vector<double>& table() const { return table_; }

  /// xbar(A). Throws Error(domain) for an empty subset or out-of-range index.
  double value(std::span<const int> subset) const;

  /// xbar(A) for any A with |A| = size. Only for size-based families.
  double value_for_size(int size) const;

  /// xbar_j, 1-based step index; defined for every size-based family.
  double step_up_value(int j) const;

  /// out[j] = xbar({sequence[j], ..., sequence.back()}) for every j.
  std::vector<double> suffix_values(std::span<const int> sequence) const;

 private:
  ThresholdSpec(Family family, Procedure procedure, Sidedness sided, int m, double level);
  static ThresholdSpec size_based(Family family, Procedure procedure, int m, double level,
                                  double gamma, Sidedness sided);
  double checked(double value) const;
  double tail_level(int step) const;

  Family family_;
  Procedure procedure_;
  Sidedness sided_;
  int m_;
  double level_;
  double gamma_ = 0.0;
  std::vector<double> by_size_;  // cached xbar for |A| = 1..m
  std::vector<double> table_;
  Eigen::MatrixXd draws_;        // transformed (absolute values if two-sided)
};

}  // namespace selinf
