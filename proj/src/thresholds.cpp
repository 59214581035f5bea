#include "selinf/thresholds.hpp"

#include "selinf/error.hpp"
#include "selinf/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace selinf {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::bonferroni: return "bonferroni";
    case Family::sidak: return "sidak";
    case Family::holm: return "holm";
    case Family::sidak_holm: return "sidak_holm";
    case Family::fdp: return "fdp";
    case Family::bh: return "bh";
    case Family::by: return "by";
    case Family::bootstrap: return "bootstrap";
    case Family::fixed: return "fixed";
  }
  return "unknown";
}

std::string_view to_string(Sidedness s) { return s == Sidedness::one ? "one" : "two"; }

std::string_view to_string(Procedure p) {
  return p == Procedure::step_down ? "step_down" : "step_up";
}

namespace {

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::domain, "threshold level must lie in (0, 1)");
  }
}

void require_m(int m) {
  if (m < 1) throw Error(ErrorCode::domain, "threshold family needs m >= 1");
}

}  // namespace

ThresholdSpec::ThresholdSpec(Family family, Procedure procedure, Sidedness sided, int m,
                             double level)
    : family_(family), procedure_(procedure), sided_(sided), m_(m), level_(level) {}

double ThresholdSpec::checked(double value) const {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::domain, "threshold function produced a non-positive or infinite value");
  }
  return value;
}

// alpha_j for the size-based families, before halving for two-sided tests.
double ThresholdSpec::tail_level(int step) const {
  const double m = m_;
  const double j = step;
  const double b = level_;
  switch (family_) {
    case Family::bonferroni: return b / m;
    case Family::sidak: return -std::expm1(std::log1p(-b) / m);
    case Family::holm: return b / (m + 1.0 - j);
    case Family::sidak_holm: return -std::expm1(std::log1p(-b) / (m + 1.0 - j));
    case Family::fdp: {
      const double k = std::floor(gamma_ * j);
      return (k + 1.0) * b / (m + k + 1.0 - j);
    }
    case Family::bh: return (m - j + 1.0) * b / m;
    case Family::by: {
      double harmonic = 0.0;
      for (int i = 1; i <= m_; ++i) harmonic += 1.0 / i;
      return (m - j + 1.0) * b / (m * harmonic);
    }
    case Family::bootstrap:
    case Family::fixed: break;
  }
  throw Error(ErrorCode::domain, "tail_level: family has no closed-form level");
}

ThresholdSpec ThresholdSpec::size_based(Family family, Procedure procedure, int m,
                                        double level, double gamma, Sidedness sided) {
  require_m(m);
  require_level(level);
  ThresholdSpec spec(family, procedure, sided, m, level);
  spec.gamma_ = gamma;
  spec.by_size_.resize(m);
  for (int size = 1; size <= m; ++size) {
    double a = spec.tail_level(m - size + 1);
    if (sided == Sidedness::two) a *= 0.5;
    // Phi^{-1}(1 - a) = -Phi^{-1}(a) keeps precision for small a.
    spec.by_size_[size - 1] = spec.checked(-normal_quantile(a));
  }
  return spec;
}

ThresholdSpec ThresholdSpec::bonferroni(int m, double level, Sidedness sided) {
  return size_based(Family::bonferroni, Procedure::step_down, m, level, 0.0, sided);
}

ThresholdSpec ThresholdSpec::sidak(int m, double level, Sidedness sided) {
  return size_based(Family::sidak, Procedure::step_down, m, level, 0.0, sided);
}

ThresholdSpec ThresholdSpec::holm(int m, double level, Sidedness sided) {
  return size_based(Family::holm, Procedure::step_down, m, level, 0.0, sided);
}

ThresholdSpec ThresholdSpec::sidak_holm(int m, double level, Sidedness sided) {
  return size_based(Family::sidak_holm, Procedure::step_down, m, level, 0.0, sided);
}

ThresholdSpec ThresholdSpec::fdp(int m, double level, double gamma, Sidedness sided) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::domain, "fdp: gamma must lie in [0, 1)");
  }
  return size_based(Family::fdp, Procedure::step_down, m, level, gamma, sided);
}

ThresholdSpec ThresholdSpec::bh(int m, double level, Sidedness sided) {
  return size_based(Family::bh, Procedure::step_up, m, level, 0.0, sided);
}

ThresholdSpec ThresholdSpec::by(int m, double level, Sidedness sided) {
  return size_based(Family::by, Procedure::step_up, m, level, 0.0, sided);
}

ThresholdSpec ThresholdSpec::from_family(Family family, int m, double level, Sidedness sided,
                                         double gamma) {
  switch (family) {
    case Family::bonferroni: return bonferroni(m, level, sided);
    case Family::sidak: return sidak(m, level, sided);
    case Family::holm: return holm(m, level, sided);
    case Family::sidak_holm: return sidak_holm(m, level, sided);
    case Family::fdp: return fdp(m, level, gamma, sided);
    case Family::bh: return bh(m, level, sided);
    case Family::by: return by(m, level, sided);
    case Family::bootstrap:
    case Family::fixed: break;
  }
  throw Error(ErrorCode::domain, "from_family: family needs draws or a table");
}

ThresholdSpec ThresholdSpec::bootstrap(Eigen::MatrixXd draws, double level, Sidedness sided) {
  require_level(level);
  if (draws.rows() < 2 || draws.cols() < 1) {
    throw Error(ErrorCode::domain, "bootstrap: need at least 2 replicates and 1 column");
  }
  if (!draws.allFinite()) throw Error(ErrorCode::domain, "bootstrap: draws must be finite");
  ThresholdSpec spec(Family::bootstrap, Procedure::step_down, sided,
                     static_cast<int>(draws.cols()), level);
  spec.draws_ = sided == Sidedness::two ? Eigen::MatrixXd(draws.cwiseAbs()) : std::move(draws);
  return spec;
}

ThresholdSpec ThresholdSpec::fixed(std::vector<double> table, Procedure procedure,
                                   Sidedness sided) {
  const int m = static_cast<int>(table.size());
  require_m(m);
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (!(table[k] > 0.0) || !std::isfinite(table[k])) {
      throw Error(ErrorCode::domain, "fixed: thresholds must be positive and finite");
    }
    if (k > 0 && table[k] < table[k - 1]) {
      throw Error(ErrorCode::domain, "fixed: thresholds must be nondecreasing");
    }
  }
  ThresholdSpec spec(Family::fixed, procedure, sided, m, std::numeric_limits<double>::quiet_NaN());
  spec.by_size_.resize(m);
  for (int size = 1; size <= m; ++size) {
    spec.by_size_[size - 1] =
        procedure == Procedure::step_down ? table[size - 1] : table[m - size];
  }
  spec.table_ = std::move(table);
  return spec;
}

double ThresholdSpec::value_for_size(int size) const {
  if (!depends_only_on_size()) {
    throw Error(ErrorCode::domain, "value_for_size: bootstrap thresholds depend on the subset");
  }
  if (size < 1 || size > m_) throw Error(ErrorCode::domain, "value_for_size: size out of range");
  return by_size_[size - 1];
}

double ThresholdSpec::step_up_value(int j) const {
  if (j < 1 || j > m_) throw Error(ErrorCode::domain, "step_up_value: index out of range");
  return value_for_size(m_ - j + 1);
}

double ThresholdSpec::value(std::span<const int> subset) const {
  if (subset.empty()) throw Error(ErrorCode::domain, "threshold of the empty set is undefined");
  for (int h : subset) {
    if (h < 0 || h >= m_) throw Error(ErrorCode::domain, "threshold: index out of range");
  }
  if (depends_only_on_size()) return value_for_size(static_cast<int>(subset.size()));
  return suffix_values(subset).front();
}

std::vector<double> ThresholdSpec::suffix_values(std::span<const int> sequence) const {
  const int n = static_cast<int>(sequence.size());
  std::vector<double> out(n);
  if (depends_only_on_size()) {
    for (int j = 0; j < n; ++j) out[j] = value_for_size(n - j);
    return out;
  }
  const Eigen::Index rows = draws_.rows();
  const double target = (1.0 - level_) * static_cast<double>(rows);
  const Eigen::Index rank =
      std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(target - 1e-9)), 1, rows);
  std::vector<double> running(rows, -std::numeric_limits<double>::infinity());
  std::vector<double> scratch(rows);
  for (int j = n - 1; j >= 0; --j) {
    const int col = sequence[j];
    if (col < 0 || col >= m_) throw Error(ErrorCode::domain, "threshold: index out of range");
    for (Eigen::Index b = 0; b < rows; ++b) running[b] = std::max(running[b], draws_(b, col));
    scratch = running;
    std::nth_element(scratch.begin(), scratch.begin() + (rank - 1), scratch.end());
    out[j] = checked(scratch[rank - 1]);
  }
  return out;
}

}  // namespace selinf
