#include "selinf/simulation.hpp"

#include "selinf/error.hpp"
#include "selinf/inference.hpp"
#include "selinf/normal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace selinf {

std::string_view to_string(Design d) { return d == Design::normal ? "normal" : "chisq"; }

void DesignConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::validation, msg); };
  const int k = m();
  if (k < 1) fail("design: theta must have at least one entry");
  if (n < 2) fail("design: n must be at least 2");
  if (reps < 0) fail("design: reps must be positive");
  const double rho_min = k > 1 ? -1.0 / (k - 1) : -1.0;
  if (!(rho > rho_min && rho < 1.0)) fail("design: rho must lie in (-1/(m-1), 1)");
  if (design == Design::chisq && rho < 0.0) {
    fail("design: the chi-squared design needs rho >= 0 (latent correlation sqrt(rho))");
  }
  if (!(beta > 0.0 && beta < 1.0)) fail("design: beta must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("design: alpha must lie in (0, 1)");
  if (family == Family::bootstrap || family == Family::fixed) {
    fail("design: the selection family must have closed-form thresholds");
  }
  if (target < 0 || target >= k) fail("design: target effect out of range");
  for (double t : theta) {
    if (!std::isfinite(t)) fail("design: theta must be finite");
  }
}

namespace {

struct Context {
  const DesignConfig& cfg;
  Eigen::MatrixXd chol;  // lower Cholesky factor of the latent correlation
  ThresholdSpec spec;
  double bonf_z;
  double naive_z;

  explicit Context(const DesignConfig& c)
      : cfg(c), spec(ThresholdSpec::from_family(c.family, c.m(), c.beta, c.sided)) {
    const int m = c.m();
    const double r = c.design == Design::normal ? c.rho : std::sqrt(c.rho);
    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(m, m, r);
    corr.diagonal().setOnes();
    chol = corr.llt().matrixL();
    naive_z = -normal_quantile(0.5 * c.alpha);
    bonf_z = -normal_quantile(0.5 * c.alpha / m);
  }

  Eigen::MatrixXd draw(std::uint64_t index) const {
    const int m = cfg.m();
    const int n = cfg.n;
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), 0x51u};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal;

    Eigen::MatrixXd y(n, m);
    Eigen::VectorXd w(m);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < m; ++k) w[k] = normal(engine);
      const Eigen::VectorXd u = chol * w;
      for (int k = 0; k < m; ++k) {
        const double base = cfg.design == Design::normal ? u[k] : (u[k] * u[k] - 1.0) / std::sqrt(2.0);
        y(i, k) = base + cfg.theta[k];
      }
    }
    return y;
  }

  ReplicationRecord run(std::uint64_t index) const {
    const int n = cfg.n;
    const Eigen::MatrixXd y = draw(index);
    const Eigen::RowVectorXd mean = y.colwise().mean();
    const Eigen::MatrixXd centered = y.rowwise() - mean;
    EffectEstimates e;
    e.theta_hat = mean.transpose();
    e.cov = (centered.transpose() * centered) / (static_cast<double>(n - 1) * n);

    ReplicationRecord rec;
    const Studentized st = studentize(e);
    const SelectionOutcome sel = select(st.x, spec);
    if (!sel.contains(cfg.target)) return rec;
    rec.selected = true;

    const int s = cfg.target;
    const double truth = cfg.theta[s];
    const double sd = st.sd[s];
    const double est = e.theta_hat[s];
    rec.naive_bias = est - truth;
    rec.naive_length = 2.0 * sd * naive_z;
    rec.naive_covered = std::abs(est - truth) <= sd * naive_z;
    rec.bonf_length = 2.0 * sd * bonf_z;
    rec.bonf_covered = std::abs(est - truth) <= sd * bonf_z;

    const SelectionEvent event = cfg.event == EventKind::superset
                                     ? SelectionEvent::superset({s})
                                     : SelectionEvent::equal(sel.significant_set());
    ConditionalInference ci;
    try {
      ci = infer_effect(e, st, s, spec, event, cfg.alpha);
    } catch (const Error&) {
      ci.status = InferenceStatus::degenerate;
    }
    if (ci.status == InferenceStatus::degenerate) {
      rec.failed = true;
      return rec;
    }
    rec.cond_bias = ci.estimate_ub - truth;
    rec.cond_length = ci.ci_hi - ci.ci_lo;
    rec.cond_covered = ci.ci_lo <= truth && truth <= ci.ci_hi;
    return rec;
  }
};

std::optional<double> fraction(int hits, int total) {
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / total;
}

std::optional<double> median_or_none(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  return lower_median(std::move(v));
}

}  // namespace

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::validation, "median of an empty sample");
  const std::size_t k = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + k, values.end());
  return values[k];
}

Eigen::MatrixXd draw_sample(const DesignConfig& cfg, std::uint64_t index) {
  cfg.validate();
  return Context(cfg).draw(index);
}

ReplicationRecord simulate_replication(const DesignConfig& cfg, std::uint64_t index) {
  cfg.validate();
  return Context(cfg).run(index);
}

SimulationSummary summarize(std::span<const ReplicationRecord> records) {
  if (records.empty()) throw Error(ErrorCode::validation, "summarize: no replications");
  SimulationSummary out;
  out.reps = static_cast<int>(records.size());
  int cond_hits = 0, naive_hits = 0, bonf_hits = 0;
  std::vector<double> cond_len, naive_len, bonf_len, cond_bias, naive_bias;
  for (const ReplicationRecord& r : records) {
    if (!r.selected) continue;
    ++out.reps_selected;
    naive_hits += r.naive_covered;
    bonf_hits += r.bonf_covered;
    naive_len.push_back(r.naive_length);
    bonf_len.push_back(r.bonf_length);
    naive_bias.push_back(r.naive_bias);
    if (r.failed) {
      ++out.reps_failed;
      continue;
    }
    cond_hits += r.cond_covered;
    cond_len.push_back(r.cond_length);
    cond_bias.push_back(r.cond_bias);
  }
  out.sel_prob = static_cast<double>(out.reps_selected) / out.reps;
  out.cond_coverage = fraction(cond_hits, out.reps_selected - out.reps_failed);
  out.naive_coverage = fraction(naive_hits, out.reps_selected);
  out.bonf_coverage = fraction(bonf_hits, out.reps_selected);
  out.cond_median_length = median_or_none(std::move(cond_len));
  out.naive_median_length = median_or_none(std::move(naive_len));
  out.bonf_median_length = median_or_none(std::move(bonf_len));
  out.cond_median_bias = median_or_none(std::move(cond_bias));
  out.naive_median_bias = median_or_none(std::move(naive_bias));
  return out;
}

std::vector<ReplicationRecord> simulate_records(const DesignConfig& cfg) {
  cfg.validate();
  const Context ctx(cfg);
  const int reps = cfg.resolved_reps();
  std::vector<ReplicationRecord> records(reps);
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, reps);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int i = next++; i < reps && !failed; i = next++) {
      try {
        records[i] = ctx.run(static_cast<std::uint64_t>(i));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

SimulationSummary simulate_design(const DesignConfig& cfg) {
  const std::vector<ReplicationRecord> records = simulate_records(cfg);
  return summarize(records);
}

}  // namespace selinf
