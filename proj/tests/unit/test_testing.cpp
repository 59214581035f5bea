#include "../oracles.hpp"

#include "selinf/bootstrap.hpp"
#include "selinf/error.hpp"
#include "selinf/normal.hpp"
#include "selinf/selection.hpp"
#include "selinf/thresholds.hpp"

#include <doctest.h>

#include <random>

using namespace selinf;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

std::vector<ThresholdSpec> step_down_families(int m, Sidedness sided, std::mt19937_64& rng) {
  std::vector<ThresholdSpec> out = {
      ThresholdSpec::bonferroni(m, 0.1, sided), ThresholdSpec::sidak(m, 0.1, sided),
      ThresholdSpec::holm(m, 0.1, sided),       ThresholdSpec::sidak_holm(m, 0.1, sided),
      ThresholdSpec::fdp(m, 0.1, 0.3, sided)};
  std::normal_distribution<double> n01;
  Eigen::MatrixXd draws(200, m);
  for (int b = 0; b < 200; ++b) {
    for (int h = 0; h < m; ++h) draws(b, h) = n01(rng) * (1.0 + 0.2 * h);
  }
  out.push_back(ThresholdSpec::bootstrap(draws, 0.1, sided));
  std::vector<double> table(m);
  for (int k = 0; k < m; ++k) table[k] = 1.5 + 0.2 * k;
  out.push_back(ThresholdSpec::fixed(table, Procedure::step_down, sided));
  return out;
}

std::vector<ThresholdSpec> step_up_families(int m, Sidedness sided) {
  std::vector<double> table(m);
  for (int k = 0; k < m; ++k) table[k] = 1.2 + 0.25 * k;
  return {ThresholdSpec::bh(m, 0.1, sided), ThresholdSpec::by(m, 0.1, sided),
          ThresholdSpec::fixed(table, Procedure::step_up, sided)};
}

}  // namespace

TEST_SUITE("thresholds") {
  TEST_CASE("holm examples") {
    const ThresholdSpec h = ThresholdSpec::holm(5, 0.1, Sidedness::two);
    const int all[] = {0, 1, 2, 3, 4};
    const int one[] = {3};
    CHECK(h.value(all) == doctest::Approx(oracle::holm(5, 5, 0.1, true)).epsilon(1e-12));
    CHECK(h.value(all) == doctest::Approx(2.3263).epsilon(1e-4));
    CHECK(h.value(one) == doctest::Approx(1.6449).epsilon(1e-4));
    CHECK(h.value(one) == doctest::Approx(oracle::quantile(0.95)).epsilon(1e-12));
  }

  TEST_CASE("closed-form families against hand formulas") {
    const int m = 6;
    const double b = 0.1;
    for (int size = 1; size <= m; ++size) {
      const int j = m - size + 1;
      const double k = std::floor(0.25 * j);
      CHECK(ThresholdSpec::bonferroni(m, b, Sidedness::one).value_for_size(size) ==
            doctest::Approx(oracle::quantile(1 - b / m)).epsilon(1e-12));
      CHECK(ThresholdSpec::sidak(m, b, Sidedness::two).value_for_size(size) ==
            doctest::Approx(oracle::quantile(1 - (1 - std::pow(1 - b, 1.0 / m)) / 2)).epsilon(1e-10));
      CHECK(ThresholdSpec::sidak_holm(m, b, Sidedness::one).value_for_size(size) ==
            doctest::Approx(oracle::quantile(std::pow(1 - b, 1.0 / (m + 1 - j)))).epsilon(1e-10));
      CHECK(ThresholdSpec::fdp(m, b, 0.25, Sidedness::one).value_for_size(size) ==
            doctest::Approx(oracle::quantile(1 - (k + 1) * b / (m + k + 1 - j))).epsilon(1e-12));
    }
    double cm = 0;
    for (int i = 1; i <= m; ++i) cm += 1.0 / i;
    for (int j = 1; j <= m; ++j) {
      CHECK(ThresholdSpec::bh(m, b, Sidedness::one).step_up_value(j) ==
            doctest::Approx(oracle::quantile(1 - (m - j + 1.0) / m * b)).epsilon(1e-12));
      CHECK(ThresholdSpec::by(m, b, Sidedness::two).step_up_value(j) ==
            doctest::Approx(oracle::quantile(1 - (m - j + 1.0) / (2 * m * cm) * b)).epsilon(1e-12));
    }
  }

  TEST_CASE("bootstrap order statistic") {
    // per-row max over {0, 1} is 0.5, 1.0, 1.5, 2.0, 2.5
    Eigen::MatrixXd d(5, 3);
    d << 0.5, 0.1, 9, -1, 1.0, 9, 1.5, 1.5, 9, 2.0, 0.0, 9, 0.3, 2.5, 9;
    const ThresholdSpec spec = ThresholdSpec::bootstrap(d, 0.2, Sidedness::one);
    const int a[] = {0, 1};
    CHECK(spec.value(a) == 2.0);
    const int b[] = {1, 0};
    CHECK(spec.value(b) == 2.0);
    CHECK_FALSE(spec.depends_only_on_size());
  }

  TEST_CASE("bootstrap two-sided uses absolute draws") {
    Eigen::MatrixXd d(4, 1);
    d << -3, 1, -2, 0.5;
    const int a[] = {0};
    CHECK(ThresholdSpec::bootstrap(d, 0.25, Sidedness::two).value(a) == 2.0);
    CHECK(ThresholdSpec::bootstrap(d, 0.25, Sidedness::one).value(a) == 0.5);
  }

  TEST_CASE("invalid specifications") {
    CHECK_THROWS_AS(ThresholdSpec::holm(5, 0.0, Sidedness::two), Error);
    CHECK_THROWS_AS(ThresholdSpec::fdp(5, 0.1, 1.0, Sidedness::two), Error);
    CHECK_THROWS_AS(ThresholdSpec::bootstrap(Eigen::MatrixXd::Ones(1, 3), 0.1, Sidedness::two), Error);
    CHECK_THROWS_AS(ThresholdSpec::fixed({2.0, 1.0}, Procedure::step_down, Sidedness::one), Error);
    const ThresholdSpec h = ThresholdSpec::holm(3, 0.1, Sidedness::two);
    CHECK_THROWS_AS(h.value(std::span<const int>()), Error);
    // Very negative bootstrap draws give a non-positive threshold.
    Eigen::MatrixXd neg = Eigen::MatrixXd::Constant(4, 2, -1.0);
    const int a[] = {0};
    CHECK_THROWS_AS(ThresholdSpec::bootstrap(neg, 0.1, Sidedness::one).value(a), Error);
  }

  TEST_CASE("monotone along random subset chains") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
      const int m = 2 + trial % 6;
      for (Sidedness sided : {Sidedness::one, Sidedness::two}) {
        for (const ThresholdSpec& spec : step_down_families(m, sided, rng)) {
          std::vector<int> perm(m);
          std::iota(perm.begin(), perm.end(), 0);
          std::shuffle(perm.begin(), perm.end(), rng);
          double prev = 0.0;
          for (int k = 1; k <= m; ++k) {
            const double v = spec.value(std::span<const int>(perm.data(), k));
            CHECK(v > 0.0);
            CHECK(v >= prev);
            prev = v;
          }
        }
      }
    }
  }

  TEST_CASE("suffix values agree with direct evaluation") {
    std::mt19937_64 rng(8);
    for (const ThresholdSpec& spec : step_down_families(5, Sidedness::two, rng)) {
      const std::vector<int> seq = {3, 0, 4, 1, 2};
      const std::vector<double> t = spec.suffix_values(seq);
      for (std::size_t j = 0; j < seq.size(); ++j) {
        CHECK(t[j] == spec.value(std::span<const int>(seq.data() + j, seq.size() - j)));
      }
    }
  }
}

TEST_SUITE("selection") {
  TEST_CASE("step-down examples") {
    const ThresholdSpec h2 = ThresholdSpec::holm(2, 0.1, Sidedness::two);
    CHECK(step_down_select(vec({0, 0}), h2).empty());
    CHECK(step_down_select(vec({2.2, 1.8}), h2).significant_set() == std::vector<int>{0, 1});
    const SelectionOutcome one = step_down_select(vec({2.2, 1.5}), h2);
    CHECK(one.significant == std::vector<int>{0});
    CHECK(one.insignificant == std::vector<int>{1});
    CHECK(one.thresholds[0] == doctest::Approx(1.959964).epsilon(1e-6));
  }

  TEST_CASE("step-down tests the last statistic") {
    const ThresholdSpec h = ThresholdSpec::holm(1, 0.1, Sidedness::two);
    CHECK(step_down_select(vec({1.7}), h).significant == std::vector<int>{0});
    CHECK(step_down_select(vec({-1.7}), h).significant == std::vector<int>{0});
    CHECK(step_down_select(vec({1.6}), h).empty());
  }

  TEST_CASE("step-up examples") {
    const ThresholdSpec bh = ThresholdSpec::bh(2, 0.1, Sidedness::one);
    CHECK(bh.step_up_value(1) == doctest::Approx(1.2816).epsilon(1e-4));
    CHECK(bh.step_up_value(2) == doctest::Approx(1.6449).epsilon(1e-4));
    CHECK(step_up_select(vec({1.3, 1.5}), bh).significant_set() == std::vector<int>{0, 1});
    CHECK(step_up_select(vec({-5, -5}), bh).empty());
    CHECK(step_up_select(vec({1.0, 1.7}), bh).significant_set() == std::vector<int>{1});
    // The largest statistic is tested too.
    CHECK(step_up_select(vec({1.0, 1.65}), bh).significant_set() == std::vector<int>{1});
    CHECK(step_up_select(vec({1.0, 1.6}), bh).empty());
  }

  TEST_CASE("procedure mismatch and dimensions") {
    CHECK_THROWS_AS(step_up_select(vec({1, 2}), ThresholdSpec::holm(2, 0.1, Sidedness::two)), Error);
    CHECK_THROWS_AS(step_down_select(vec({1, 2}), ThresholdSpec::bh(2, 0.1, Sidedness::two)), Error);
    try {
      select(vec({1, 2, 3}), ThresholdSpec::holm(2, 0.1, Sidedness::two));
      FAIL("expected mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::dimension_mismatch);
    }
  }

  TEST_CASE("ties broken by index") {
    const ThresholdSpec h = ThresholdSpec::holm(3, 0.1, Sidedness::two);
    const SelectionOutcome out = step_down_select(vec({3, -3, 3}), h);
    CHECK(out.significant == std::vector<int>{0, 1, 2});
  }

  TEST_CASE("step-down agrees with the set characterisation") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n01;
    int agreements = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const int m = 1 + trial % 6;
      const Sidedness sided = trial % 3 ? Sidedness::two : Sidedness::one;
      const auto fams = step_down_families(m, sided, rng);
      const ThresholdSpec& spec = fams[trial % fams.size()];
      Eigen::VectorXd x(m);
      for (int h = 0; h < m; ++h) x[h] = 2.0 * n01(rng) + (h % 2 ? 1.5 : 0.0);
      const std::vector<int> selected = step_down_select(x, spec).significant_set();
      for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> S;
        for (int h = 0; h < m; ++h) {
          if (mask >> h & 1) S.push_back(h);
        }
        const bool lemma = oracle::step_down_lemma(x, spec, S);
        CHECK(lemma == (S == selected));
        agreements += lemma == (S == selected);
      }
    }
    CHECK(agreements > 0);
  }

  TEST_CASE("step-up agrees with the set characterisation") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 200; ++trial) {
      const int m = 1 + trial % 6;
      const Sidedness sided = trial % 2 ? Sidedness::two : Sidedness::one;
      const auto fams = step_up_families(m, sided);
      const ThresholdSpec& spec = fams[trial % fams.size()];
      Eigen::VectorXd x(m);
      for (int h = 0; h < m; ++h) x[h] = 2.0 * n01(rng) + (h % 2 ? 1.5 : 0.0);
      const std::vector<int> selected = step_up_select(x, spec).significant_set();
      for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> S;
        for (int h = 0; h < m; ++h) {
          if (mask >> h & 1) S.push_back(h);
        }
        CHECK(oracle::step_up_lemma(x, spec, S) == (S == selected));
      }
    }
  }

  TEST_CASE("holm contains bonferroni") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 300; ++trial) {
      const int m = 2 + trial % 8;
      const Sidedness sided = trial % 2 ? Sidedness::two : Sidedness::one;
      Eigen::VectorXd x(m);
      for (int h = 0; h < m; ++h) x[h] = 2.5 * n01(rng);
      const auto holm = step_down_select(x, ThresholdSpec::holm(m, 0.1, sided)).significant_set();
      const auto bonf = step_down_select(x, ThresholdSpec::bonferroni(m, 0.1, sided)).significant_set();
      CHECK(std::includes(holm.begin(), holm.end(), bonf.begin(), bonf.end()));
    }
  }

  TEST_CASE("detection order is weakly decreasing") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x(6);
      for (int h = 0; h < 6; ++h) x[h] = 3.0 * n01(rng);
      const SelectionOutcome out = step_down_select(x, ThresholdSpec::holm(6, 0.2, Sidedness::two));
      for (std::size_t k = 1; k < out.significant.size(); ++k) {
        CHECK(std::abs(x[out.significant[k]]) <= std::abs(x[out.significant[k - 1]]));
      }
      CHECK(out.significant.size() + out.insignificant.size() == 6u);
    }
  }
}

TEST_SUITE("bootstrap") {
  TEST_CASE("zero residuals are degenerate") {
    const std::vector<int> cl = {0, 0, 1, 1};
    try {
      wild_bootstrap_draws(Eigen::MatrixXd::Zero(4, 2), cl, 5, 1);
      FAIL("expected degenerate");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate);
    }
  }

  TEST_CASE("shape") {
    Eigen::MatrixXd r(4, 3);
    r << 1, -2, 0.5, -1, 1, 2, 0.3, 0.7, -1, 2, -0.4, 0.1;
    const std::vector<int> cl = {7, 7, 3, 3};
    const Eigen::MatrixXd d = wild_bootstrap_draws(r, cl, 5, 42);
    CHECK(d.rows() == 5);
    CHECK(d.cols() == 3);
    CHECK(d == wild_bootstrap_draws(r, cl, 5, 42));
    CHECK(d != wild_bootstrap_draws(r, cl, 5, 43));
  }

  TEST_CASE("single cluster flips the column mean") {
    Eigen::MatrixXd r(3, 2);
    r << 1, 2, 3, -1, 2, 5;
    const std::vector<int> cl = {1, 1, 1};
    const WildBootstrapResult res = wild_bootstrap(r, cl, 20, 9);
    const Eigen::RowVectorXd mean = r.colwise().mean();
    bool saw_plus = false, saw_minus = false;
    for (int b = 0; b < 20; ++b) {
      const bool plus = res.estimates.row(b).isApprox(mean);
      const bool minus = res.estimates.row(b).isApprox(-mean);
      CHECK((plus || minus));
      // the same weight multiplies every column
      CHECK((res.estimates(b, 0) > 0) == (res.estimates(b, 1) > 0));
      saw_plus |= plus;
      saw_minus |= minus;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
  }

  TEST_CASE("replicates do not depend on the count") {
    Eigen::MatrixXd r(6, 2);
    r << 1, 2, 3, -1, 2, 5, -2, 1, 0.5, -3, 1, 1;
    const std::vector<int> cl = {0, 1, 2, 0, 1, 2};
    const Eigen::MatrixXd a = wild_bootstrap_draws(r, cl, 10, 5);
    const Eigen::MatrixXd b = wild_bootstrap_draws(r, cl, 4, 5);
    CHECK(a.topRows(4) == b);
  }
}
