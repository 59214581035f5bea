#include "../oracles.hpp"

#include "selinf/error.hpp"
#include "selinf/normal.hpp"
#include "selinf/selection.hpp"
#include "selinf/support.hpp"

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

Decomposition identity_decomposition(double x_s, double z2) {
  Decomposition d;
  d.s = 0;
  d.x_s = x_s;
  d.z = vec({0.0, z2});
  d.omega_col = vec({1.0, 0.0});
  return d;
}

bool same_union(const IntervalUnion& a, const IntervalUnion& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  auto close = [&](double u, double v) {
    return u == v || std::abs(u - v) <= tol * std::max(1.0, std::abs(u));
  };
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!close(a.intervals()[k].lo, b.intervals()[k].lo)) return false;
    if (!close(a.intervals()[k].hi, b.intervals()[k].hi)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("decompose") {
  TEST_CASE("identity correlation") {
    const Decomposition d = decompose(vec({1.5, 2.0}), Eigen::MatrixXd::Identity(2, 2), 0);
    CHECK(d.z == vec({0.0, 2.0}));
    CHECK(d.x_s == 1.5);
  }

  TEST_CASE("correlated pair") {
    Eigen::MatrixXd om(2, 2);
    om << 1, 0.5, 0.5, 1;
    const Decomposition d = decompose(vec({2, 1}), om, 0);
    CHECK(d.z[0] == 0.0);
    CHECK(d.z[1] == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("reconstruction and zero own component") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      const int m = 2 + trial % 6;
      const Eigen::MatrixXd om = oracle::random_correlation(m, rng);
      const Eigen::VectorXd x = oracle::correlated_normal(om, Eigen::VectorXd::Zero(m), rng);
      const int s = trial % m;
      const Decomposition d = decompose(x, om, s);
      CHECK(d.z[s] == 0.0);
      CHECK((d.reconstruct(d.x_s) - x).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }

  TEST_CASE("dimension errors") {
    CHECK_THROWS_AS(decompose(vec({1, 2}), Eigen::MatrixXd::Identity(3, 3), 0), Error);
    CHECK_THROWS_AS(decompose(vec({1, 2}), Eigen::MatrixXd::Identity(2, 2), 2), Error);
  }
}

TEST_SUITE("membership") {
  TEST_CASE("univariate t-test") {
    const ThresholdSpec t = ThresholdSpec::holm(1, 0.1, Sidedness::two);
    Decomposition d;
    d.z = vec({0.0});
    d.omega_col = vec({1.0});
    const SelectionEvent ev = SelectionEvent::equal({0});
    CHECK(membership_oracle(2.0, d, t, ev));
    CHECK_FALSE(membership_oracle(1.0, d, t, ev));
  }

  TEST_CASE("two effects, both significant") {
    const ThresholdSpec h = ThresholdSpec::holm(2, 0.1, Sidedness::two);
    const SelectionEvent ev = SelectionEvent::equal({0, 1});
    const Decomposition d = identity_decomposition(1.7, 2.5);
    CHECK(membership_oracle(1.7, d, h, ev));
    CHECK_FALSE(membership_oracle(1.5, d, h, ev));
  }

  TEST_CASE("superset event") {
    const ThresholdSpec h = ThresholdSpec::holm(2, 0.1, Sidedness::two);
    const Decomposition d = identity_decomposition(3.0, 2.5);
    CHECK(membership_oracle(3.0, d, h, SelectionEvent::superset({0})));
    CHECK_FALSE(membership_oracle(3.0, d, h, SelectionEvent::equal({0})));
  }
}

TEST_SUITE("conditional_support") {
  TEST_CASE("univariate two-sided") {
    const ThresholdSpec t = ThresholdSpec::holm(1, 0.1, Sidedness::two);
    Decomposition d;
    d.x_s = 2.0;
    d.z = vec({0.0});
    d.omega_col = vec({1.0});
    const IntervalUnion u = conditional_support(d, t, SelectionEvent::equal({0}));
    REQUIRE(u.size() == 2);
    CHECK(u.intervals()[0].lo == -kInf);
    CHECK(u.intervals()[0].hi == doctest::Approx(-1.6449).epsilon(1e-4));
    CHECK(u.intervals()[1].lo == doctest::Approx(1.6449).epsilon(1e-4));
    CHECK(u.intervals()[1].hi == kInf);
  }

  TEST_CASE("two effects, equal event") {
    const ThresholdSpec h = ThresholdSpec::holm(2, 0.1, Sidedness::two);
    const IntervalUnion u =
        conditional_support(identity_decomposition(1.7, 2.5), h, SelectionEvent::equal({0, 1}));
    REQUIRE(u.size() == 2);
    const double c = normal_quantile(0.95);
    CHECK(u.intervals()[0].hi == doctest::Approx(-c).epsilon(1e-12));
    CHECK(u.intervals()[1].lo == doctest::Approx(c).epsilon(1e-12));
  }

  TEST_CASE("two effects, superset event") {
    const ThresholdSpec h = ThresholdSpec::holm(2, 0.1, Sidedness::two);
    const IntervalUnion u =
        conditional_support(identity_decomposition(2.5, 1.0), h, SelectionEvent::superset({0}));
    REQUIRE(u.size() == 2);
    CHECK(u.intervals()[0].hi == doctest::Approx(-1.9600).epsilon(1e-4));
    CHECK(u.intervals()[1].lo == doctest::Approx(1.9600).epsilon(1e-4));
  }

  TEST_CASE("errors") {
    const ThresholdSpec h = ThresholdSpec::holm(2, 0.1, Sidedness::two);
    try {
      conditional_support(identity_decomposition(1.0, 2.5), h, SelectionEvent::equal({0, 1}));
      FAIL("expected inconsistent event");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::inconsistent_event);
    }
    // Effect 2 is flat at 0.5 and can never be significant.
    try {
      conditional_support(identity_decomposition(3.0, 0.5), h, SelectionEvent::equal({0, 1}));
      FAIL("expected degenerate");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate);
    }
    SupportOptions no_check;
    no_check.check_observed = false;
    CHECK(conditional_support(identity_decomposition(1.0, 2.5), h, SelectionEvent::equal({0, 1}),
                              no_check)
              .size() == 2);
  }

  TEST_CASE("agrees with the oracle on a grid") {
    std::mt19937_64 rng(101);
    int split = 0, naive_misses = 0;
    for (int trial = 0; trial < 150; ++trial) {
      const oracle::Instance in = oracle::random_instance(rng);
      const IntervalUnion u = conditional_support(in.d, in.spec, in.event);
      CHECK(oracle::grid_disagreements(in, u, 801) == 0);
      split += u.size() > 1;
      naive_misses += oracle::grid_disagreements(in, IntervalUnion::real_line(), 801) > 0;
      CHECK(u.contains(in.d.x_s, 1e-9 * std::max(1.0, std::abs(in.d.x_s))));
      const int m = in.d.m();
      CHECK(static_cast<int>(u.size()) <= m * (m + 1) / 2 + 1);
    }
    // the generator must produce nontrivial supports for this to mean much
    CHECK(split > 30);
    CHECK(naive_misses > 140);
  }

  TEST_CASE("option paths return the same union") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 150; ++trial) {
      const oracle::Instance in = oracle::random_instance(rng, 2, 9);
      SupportOptions plain;
      plain.initial_bounds = false;
      SupportOptions sweep;
      sweep.sweep_line = true;
      SupportOptions both;
      both.sweep_line = true;
      both.initial_bounds = false;
      const IntervalUnion ref = conditional_support(in.d, in.spec, in.event);
      CHECK(same_union(ref, conditional_support(in.d, in.spec, in.event, plain)));
      CHECK(same_union(ref, conditional_support(in.d, in.spec, in.event, sweep)));
      CHECK(same_union(ref, conditional_support(in.d, in.spec, in.event, both)));
    }
  }

  TEST_CASE("one-sided step-down interval count") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 100; ++trial) {
      oracle::Instance in = oracle::random_instance(rng, 2, 8, true);
      in.event = SelectionEvent::equal(in.selected);
      const IntervalUnion u = conditional_support(in.d, in.spec, in.event);
      int plus = 0, minus = 0;
      for (int h : in.selected) {
        plus += in.d.omega_col[h] > 0;
        minus += in.d.omega_col[h] < 0;
      }
      CHECK(static_cast<int>(u.size()) <= plus * minus + 1);
      if (minus == 0) CHECK(u.size() == 1);
    }
  }

  TEST_CASE("larger problems with the kinetic sweep") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 20; ++trial) {
      const oracle::Instance in = oracle::random_instance(rng, 10, 25);
      SupportOptions sweep;
      sweep.sweep_line = true;
      const IntervalUnion u = conditional_support(in.d, in.spec, in.event, sweep);
      CHECK(same_union(u, conditional_support(in.d, in.spec, in.event)));
      CHECK(oracle::grid_disagreements(in, u, 401) == 0);
    }
  }
}

TEST_SUITE("merge_intervals") {
  TEST_CASE("examples") {
    CHECK(merge_intervals({{1, 2}, {2, 3}}) == IntervalUnion({{1, 3}}));
    CHECK(merge_intervals({}).empty());
    CHECK(merge_intervals({{0, 1}, {5, 6}, {0.5, 2}}) == IntervalUnion({{0, 2}, {5, 6}}));
  }

  TEST_CASE("near-touching gaps close") {
    CHECK(merge_intervals({{0, 1}, {1 + 1e-12, 2}}).size() == 1);
    CHECK(merge_intervals({{0, 1}, {1 + 1e-6, 2}}).size() == 2);
  }
}
