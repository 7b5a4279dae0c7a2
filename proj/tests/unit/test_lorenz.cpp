#include <random>

#include "doctest.h"
#include "expect_error.hpp"
#include "mvlorenz/lorenz.hpp"
#include "oracles.hpp"

using namespace mvlorenz;

namespace {
const std::vector<double> kOneToFive{1, 2, 3, 4, 5};
const std::vector<double> kUnit5(5, 1.0);
}  // namespace

TEST_SUITE("lorenz") {
  TEST_CASE("empirical curve knots") {
    const auto c = empirical_lorenz(kOneToFive, kUnit5);
    CHECK(lorenz_eval(c, 0.4) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(lorenz_eval(c, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(lorenz_eval(c, 0.0) == 0.0);
    CHECK(lorenz_eval(c, 1.0) == 1.0);
    const std::vector<double> soc{3, 4, 6};
    const auto s = empirical_lorenz(soc, std::vector<double>(3, 1.0));
    CHECK(lorenz_eval(s, 2.0 / 3) == doctest::Approx(7.0 / 13).epsilon(1e-15));
  }

  TEST_CASE("equal values give the diagonal") {
    const std::vector<double> v{2.5, 2.5, 2.5};
    const auto c = empirical_lorenz(v, std::vector<double>(3, 1.0));
    CHECK(lorenz_eval(c, 0.37) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(inverse_lorenz_eval(c, 0.42) == doctest::Approx(0.42).epsilon(1e-15));
    CHECK(gini(v, std::vector<double>(3, 1.0)) == doctest::Approx(0.0).epsilon(1e-15));
    // every star is 1 under the inclusive tie rule
    CHECK(gini(v, std::vector<double>(3, 1.0), GiniConvention::plugin) == -1.0);
  }

  TEST_CASE("inverse curve") {
    const auto c = empirical_lorenz(kOneToFive, kUnit5);
    CHECK(inverse_lorenz_eval(c, 0.2) == doctest::Approx(0.4).epsilon(1e-15));
    const std::vector<double> zeros{0, 0, 1, 1};
    const auto z = empirical_lorenz(zeros, std::vector<double>(4, 1.0));
    CHECK(inverse_lorenz_eval(z, 0.0) == 0.5);
    CHECK(inverse_lorenz_eval(z, 1.0) == 1.0);
    CHECK(thrown_kind([&] { inverse_lorenz_eval(c, 1.5); }) == ErrorKind::out_of_range);
    CHECK(thrown_kind([&] { lorenz_eval(c, -0.1); }) == ErrorKind::out_of_range);
  }

  TEST_CASE("gini conventions on 1..5") {
    CHECK(gini(kOneToFive, kUnit5) == doctest::Approx(4.0 / 15).epsilon(1e-15));
    CHECK(gini(kOneToFive, kUnit5, GiniConvention::plugin) == doctest::Approx(1.0 / 15).epsilon(1e-14));
    CHECK(oracle::pairwise_gini(kOneToFive, kUnit5) == doctest::Approx(4.0 / 15).epsilon(1e-15));
  }

  TEST_CASE("cumulative shares include ties on both sides") {
    const std::vector<double> v{2, 1, 2, 5};
    const auto s = cumulative_shares(v, std::vector<double>(4, 1.0));
    CHECK(s == std::vector<double>{0.5, 0.1, 0.5, 1.0});
  }

  TEST_CASE("weights act as replication") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_int_distribution<int> k(1, 4);
      std::vector<double> x, w, xr;
      for (int j = 0; j < 12; ++j) {
        const double v = std::uniform_real_distribution<double>(0, 10)(rng);
        const int rep = k(rng);
        x.push_back(v);
        w.push_back(rep);
        for (int r = 0; r < rep; ++r) xr.push_back(v);
      }
      const std::vector<double> ones(xr.size(), 1.0);
      CHECK(gini(x, w) == doctest::Approx(gini(xr, ones)).epsilon(1e-12));
      CHECK(gini(x, w, GiniConvention::plugin) == doctest::Approx(gini(xr, ones, GiniConvention::plugin)).epsilon(1e-12));
    }
  }

  TEST_CASE("properties on random weighted inputs") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng() % 60;
      const auto rows = oracle::random_rows(rng, n, 1, trial % 3 == 0);
      const auto x = oracle::column(rows, 0);
      const auto w = oracle::random_weights(rng, n);
      const auto c = empirical_lorenz(x, w);
      const auto& u = c.knots_u();
      const auto& s = c.knots_s();
      for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        CHECK(s[k] <= u[k] + 1e-15);
        CHECK(s[k + 1] >= s[k]);
        if (k + 2 < u.size()) {
          const double slope1 = (s[k + 1] - s[k]) / (u[k + 1] - u[k]);
          const double slope2 = (s[k + 2] - s[k + 1]) / (u[k + 2] - u[k + 1]);
          CHECK(slope2 >= slope1 - 1e-9);
        }
      }
      CHECK(gini(x, w) == doctest::Approx(oracle::pairwise_gini(x, w)).epsilon(1e-10));
      std::vector<double> scaled = x;
      for (auto& v : scaled) v *= 3.7;
      CHECK(std::fabs(gini(scaled, w) - gini(x, w)) <= 1e-12);
      CHECK(std::fabs(gini(scaled, w, GiniConvention::plugin) - gini(x, w, GiniConvention::plugin)) <= 1e-12);
    }
  }

  TEST_CASE("conventions converge on large uniform samples") {
    std::mt19937_64 rng(99);
    for (std::size_t n : {100u, 1000u, 10000u}) {
      std::vector<double> x(n);
      for (auto& v : x) v = std::uniform_real_distribution<double>(0, 1)(rng);
      const std::vector<double> w(n, 1.0);
      CHECK(std::fabs(gini(x, w) - gini(x, w, GiniConvention::plugin)) <= 5.0 / static_cast<double>(n));
    }
  }

  TEST_CASE("curve validation") {
    CHECK(thrown_kind([] { LorenzCurve({0, 0.5, 1}, {0, 0.2, 0.9}); }) == ErrorKind::invalid_argument);
    CHECK_FALSE(thrown_kind([] { LorenzCurve({0, 0.5, 1}, {0, 0.2, 1}); }).has_value());
  }
}
