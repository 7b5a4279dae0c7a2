#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "expect_error.hpp"
#include "mvlorenz/copula.hpp"
#include "mvlorenz/lorenz.hpp"
#include "mvlorenz/meilc.hpp"

using namespace mvlorenz;

namespace {

// Bivariate normal CDF from Owen's T function.
double owen_bvn(double h, double k, double r) {
  const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  if (h == 0 && k == 0) return 0.25 + std::asin(r) / (2 * M_PI);
  const double s = std::sqrt(1 - r * r);
  const auto t = [&](double a, double b) {
    if (a == 0) return (b > 0 ? 0.25 : -0.25);
    return boost::math::owens_t(a, (b - r * a) / (a * s));
  };
  const double beta = (h * k > 0 || (h * k == 0 && h + k >= 0)) ? 0.0 : 0.5;
  return 0.5 * phi(h) + 0.5 * phi(k) - t(h, k) - t(k, h) - beta;
}

double clayton_cdf(double u, double v, double t) {
  if (u == 0 || v == 0) return 0;
  return std::pow(std::pow(u, -t) + std::pow(v, -t) - 1, -1 / t);
}

double gumbel_cdf(double u, double v, double t) {
  if (u == 0 || v == 0) return 0;
  return std::exp(-std::pow(std::pow(-std::log(u), t) + std::pow(-std::log(v), t), 1 / t));
}

// 12 * double integral of C minus 3, by nested adaptive Gauss-Kronrod.
template <class C>
double spearman_oracle(C c) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  auto inner = [&](double u) { return GK::integrate([&](double v) { return c(u, v); }, 0.0, 1.0, 12, 1e-12); };
  return 12 * GK::integrate(inner, 0.0, 1.0, 12, 1e-11) - 3;
}

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
  return r;
}

double sample_spearman(const std::vector<double>& rows, std::size_t n) {
  std::vector<double> a(n), b(n);
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = rows[2 * j];
    b[j] = rows[2 * j + 1];
  }
  const auto ra = ranks(a), rb = ranks(b);
  const double m = (n - 1) / 2.0;
  double sab = 0, saa = 0;
  for (std::size_t j = 0; j < n; ++j) {
    sab += (ra[j] - m) * (rb[j] - m);
    saa += (ra[j] - m) * (ra[j] - m);
  }
  return sab / saa;
}

std::vector<CopulaModel> bivariate_models() {
  return {CopulaModel(CopulaFamily::independence, 2),  CopulaModel(CopulaFamily::comonotone, 2),
          CopulaModel(CopulaFamily::countermonotone, 2), CopulaModel(CopulaFamily::gaussian, 2, -0.8),
          CopulaModel(CopulaFamily::gaussian, 2, 0.3),   CopulaModel(CopulaFamily::gaussian, 2, 0.95),
          CopulaModel(CopulaFamily::clayton, 2, 0.5),    CopulaModel(CopulaFamily::clayton, 2, 4.0),
          CopulaModel(CopulaFamily::gumbel, 2, 1.0),     CopulaModel(CopulaFamily::gumbel, 2, 3.0)};
}

const std::vector<MarginalModel> kSqrt{MarginalModel::power(0.5), MarginalModel::power(0.5)};
const std::vector<MarginalModel> kMixed{MarginalModel::power(0.9), MarginalModel::power(0.5)};

}  // namespace

TEST_SUITE("copula") {
  TEST_CASE("model validation") {
    CHECK(thrown_kind([] { CopulaModel(CopulaFamily::countermonotone, 3); }) == ErrorKind::unsupported_dimension);
    CHECK(thrown_kind([] { CopulaModel(CopulaFamily::clayton, 2, 0.0); }) == ErrorKind::parameter_out_of_domain);
    CHECK(thrown_kind([] { CopulaModel(CopulaFamily::gumbel, 2, 0.9); }) == ErrorKind::parameter_out_of_domain);
    CHECK(thrown_kind([] { CopulaModel(CopulaFamily::gaussian, 2, 1.0); }) == ErrorKind::parameter_out_of_domain);
    CHECK(thrown_kind([] { CopulaModel(CopulaFamily::gaussian, 3, -0.6); }) == ErrorKind::parameter_out_of_domain);
    CHECK(thrown_kind([] { CopulaModel(CopulaFamily::independence, 1); }) == ErrorKind::unsupported_dimension);
    CHECK(parse_family("Gumbel") == CopulaFamily::gumbel);
    CHECK(parse_family("pi") == CopulaFamily::independence);
    CHECK(thrown_kind([] { parse_family("student"); }) == ErrorKind::unsupported_family);
  }

  TEST_CASE("closed-form CDF values") {
    const std::vector<double> a{0.3, 0.5}, b{0.3, 0.5, 0.9}, c{0.5, 0.5};
    CHECK(copula_cdf(CopulaModel(CopulaFamily::independence, 2), a) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(copula_cdf(CopulaModel(CopulaFamily::comonotone, 3), b) == 0.3);
    CHECK(copula_cdf(CopulaModel(CopulaFamily::clayton, 2, 2.0), c) == doctest::Approx(1 / std::sqrt(7.0)).epsilon(1e-14));
    CHECK(copula_cdf(CopulaModel(CopulaFamily::countermonotone, 2), a) == 0.0);
  }

  TEST_CASE("grounding and uniform margins") {
    for (const auto& m : bivariate_models()) {
      for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        const std::vector<double> zero{0.0, x}, one{1.0, x}, one2{x, 1.0};
        CHECK(copula_cdf(m, zero) == 0.0);
        CHECK(copula_cdf(m, one) == doctest::Approx(x).epsilon(1e-12));
        CHECK(copula_cdf(m, one2) == doctest::Approx(x).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("bivariate normal CDF against Owen's T") {
    for (double r : {-0.95, -0.5, -0.1, 0.2, 0.517638, 0.9, 0.99})
      for (double h : {-3.0, -1.2, -0.3, 0.0, 0.4, 1.7, 4.0})
        for (double k : {-2.5, -0.7, 0.0, 0.1, 1.1, 3.3})
          CHECK(std::fabs(bivariate_normal_cdf(h, k, r) - owen_bvn(h, k, r)) <= 1e-10);
  }

  TEST_CASE("normal helpers") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    for (double p : {1e-10, 0.01, 0.3, 0.5, 0.8, 0.999999})
      CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }

  TEST_CASE("Frechet sandwich and 2-increasing property") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u01(0, 1);
    for (const auto& m : bivariate_models()) {
      for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
          const std::vector<double> u{i / 20.0, j / 20.0};
          const double c = copula_cdf(m, u);
          CHECK(c >= lower_frechet(u) - 1e-12);
          CHECK(c <= std::min(u[0], u[1]) + 1e-12);
        }
      for (int t = 0; t < 200; ++t) {
        double u1 = u01(rng), u2 = u01(rng), v1 = u01(rng), v2 = u01(rng);
        if (u1 > u2) std::swap(u1, u2);
        if (v1 > v2) std::swap(v1, v2);
        const auto C = [&](double a, double b) {
          const std::vector<double> p{a, b};
          return copula_cdf(m, p);
        };
        CHECK(C(u2, v2) - C(u1, v2) - C(u2, v1) + C(u1, v1) >= -1e-12);
      }
    }
  }

  TEST_CASE("gaussian CDF in three dimensions by Monte Carlo") {
    const CopulaModel m(CopulaFamily::gaussian, 3, 0.0);
    const std::vector<double> u{0.3, 0.6, 0.8};
    const auto e = copula_cdf_estimate(m, u, McOptions{200000, 3, 1});
    CHECK(e.std_error > 0.0);
    CHECK(std::fabs(e.value - 0.144) <= 4 * e.std_error);
    const CopulaModel pos(CopulaFamily::gaussian, 3, 0.5);
    const double c = copula_cdf(pos, u, McOptions{100000, 5, 1});
    CHECK(c >= 0.144);
    CHECK(c <= 0.3);
  }

  TEST_CASE("three-dimensional gaussian surfaces are monotone") {
    const CopulaModel m(CopulaFamily::gaussian, 3, 0.4);
    const McOptions mc{5000, 2, 1};
    const GridSpec g = GridSpec::uniform(3, 6);
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = copula_cdf(m, g.point(k), mc);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto idx = g.index(k);
      std::size_t stride = 1;
      for (std::size_t i = 3; i-- > 0;) {
        if (idx[i] + 1 < 6) CHECK(v[k + stride] >= v[k]);
        stride *= 6;
      }
    }
    CHECK(v.back() == 1.0);
  }

  TEST_CASE("samples are reproducible and independent of thread count") {
    for (const auto& m : bivariate_models()) {
      const auto a = copula_sample(m, 10000, 77, 1);
      const auto b = copula_sample(m, 10000, 77, 3);
      CHECK(a == b);
      CHECK(a.size() == 20000);
    }
    const auto ind = copula_sample(CopulaModel(CopulaFamily::independence, 2), 4, 9);
    CHECK(ind == copula_sample(CopulaModel(CopulaFamily::independence, 2), 4, 9));
    const auto co = copula_sample(CopulaModel(CopulaFamily::comonotone, 3), 100, 1);
    for (std::size_t j = 0; j < 100; ++j) {
      CHECK(co[3 * j] == co[3 * j + 1]);
      CHECK(co[3 * j] == co[3 * j + 2]);
    }
    const auto w = copula_sample(CopulaModel(CopulaFamily::countermonotone, 2), 100, 1);
    for (std::size_t j = 0; j < 100; ++j) CHECK(w[2 * j] + w[2 * j + 1] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("sampled margins pass a Kolmogorov-Smirnov test") {
    // critical value at alpha = 0.001 for n = 1e5: 1.9495 / sqrt(n)
    const std::size_t n = 100000;
    const double crit = 1.9495 / std::sqrt(static_cast<double>(n));
    std::vector<CopulaModel> models = bivariate_models();
    models.emplace_back(CopulaFamily::clayton, 3, 2.0);
    models.emplace_back(CopulaFamily::gumbel, 4, 1.7);
    models.emplace_back(CopulaFamily::gaussian, 3, 0.4);
    for (const auto& m : models) {
      const auto s = copula_sample(m, n, 2024);
      for (std::size_t i = 0; i < m.dim(); ++i) {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = s[j * m.dim() + i];
        std::sort(x.begin(), x.end());
        double dmax = 0;
        for (std::size_t j = 0; j < n; ++j)
          dmax = std::max({dmax, (j + 1.0) / n - x[j], x[j] - static_cast<double>(j) / n});
        CHECK(dmax < crit);
      }
    }
  }

  TEST_CASE("empirical copula of samples approaches the CDF") {
    for (const auto& m : bivariate_models()) {
      const std::size_t n = 200000;
      const auto s = copula_sample(m, n, 5);
      for (double a : {0.2, 0.5, 0.8})
        for (double b : {0.3, 0.6}) {
          std::size_t hit = 0;
          for (std::size_t j = 0; j < n; ++j) hit += (s[2 * j] <= a && s[2 * j + 1] <= b);
          const std::vector<double> u{a, b};
          CHECK(std::fabs(static_cast<double>(hit) / n - copula_cdf(m, u)) < 0.005);
        }
    }
  }

  TEST_CASE("Spearman calibration") {
    CHECK(spearman_to_param(CopulaFamily::gaussian, 0.0) == 0.0);
    CHECK(spearman_to_param(CopulaFamily::gaussian, 0.5) == doctest::Approx(0.51764).epsilon(1e-5));
    const double tc = spearman_to_param(CopulaFamily::clayton, 0.8);
    CHECK(std::fabs(spearman_oracle([&](double u, double v) { return clayton_cdf(u, v, tc); }) - 0.8) <= 1e-6);
    const double tg = spearman_to_param(CopulaFamily::gumbel, 0.8);
    CHECK(std::fabs(spearman_oracle([&](double u, double v) { return gumbel_cdf(u, v, tg); }) - 0.8) <= 1e-6);
    for (double rho : {0.1, 0.45, 0.95}) {
      const double t = spearman_to_param(CopulaFamily::clayton, rho);
      CHECK(std::fabs(param_to_spearman(CopulaModel(CopulaFamily::clayton, 2, t)) - rho) <= 1e-6);
    }
    CHECK(thrown_kind([] { spearman_to_param(CopulaFamily::clayton, -0.3); }) == ErrorKind::unattainable);
    CHECK(thrown_kind([] { spearman_to_param(CopulaFamily::gumbel, 1.0); }) == ErrorKind::unattainable);
    CHECK(thrown_kind([] { spearman_to_param(CopulaFamily::gaussian, 1.0); }) == ErrorKind::unattainable);
    CHECK(param_to_spearman(CopulaModel(CopulaFamily::comonotone, 2)) == 1.0);
    CHECK(param_to_spearman(CopulaModel(CopulaFamily::countermonotone, 2)) == -1.0);
  }

  TEST_CASE("sampled Spearman matches the calibration target") {
    const std::size_t n = 1000000;
    const double r = spearman_to_param(CopulaFamily::gaussian, 0.9);
    CHECK(std::fabs(sample_spearman(copula_sample(CopulaModel(CopulaFamily::gaussian, 2, r), n, 8), n) - 0.9) <=
          0.005);
    const double tc = spearman_to_param(CopulaFamily::clayton, 0.8);
    CHECK(std::fabs(sample_spearman(copula_sample(CopulaModel(CopulaFamily::clayton, 2, tc), n, 8), n) - 0.8) <=
          0.005);
    const double tg = spearman_to_param(CopulaFamily::gumbel, 0.8);
    CHECK(std::fabs(sample_spearman(copula_sample(CopulaModel(CopulaFamily::gumbel, 2, tg), n, 8), n) - 0.8) <=
          0.005);
  }

  TEST_CASE("power margins") {
    const auto m = MarginalModel::power(0.5);
    CHECK(m.inverse_lorenz(0.25) == doctest::Approx(0.5));
    CHECK(m.lorenz(0.5) == doctest::Approx(0.25));
    CHECK(m.gini() == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(MarginalModel::diagonal().gini() == 0.0);
    CHECK(thrown_kind([] { MarginalModel::power(1.5); }) == ErrorKind::parameter_out_of_domain);
    CHECK(thrown_kind([] { MarginalModel::power(0.0); }) == ErrorKind::parameter_out_of_domain);
    const std::vector<double> x{1, 2, 3, 4, 5};
    const auto e = MarginalModel::empirical(empirical_lorenz(x, std::vector<double>(5, 1.0)));
    CHECK(e.inverse_lorenz(0.2) == doctest::Approx(0.4));
    CHECK(e.gini() == doctest::Approx(4.0 / 15));
  }

  TEST_CASE("parametric surface values") {
    const std::vector<double> q{0.25, 0.25}, r{0.16, 0.36}, top{0.3, 1.0};
    CHECK(parametric_meilc(CopulaModel(CopulaFamily::independence, 2), kSqrt, q) == doctest::Approx(0.25));
    CHECK(parametric_meilc(CopulaModel(CopulaFamily::comonotone, 2), kSqrt, r) == doctest::Approx(0.4));
    for (const auto& m : bivariate_models())
      CHECK(parametric_meilc(m, kMixed, top) == doctest::Approx(std::pow(0.3, 0.9)).epsilon(1e-12));
  }

  TEST_CASE("parametric surfaces respect order and bounds") {
    std::vector<MarginalModel> margins{MarginalModel::power(0.7), MarginalModel::power(0.4)};
    const CopulaModel lo(CopulaFamily::gaussian, 2, -0.3), hi(CopulaFamily::gaussian, 2, 0.6);
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j) {
        const std::vector<double> u{i / 20.0, j / 20.0};
        const double a = parametric_meilc(lo, margins, u), b = parametric_meilc(hi, margins, u);
        CHECK(a <= b + 1e-12);
        CHECK(a >= lower_frechet(u) - 1e-12);
        CHECK(b <= 1.0);
      }
  }

  TEST_CASE("quadrature reference values") {
    const auto pi = parametric_megc_quadrature(CopulaModel(CopulaFamily::independence, 2), kSqrt);
    CHECK(pi.value == doctest::Approx(1.0 / 3).epsilon(1e-9));
    const auto m = parametric_megc_quadrature(CopulaModel(CopulaFamily::comonotone, 2), kSqrt);
    CHECK(m.value == doctest::Approx(0.44).epsilon(1e-6));
    const std::vector<MarginalModel> diag{MarginalModel::diagonal(), MarginalModel::diagonal()};
    const auto w = parametric_megc_quadrature(CopulaModel(CopulaFamily::countermonotone, 2), diag);
    CHECK(std::fabs(w.value) <= 1e-6);
    CHECK(pi.std_error <= 1e-4);
    CHECK(thrown_kind([] {
            const std::vector<MarginalModel> three(3, MarginalModel::diagonal());
            parametric_megc_quadrature(CopulaModel(CopulaFamily::independence, 3), three);
          }) == ErrorKind::unsupported_dimension);
  }

  TEST_CASE("Monte Carlo and quadrature agree") {
    struct Row {
      CopulaFamily f;
      double rho;
      bool mixed;
    };
    const std::vector<Row> rows{{CopulaFamily::gaussian, -0.9, false}, {CopulaFamily::gaussian, 0.0, false},
                                {CopulaFamily::gaussian, 0.5, false},  {CopulaFamily::gumbel, 0.8, false},
                                {CopulaFamily::clayton, 0.8, false},   {CopulaFamily::clayton, 0.8, true}};
    double prev = -1;
    for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
      const CopulaModel g(CopulaFamily::gaussian, 2, spearman_to_param(CopulaFamily::gaussian, rho));
      const double v = parametric_megc_quadrature(g, kSqrt).value;
      CHECK(v > prev);
      prev = v;
    }
    for (const auto& r : rows) {
      const CopulaModel m(r.f, 2, spearman_to_param(r.f, r.rho));
      const auto& margins = r.mixed ? kMixed : kSqrt;
      const auto q = parametric_megc_quadrature(m, margins);
      const auto mc = parametric_megc_mc(m, margins, McOptions{200000, 11, 1});
      CHECK(std::fabs(q.value - mc.value) <= 3 * mc.std_error);
    }
  }

  TEST_CASE("Monte Carlo is reproducible across thread counts") {
    const CopulaModel m(CopulaFamily::clayton, 2, 2.0);
    const auto a = parametric_megc_mc(m, kSqrt, McOptions{50000, 3, 1});
    const auto b = parametric_megc_mc(m, kSqrt, McOptions{50000, 3, 4});
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(thrown_kind([&] { parametric_megc_mc(m, kSqrt, McOptions{999, 3, 1}); }) == ErrorKind::invalid_argument);
  }

  TEST_CASE("independence closed form") {
    const std::vector<double> third{1.0 / 3, 1.0 / 3}, zero2{0, 0}, zero3{0, 0, 0};
    CHECK(independence_megc(third) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(independence_megc(zero2) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(independence_megc(zero3) == doctest::Approx(2.0 / 23).epsilon(1e-15));
    const std::vector<double> bad{0.5, 1.2};
    CHECK(thrown_kind([&] { independence_megc(bad); }) == ErrorKind::out_of_range);
  }
}
