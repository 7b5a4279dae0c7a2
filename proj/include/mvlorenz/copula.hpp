#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mvlorenz/lorenz.hpp"

namespace mvlorenz {

enum class CopulaFamily { independence, comonotone, countermonotone, gaussian, clayton, gumbel };

std::string_view to_string(CopulaFamily family) noexcept;
/// Accepts the names printed by to_string plus "pi", "m", "w". Throws
/// unsupported_family for anything else.
CopulaFamily parse_family(std::string_view name);

/// Parametric copula on [0,1]^d. Parameter domains: gaussian takes the
/// common pairwise correlation r in (-1/(d-1), 1); clayton theta > 0;
/// gumbel theta >= 1; the other families ignore the parameter.
class CopulaModel {
 public:
  /// Throws parameter_out_of_domain, or unsupported_dimension for
  /// countermonotone with d >= 3 (the lower bound is not a copula there).
  CopulaModel(CopulaFamily family, std::size_t dim, double parameter = 0.0);

  CopulaFamily family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return dim_; }
  double parameter() const noexcept { return parameter_; }

 private:
  CopulaFamily family_;
  std::size_t dim_;
  double parameter_;
};

struct McOptions {
  std::size_t count = 100000;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  ///< 0: MVLORENZ_THREADS or 1
};

struct Estimate {
  double value;
  double std_error;  ///< zero for closed-form and quadrature results
};

/// Standard normal distribution function and quantile.
double normal_cdf(double x);
double normal_quantile(double p);

/// P(Z1 <= a, Z2 <= b) for standard normals with correlation r, by adaptive
/// Gauss-Kronrod quadrature of the conditional normal (abs error ~1e-12).
double bivariate_normal_cdf(double a, double b, double r);

/// C(u). Grounded (0 if any u_i = 0) and coordinates at 1 drop out. The
/// gaussian family with three or more active coordinates is estimated by
/// Monte Carlo using `mc`; use copula_cdf_estimate to see the error.
double copula_cdf(const CopulaModel& model, std::span<const double> u, const McOptions& mc = {});
Estimate copula_cdf_estimate(const CopulaModel& model, std::span<const double> u, const McOptions& mc = {});

/// `count` draws as a row-major count x d matrix of uniforms. Draws are
/// generated in fixed blocks, each from its own Philox substream, so the
/// output depends only on the seed.
std::vector<double> copula_sample(const CopulaModel& model, std::size_t count, std::uint64_t seed,
                                  std::size_t threads = 0);

/// Spearman's rho of a bivariate model: closed form where one exists,
/// otherwise 12 * double-integral(C) - 3 by tensor Gauss-Legendre quadrature.
double param_to_spearman(const CopulaModel& model);

/// Parameter of a bivariate family with the given Spearman's rho. Gaussian
/// uses r = 2 sin(pi rho / 6); clayton and gumbel bisect on theta until the
/// quadrature rho is within 1e-6. Throws unattainable / unsupported_family.
double spearman_to_param(CopulaFamily family, double rho_s);

/// Marginal inverse Lorenz curve: power u^a with a in (0,1], the diagonal,
/// or an empirical curve.
class MarginalModel {
 public:
  static MarginalModel power(double exponent);
  static MarginalModel diagonal() { return power(1.0); }
  static MarginalModel empirical(LorenzCurve curve);

  bool is_power() const noexcept { return !curve_.has_value(); }
  double exponent() const noexcept { return exponent_; }

  double inverse_lorenz(double u) const;
  double lorenz(double s) const;
  /// 2 * integral(L^-1) - 1.
  double gini() const;

 private:
  MarginalModel(double exponent, std::optional<LorenzCurve> curve) : exponent_(exponent), curve_(std::move(curve)) {}

  double exponent_;
  std::optional<LorenzCurve> curve_;
};

/// C(L1^-1(u1), ..., Ld^-1(ud)).
double parametric_meilc(const CopulaModel& copula, std::span<const MarginalModel> margins,
                        std::span<const double> u, const McOptions& mc = {});

/// Monte Carlo coefficient from E[prod(1 - L_i(U_i))], U ~ C. Requires
/// count >= 1000.
Estimate parametric_megc_mc(const CopulaModel& copula, std::span<const MarginalModel> margins,
                            const McOptions& mc);

/// Two-variable coefficient by tensor Gauss-Legendre quadrature of the
/// parametric surface (64 panels x 8 nodes per axis after a smoothstep
/// substitution); std_error holds |fine - coarse| against a 32-panel rule.
Estimate parametric_megc_quadrature(const CopulaModel& copula, std::span<const MarginalModel> margins,
                                    std::size_t threads = 0);

/// Closed form under independence from the marginal Ginis.
double independence_megc(std::span<const double> ginis);

}  // namespace mvlorenz
