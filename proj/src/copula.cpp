#include "mvlorenz/copula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "mvlorenz/error.hpp"
#include "mvlorenz/meilc.hpp"
#include "mvlorenz/parallel.hpp"
#include "mvlorenz/rng.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kSampleBlock = 4096;

void check_unit_point(std::span<const double> u, std::size_t dim) {
  if (u.size() != dim)
    throw Error(ErrorKind::dimension_mismatch,
                "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(u.size()));
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::out_of_range, "copula argument must lie in [0,1]^d");
}

// Cholesky factor of the d x d equicorrelation matrix, row-major lower.
std::vector<double> equicorrelation_cholesky(std::size_t d, double r) {
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = (i == j) ? 1.0 : r;
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      l[i * d + j] = (i == j) ? std::sqrt(s) : s / l[j * d + j];
    }
  }
  return l;
}

// Clayton C for the active coordinates, in log space so that u^-theta
// cannot overflow.
double clayton_cdf(std::span<const double> u, double theta) {
  double tmax = -kInf;
  for (double x : u) tmax = std::max(tmax, -theta * std::log(x));
  double s = 0.0;
  for (double x : u) s += std::exp(-theta * std::log(x) - tmax);
  s -= static_cast<double>(u.size() - 1) * std::exp(-tmax);
  return std::exp(-(tmax + std::log(s)) / theta);
}

double gumbel_cdf(std::span<const double> u, double theta) {
  double s = 0.0;
  for (double x : u) s += std::pow(-std::log(x), theta);
  return std::exp(-std::pow(s, 1.0 / theta));
}

// Draws one d-vector of copula uniforms.
class Sampler {
 public:
  explicit Sampler(const CopulaModel& model) : model_(model) {
    if (model.family() == CopulaFamily::gaussian) chol_ = equicorrelation_cholesky(model.dim(), model.parameter());
  }

  void draw(Philox& rng, double* out) {
    const std::size_t d = model_.dim();
    const double theta = model_.parameter();
    switch (model_.family()) {
      case CopulaFamily::independence:
        for (std::size_t i = 0; i < d; ++i) out[i] = rng.uniform();
        return;
      case CopulaFamily::comonotone: {
        const double u = rng.uniform();
        for (std::size_t i = 0; i < d; ++i) out[i] = u;
        return;
      }
      case CopulaFamily::countermonotone: {
        const double u = rng.uniform();
        out[0] = u;
        out[1] = 1.0 - u;
        return;
      }
      case CopulaFamily::gaussian: {
        z_.resize(d);
        for (std::size_t i = 0; i < d; ++i) z_[i] = rng.normal();
        for (std::size_t i = 0; i < d; ++i) {
          double s = 0.0;
          for (std::size_t k = 0; k <= i; ++k) s += chol_[i * d + k] * z_[k];
          out[i] = normal_cdf(s);
        }
        return;
      }
      case CopulaFamily::clayton: {
        // Gamma frailty: U_i = (1 + E_i / V)^(-1/theta), V ~ Gamma(1/theta).
        const double v = rng.gamma(1.0 / theta);
        for (std::size_t i = 0; i < d; ++i) out[i] = std::pow(1.0 + rng.exponential() / v, -1.0 / theta);
        return;
      }
      case CopulaFamily::gumbel: {
        // Positive-stable frailty via Kanter's representation, alpha = 1/theta.
        const double alpha = 1.0 / theta;
        double s = 1.0;
        if (alpha < 1.0) {
          const double phi = std::numbers::pi * rng.uniform();
          const double w = rng.exponential();
          s = std::sin(alpha * phi) / std::pow(std::sin(phi), 1.0 / alpha) *
              std::pow(std::sin((1.0 - alpha) * phi) / w, (1.0 - alpha) / alpha);
        }
        for (std::size_t i = 0; i < d; ++i) out[i] = std::exp(-std::pow(rng.exponential() / s, alpha));
        return;
      }
    }
  }

 private:
  const CopulaModel& model_;
  std::vector<double> chol_;
  std::vector<double> z_;
};

// Gauss-Legendre panels on [0,1] after the smoothstep substitution
// u = 3x^2 - 2x^3, which flattens corner singularities at both ends.
struct QuadratureAxis {
  std::vector<double> u;       // substituted nodes
  std::vector<double> weight;  // rule weight times Jacobian
};

QuadratureAxis smoothstep_axis(std::size_t panels) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> xi;
  std::vector<double> wi;
  for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
    const double a = Rule::abscissa()[k];
    const double w = Rule::weights()[k];
    if (a == 0.0) {
      xi.push_back(0.0);
      wi.push_back(w);
    } else {
      xi.push_back(-a);
      wi.push_back(w);
      xi.push_back(a);
      wi.push_back(w);
    }
  }
  QuadratureAxis axis;
  const double h = 1.0 / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    for (std::size_t k = 0; k < xi.size(); ++k) {
      const double x = (static_cast<double>(p) + 0.5 * (1.0 + xi[k])) * h;
      axis.u.push_back(x * x * (3.0 - 2.0 * x));
      axis.weight.push_back(0.5 * h * wi[k] * 6.0 * x * (1.0 - x));
    }
  }
  return axis;
}

// integral over [0,1]^2 of f(u, v) on a tensor rule, rows summed in order.
template <class F>
double tensor_integral(const QuadratureAxis& axis, F&& f, std::size_t threads = 1) {
  const std::size_t m = axis.u.size();
  std::vector<double> rows(m);
  parallel_for(m, resolve_threads(threads), [&](std::size_t a) {
    CompensatedSum s;
    for (std::size_t b = 0; b < m; ++b) s.add(axis.weight[b] * f(a, b));
    rows[a] = axis.weight[a] * s.value();
  });
  return compensated_sum(rows);
}

double archimedean_spearman(CopulaFamily family, double theta) {
  static const QuadratureAxis axis = smoothstep_axis(64);
  const std::size_t m = axis.u.size();
  std::vector<double> t(m);
  for (std::size_t a = 0; a < m; ++a)
    t[a] = family == CopulaFamily::clayton ? -theta * std::log(axis.u[a]) : std::pow(-std::log(axis.u[a]), theta);
  const double integral = tensor_integral(axis, [&](std::size_t a, std::size_t b) {
    if (family == CopulaFamily::clayton) {
      const double hi = std::max(t[a], t[b]);
      const double lo = std::min(t[a], t[b]);
      return std::exp(-(hi + std::log1p(std::exp(lo - hi) - std::exp(-hi))) / theta);
    }
    return std::exp(-std::pow(t[a] + t[b], 1.0 / theta));
  });
  return 12.0 * integral - 3.0;
}

}  // namespace

std::string_view to_string(CopulaFamily family) noexcept {
  switch (family) {
    case CopulaFamily::independence: return "independence";
    case CopulaFamily::comonotone: return "comonotone";
    case CopulaFamily::countermonotone: return "countermonotone";
    case CopulaFamily::gaussian: return "gaussian";
    case CopulaFamily::clayton: return "clayton";
    case CopulaFamily::gumbel: return "gumbel";
  }
  return "unknown";
}

CopulaFamily parse_family(std::string_view raw) {
  std::string name(raw);
  for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (name == "independence" || name == "pi") return CopulaFamily::independence;
  if (name == "comonotone" || name == "m") return CopulaFamily::comonotone;
  if (name == "countermonotone" || name == "w") return CopulaFamily::countermonotone;
  if (name == "gaussian") return CopulaFamily::gaussian;
  if (name == "clayton") return CopulaFamily::clayton;
  if (name == "gumbel") return CopulaFamily::gumbel;
  throw Error(ErrorKind::unsupported_family, "unknown copula family '" + std::string(raw) + "'");
}

CopulaModel::CopulaModel(CopulaFamily family, std::size_t dim, double parameter)
    : family_(family), dim_(dim), parameter_(parameter) {
  if (dim < 2) throw Error(ErrorKind::unsupported_dimension, "copulas need d >= 2");
  if (!std::isfinite(parameter)) throw Error(ErrorKind::parameter_out_of_domain, "parameter must be finite");
  switch (family) {
    case CopulaFamily::countermonotone:
      if (dim != 2) throw Error(ErrorKind::unsupported_dimension, "countermonotone copula exists only for d = 2");
      break;
    case CopulaFamily::gaussian: {
      const double lo = -1.0 / static_cast<double>(dim - 1);
      if (!(parameter > lo && parameter < 1.0))
        throw Error(ErrorKind::parameter_out_of_domain,
                    "gaussian correlation must lie in (" + std::to_string(lo) + ", 1)");
      break;
    }
    case CopulaFamily::clayton:
      if (!(parameter > 0.0)) throw Error(ErrorKind::parameter_out_of_domain, "clayton theta must be > 0");
      break;
    case CopulaFamily::gumbel:
      if (!(parameter >= 1.0)) throw Error(ErrorKind::parameter_out_of_domain, "gumbel theta must be >= 1");
      break;
    default:
      break;
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * (0.5 * std::numbers::sqrt2)); }

double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bivariate_normal_cdf(double a, double b, double r) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  if (a == -kInf || b == -kInf) return 0.0;
  if (a == kInf) return normal_cdf(b);
  if (b == kInf) return normal_cdf(a);
  if (r == 0.0) return normal_cdf(a) * normal_cdf(b);
  // Symmetric in (a, b); integrate over the shorter range.
  const double hi = std::min(a, b);
  const double other = std::max(a, b);
  constexpr double lo = -10.0;  // Phi(-10) ~ 7.6e-24
  if (hi <= lo) return 0.0;
  const double s = std::sqrt(1.0 - r * r);
  auto f = [&](double x) {
    constexpr double inv_sqrt_2pi = std::numbers::inv_sqrtpi * (0.5 * std::numbers::sqrt2);
    return inv_sqrt_2pi * std::exp(-0.5 * x * x) * normal_cdf((other - r * x) / s);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-13);
}

namespace {

// Every point of a d >= 3 gaussian surface is read off the same full-dimension
// sample (coordinates at 1 always pass), so the estimates form an exact
// empirical distribution function and stay monotone.
Estimate gaussian_cdf_mc(const CopulaModel& model, std::span<const double> u, const McOptions& mc) {
  if (std::any_of(u.begin(), u.end(), [](double x) { return x == 0.0; })) return {0.0, 0.0};
  if (std::all_of(u.begin(), u.end(), [](double x) { return x == 1.0; })) return {1.0, 0.0};
  const std::size_t d = model.dim();
  const auto draws = copula_sample(model, mc.count, mc.seed, mc.threads);
  CompensatedSum hits;
  for (std::size_t k = 0; k < mc.count; ++k) {
    bool inside = true;
    for (std::size_t i = 0; i < d; ++i) inside = inside && draws[k * d + i] <= u[i];
    if (inside) hits.add(1.0);
  }
  const double n = static_cast<double>(mc.count);
  const double p = hits.value() / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace

Estimate copula_cdf_estimate(const CopulaModel& model, std::span<const double> u, const McOptions& mc) {
  check_unit_point(u, model.dim());
  if (model.family() == CopulaFamily::gaussian && model.dim() >= 3) return gaussian_cdf_mc(model, u, mc);
  std::vector<double> active;
  for (double x : u) {
    if (x == 0.0) return {0.0, 0.0};
    if (x < 1.0) active.push_back(x);
  }
  if (active.empty()) return {1.0, 0.0};
  if (active.size() == 1) return {active.front(), 0.0};

  const double theta = model.parameter();
  switch (model.family()) {
    case CopulaFamily::independence: {
      double p = 1.0;
      for (double x : active) p *= x;
      return {p, 0.0};
    }
    case CopulaFamily::comonotone:
      return {*std::min_element(active.begin(), active.end()), 0.0};
    case CopulaFamily::countermonotone:
      return {std::max(0.0, active[0] + active[1] - 1.0), 0.0};
    case CopulaFamily::clayton:
      return {clayton_cdf(active, theta), 0.0};
    case CopulaFamily::gumbel:
      return {gumbel_cdf(active, theta), 0.0};
    case CopulaFamily::gaussian:
      break;
  }

  return {std::clamp(bivariate_normal_cdf(normal_quantile(active[0]), normal_quantile(active[1]), theta), 0.0,
                     std::min(active[0], active[1])),
          0.0};
}

double copula_cdf(const CopulaModel& model, std::span<const double> u, const McOptions& mc) {
  return copula_cdf_estimate(model, u, mc).value;
}

std::vector<double> copula_sample(const CopulaModel& model, std::size_t count, std::uint64_t seed,
                                  std::size_t threads) {
  if (count == 0) throw Error(ErrorKind::invalid_argument, "sample count must be >= 1");
  const std::size_t d = model.dim();
  std::vector<double> out(count * d);
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  parallel_for(blocks, resolve_threads(threads), [&](std::size_t b) {
    Philox rng(seed, b);
    Sampler sampler(model);
    const std::size_t end = std::min(count, (b + 1) * kSampleBlock);
    for (std::size_t k = b * kSampleBlock; k < end; ++k) sampler.draw(rng, out.data() + k * d);
  });
  return out;
}

double param_to_spearman(const CopulaModel& model) {
  if (model.dim() != 2) throw Error(ErrorKind::unsupported_dimension, "Spearman's rho is defined here for d = 2");
  switch (model.family()) {
    case CopulaFamily::independence: return 0.0;
    case CopulaFamily::comonotone: return 1.0;
    case CopulaFamily::countermonotone: return -1.0;
    case CopulaFamily::gaussian: return 6.0 / std::numbers::pi * std::asin(model.parameter() / 2.0);
    case CopulaFamily::clayton:
    case CopulaFamily::gumbel:
      if (model.family() == CopulaFamily::gumbel && model.parameter() == 1.0) return 0.0;
      return archimedean_spearman(model.family(), model.parameter());
  }
  return 0.0;
}

double spearman_to_param(CopulaFamily family, double rho_s) {
  if (!std::isfinite(rho_s)) throw Error(ErrorKind::unattainable, "rho must be finite");
  if (family == CopulaFamily::gaussian) {
    if (!(rho_s > -1.0 && rho_s < 1.0)) throw Error(ErrorKind::unattainable, "gaussian rho must lie in (-1,1)");
    return 2.0 * std::sin(std::numbers::pi * rho_s / 6.0);
  }
  if (family != CopulaFamily::clayton && family != CopulaFamily::gumbel)
    throw Error(ErrorKind::unsupported_family,
                "family '" + std::string(to_string(family)) + "' has no free dependence parameter");

  static std::mutex cache_mutex;
  static std::map<std::pair<int, double>, double> cache;
  const auto key = std::make_pair(static_cast<int>(family), rho_s);
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  double lo = family == CopulaFamily::clayton ? 1e-6 : 1.0 + 1e-6;
  double hi = 50.0;
  auto rho = [&](double theta) { return archimedean_spearman(family, theta); };
  if (!(rho_s > rho(lo) && rho_s < rho(hi)))
    throw Error(ErrorKind::unattainable, "Spearman's rho " + std::to_string(rho_s) + " is outside the range of the " +
                                             std::string(to_string(family)) + " family");
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double r = rho(mid);
    if (std::abs(r - rho_s) <= 1e-9 || hi - lo <= 1e-13 * hi) break;
    (r < rho_s ? lo : hi) = mid;
  }
  std::lock_guard lock(cache_mutex);
  cache.emplace(key, mid);
  return mid;
}

MarginalModel MarginalModel::power(double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0))
    throw Error(ErrorKind::parameter_out_of_domain, "power margin exponent must lie in (0,1]");
  return MarginalModel(exponent, std::nullopt);
}

MarginalModel MarginalModel::empirical(LorenzCurve curve) { return MarginalModel(0.0, std::move(curve)); }

double MarginalModel::inverse_lorenz(double u) const {
  if (curve_) return inverse_lorenz_eval(*curve_, u);
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::out_of_range, "argument must lie in [0,1]");
  return exponent_ == 1.0 ? u : std::pow(u, exponent_);
}

double MarginalModel::lorenz(double s) const {
  if (curve_) return lorenz_eval(*curve_, s);
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::out_of_range, "argument must lie in [0,1]");
  return exponent_ == 1.0 ? s : std::pow(s, 1.0 / exponent_);
}

double MarginalModel::gini() const {
  if (!curve_) return (1.0 - exponent_) / (1.0 + exponent_);
  const auto& u = curve_->knots_u();
  const auto& s = curve_->knots_s();
  CompensatedSum area;
  for (std::size_t k = 1; k < u.size(); ++k) area.add(0.5 * (u[k] - u[k - 1]) * (s[k] + s[k - 1]));
  return 1.0 - 2.0 * area.value();
}

double parametric_meilc(const CopulaModel& copula, std::span<const MarginalModel> margins, std::span<const double> u,
                        const McOptions& mc) {
  if (margins.size() != copula.dim())
    throw Error(ErrorKind::dimension_mismatch, "need one margin per copula dimension");
  check_unit_point(u, copula.dim());
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = margins[i].inverse_lorenz(u[i]);
  return copula_cdf(copula, v, mc);
}

Estimate parametric_megc_mc(const CopulaModel& copula, std::span<const MarginalModel> margins, const McOptions& mc) {
  if (margins.size() != copula.dim())
    throw Error(ErrorKind::dimension_mismatch, "need one margin per copula dimension");
  if (mc.count < 1000) throw Error(ErrorKind::invalid_argument, "Monte Carlo needs at least 1000 draws");
  const std::size_t d = copula.dim();
  const std::size_t blocks = (mc.count + kSampleBlock - 1) / kSampleBlock;
  std::vector<CompensatedSum> sums(blocks);
  std::vector<CompensatedSum> squares(blocks);
  parallel_for(blocks, resolve_threads(mc.threads), [&](std::size_t b) {
    Philox rng(mc.seed, b);
    Sampler sampler(copula);
    std::vector<double> u(d);
    const std::size_t end = std::min(mc.count, (b + 1) * kSampleBlock);
    for (std::size_t k = b * kSampleBlock; k < end; ++k) {
      sampler.draw(rng, u.data());
      double p = 1.0;
      for (std::size_t i = 0; i < d; ++i) p *= 1.0 - margins[i].lorenz(u[i]);
      sums[b].add(p);
      squares[b].add(p * p);
    }
  });
  CompensatedSum sum;
  CompensatedSum sq;
  for (std::size_t b = 0; b < blocks; ++b) {
    sum.merge(sums[b]);
    sq.merge(squares[b]);
  }
  const double n = static_cast<double>(mc.count);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, (sq.value() - n * mean * mean) / (n - 1.0));
  const double f = factorial_plus_one(d);
  return {(f * mean - 1.0) / (f - 1.0), f / (f - 1.0) * std::sqrt(var / n)};
}

Estimate parametric_megc_quadrature(const CopulaModel& copula, std::span<const MarginalModel> margins,
                                    std::size_t threads) {
  if (copula.dim() != 2) throw Error(ErrorKind::unsupported_dimension, "quadrature path supports d = 2 only");
  if (margins.size() != 2) throw Error(ErrorKind::dimension_mismatch, "need one margin per copula dimension");

  auto integrate = [&](std::size_t panels) {
    const QuadratureAxis axis = smoothstep_axis(panels);
    const std::size_t m = axis.u.size();
    std::vector<double> v1(m);
    std::vector<double> v2(m);
    for (std::size_t a = 0; a < m; ++a) {
      v1[a] = margins[0].inverse_lorenz(axis.u[a]);
      v2[a] = margins[1].inverse_lorenz(axis.u[a]);
    }
    if (copula.family() == CopulaFamily::gaussian) {
      std::vector<double> q1(m);
      std::vector<double> q2(m);
      for (std::size_t a = 0; a < m; ++a) {
        q1[a] = normal_quantile(v1[a]);
        q2[a] = normal_quantile(v2[a]);
      }
      const double r = copula.parameter();
      return tensor_integral(
          axis, [&](std::size_t a, std::size_t b) { return bivariate_normal_cdf(q1[a], q2[b], r); }, threads);
    }
    return tensor_integral(
        axis,
        [&](std::size_t a, std::size_t b) {
          const double uv[2] = {v1[a], v2[b]};
          return copula_cdf(copula, uv);
        },
        threads);
  };

  const double fine = integrate(64);
  const double coarse = integrate(32);
  return {(6.0 * fine - 1.0) / 5.0, 1.2 * std::abs(fine - coarse)};
}

double independence_megc(std::span<const double> ginis) {
  if (ginis.empty()) throw Error(ErrorKind::invalid_argument, "need at least one marginal Gini");
  double p = 1.0;
  for (double g : ginis) {
    if (!(g >= 0.0 && g <= 1.0)) throw Error(ErrorKind::out_of_range, "marginal Ginis must lie in [0,1]");
    p *= 0.5 * (1.0 + g);
  }
  const double f = factorial_plus_one(ginis.size());
  return (f * p - 1.0) / (f - 1.0);
}

}  // namespace mvlorenz
