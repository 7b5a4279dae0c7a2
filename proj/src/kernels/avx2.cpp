// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include "mvlorenz/kernels.hpp"
#include "mvlorenz/summation.hpp"

namespace mvlorenz::kernels::avx2 {
namespace {

// Four independent TwoSum accumulators, one per lane.
struct VecSum {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d s = _mm256_add_pd(sum, x);
    const __m256d bp = _mm256_sub_pd(s, sum);
    const __m256d err =
        _mm256_add_pd(_mm256_sub_pd(sum, _mm256_sub_pd(s, bp)), _mm256_sub_pd(x, bp));
    comp = _mm256_add_pd(comp, err);
    sum = s;
  }

  // Lanes folded in index order, then the scalar tail.
  double finish(const CompensatedSum& tail) const {
    alignas(32) double s[4];
    alignas(32) double c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    CompensatedSum acc;
    for (int k = 0; k < 4; ++k) acc.add(s[k]);
    for (int k = 0; k < 4; ++k) acc.add(c[k]);
    acc.merge(tail);
    return acc.value();
  }
};

constexpr std::size_t kLanes = 4;

}  // namespace

double complement_product_sum(Columns cols, std::span<const double> w) {
  const std::size_t n = w.size();
  const std::size_t body = n - n % kLanes;
  const __m256d one = _mm256_set1_pd(1.0);
  VecSum acc;
  for (std::size_t j = 0; j < body; j += kLanes) {
    __m256d p = _mm256_loadu_pd(w.data() + j);
    for (const auto& c : cols) p = _mm256_mul_pd(p, _mm256_sub_pd(one, _mm256_loadu_pd(c.data() + j)));
    acc.add(p);
  }
  CompensatedSum tail;
  for (std::size_t j = body; j < n; ++j) {
    double p = w[j];
    for (const auto& c : cols) p *= 1.0 - c[j];
    tail.add(p);
  }
  return acc.finish(tail);
}

double dominated_weight(Columns cols, std::span<const double> w, std::span<const double> bound) {
  const std::size_t n = w.size();
  const std::size_t body = n - n % kLanes;
  VecSum acc;
  for (std::size_t j = 0; j < body; j += kLanes) {
    __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const __m256d x = _mm256_loadu_pd(cols[i].data() + j);
      mask = _mm256_and_pd(mask, _mm256_cmp_pd(x, _mm256_set1_pd(bound[i]), _CMP_LE_OQ));
    }
    acc.add(_mm256_and_pd(mask, _mm256_loadu_pd(w.data() + j)));
  }
  CompensatedSum tail;
  for (std::size_t j = body; j < n; ++j) {
    bool inside = true;
    for (std::size_t i = 0; i < cols.size(); ++i) inside = inside && cols[i][j] <= bound[i];
    if (inside) tail.add(w[j]);
  }
  return acc.finish(tail);
}

double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  const std::size_t n = w.size();
  const std::size_t body = n - n % kLanes;
  VecSum acc;
  for (std::size_t j = 0; j < body; j += kLanes) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w.data() + j), _mm256_loadu_pd(a.data() + j));
    acc.add(_mm256_mul_pd(wa, _mm256_loadu_pd(b.data() + j)));
  }
  CompensatedSum tail;
  for (std::size_t j = body; j < n; ++j) tail.add(w[j] * a[j] * b[j]);
  return acc.finish(tail);
}

double weighted_sum(std::span<const double> x, std::span<const double> w) {
  const std::size_t n = w.size();
  const std::size_t body = n - n % kLanes;
  VecSum acc;
  for (std::size_t j = 0; j < body; j += kLanes)
    acc.add(_mm256_mul_pd(_mm256_loadu_pd(w.data() + j), _mm256_loadu_pd(x.data() + j)));
  CompensatedSum tail;
  for (std::size_t j = body; j < n; ++j) tail.add(w[j] * x[j]);
  return acc.finish(tail);
}

}  // namespace mvlorenz::kernels::avx2
