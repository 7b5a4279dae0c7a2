#include <atomic>
#include <cstdlib>
#include <cstring>

#include "mvlorenz/kernels.hpp"

namespace mvlorenz::kernels {
namespace {

Isa probe() noexcept {
#if defined(MVLORENZ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa initial() noexcept {
  const Isa detected = probe();
  // MVLORENZ_ISA=scalar pins the reference path for the whole process.
  if (const char* env = std::getenv("MVLORENZ_ISA"); env != nullptr && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  return detected;
}

std::atomic<Isa>& selected() noexcept {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() noexcept {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

void set_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
  selected().store(isa, std::memory_order_relaxed);
}

void reset_isa() noexcept { selected().store(initial(), std::memory_order_relaxed); }

#if defined(MVLORENZ_HAVE_AVX2)
#define MVLORENZ_DISPATCH(fn, ...) \
  (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define MVLORENZ_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double complement_product_sum(Columns cols, std::span<const double> w) {
  return MVLORENZ_DISPATCH(complement_product_sum, cols, w);
}

double dominated_weight(Columns cols, std::span<const double> w, std::span<const double> bound) {
  return MVLORENZ_DISPATCH(dominated_weight, cols, w, bound);
}

double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  return MVLORENZ_DISPATCH(weighted_dot, a, b, w);
}

double weighted_sum(std::span<const double> x, std::span<const double> w) {
  return MVLORENZ_DISPATCH(weighted_sum, x, w);
}

#undef MVLORENZ_DISPATCH

}  // namespace mvlorenz::kernels
