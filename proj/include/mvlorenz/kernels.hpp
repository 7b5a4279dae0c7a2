#pragma once

// Row-reduction kernels behind the empirical estimators. Every kernel has a
// portable scalar reference in namespace `scalar` and, on x86-64, an AVX2
// variant in namespace `avx2`. The unqualified entry points dispatch at run
// time on the detected ISA (overridable for tests and benchmarks).
//
// Column data is passed as one span per dimension, all of equal length n,
// with a weight span of the same length. All sums are compensated.

#include <cstddef>
#include <span>
#include <string_view>

namespace mvlorenz::kernels {

using Columns = std::span<const std::span<const double>>;

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// ISA selected for the dispatched entry points.
Isa active_isa() noexcept;
/// Best ISA this CPU supports.
Isa detected_isa() noexcept;
/// Forces an ISA; requesting one the CPU cannot run falls back to scalar.
void set_isa(Isa isa) noexcept;
/// Returns to automatic detection.
void reset_isa() noexcept;

// sum_j w_j * prod_i (1 - x_ij)
double complement_product_sum(Columns cols, std::span<const double> w);
// sum_j w_j * [x_ij <= bound_i for all i]
double dominated_weight(Columns cols, std::span<const double> w, std::span<const double> bound);
// sum_j w_j * a_j * b_j
double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w);
// sum_j w_j * x_j
double weighted_sum(std::span<const double> x, std::span<const double> w);

namespace scalar {
double complement_product_sum(Columns cols, std::span<const double> w);
double dominated_weight(Columns cols, std::span<const double> w, std::span<const double> bound);
double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w);
double weighted_sum(std::span<const double> x, std::span<const double> w);
}  // namespace scalar

#if defined(MVLORENZ_HAVE_AVX2)
namespace avx2 {
double complement_product_sum(Columns cols, std::span<const double> w);
double dominated_weight(Columns cols, std::span<const double> w, std::span<const double> bound);
double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w);
double weighted_sum(std::span<const double> x, std::span<const double> w);
}  // namespace avx2
#endif

}  // namespace mvlorenz::kernels
