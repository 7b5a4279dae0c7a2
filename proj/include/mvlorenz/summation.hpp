#pragma once

#include <span>

namespace mvlorenz {

/// Running sum with an error-free TwoSum correction term. The correction
/// captures the rounding error of every addition, so the result is accurate
/// to about one ulp of the true sum regardless of magnitude ordering.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double s = sum_ + x;
    const double bp = s - sum_;
    comp_ += (sum_ - (s - bp)) + (x - bp);
    sum_ = s;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    comp_ += other.comp_;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace mvlorenz
