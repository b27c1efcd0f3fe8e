#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace martlab {

// Compensated summation. Long event-driven paths accumulate up to 1e8 terms,
// where naive summation loses several digits.
class KahanSum {
 public:
  void add(double x) {
    double y = x - carry_;
    double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }
  void reset() { sum_ = 0.0; carry_ = 0.0; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Streaming mean/variance (Welford). merge() is associative, so partial
// accumulators from different workers can be combined in any grouping.
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const MeanAccumulator& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) { *this = other; return; }
    double na = static_cast<double>(n_);
    double nb = static_cast<double>(other.n_);
    double d = other.mean_ - mean_;
    mean_ += d * nb / (na + nb);
    m2_ += other.m2_ + d * d * na * nb / (na + nb);
    n_ += other.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double std_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Median of a sample set (average of the two middle order statistics for
// even sizes). Takes a copy: callers keep their sample order.
inline double sample_median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample set");
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (v[mid - 1] + hi);
}

// Weights c_i such that the OLS intercept of y against x equals sum c_i y_i.
// Exposed so estimators can propagate per-sample noise through the fit.
inline std::vector<double> ols_intercept_weights(const std::vector<double>& x) {
  if (x.size() < 3) {
    throw std::invalid_argument("extrapolation needs at least 3 grid points");
  }
  double n = static_cast<double>(x.size());
  double xbar = 0.0;
  for (double xi : x) xbar += xi;
  xbar /= n;
  double sxx = 0.0;
  for (double xi : x) sxx += (xi - xbar) * (xi - xbar);
  if (sxx <= 0.0) {
    throw std::invalid_argument("extrapolation grid is degenerate");
  }
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    c[i] = 1.0 / n - xbar * (x[i] - xbar) / sxx;
  }
  return c;
}

}  // namespace martlab
