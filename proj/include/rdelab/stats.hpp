#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rdelab::stats {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

// Sample mean and standard error (n-1 denominator). Summation runs in index
// order so results do not depend on how the samples were produced.
MeanEstimate summarize(std::span<const double> samples);

// sup_x |F_n(x) - F(x)| for the empirical law of `samples`.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

// Asymptotic p-value with Stephens' small-sample correction.
double ks_p_value(double statistic, std::size_t n);

// Smallest D with ks_p_value(D, n) <= alpha.
double ks_critical_value(std::size_t n, double alpha);

// Sorted copy of the samples with tail(x) = fraction of samples > x.
class EmpiricalLaw {
 public:
  explicit EmpiricalLaw(std::vector<double> samples);

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

  double cdf(double x) const;
  double tail(double x) const { return 1.0 - cdf(x); }

  // Two-sided KS distance to a continuous reference cdf.
  double ks_distance(const std::function<double(double)>& reference_cdf) const;

 private:
  std::vector<double> sorted_;
};

}  // namespace rdelab::stats
