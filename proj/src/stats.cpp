#include "rdelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdelab::stats {

MeanEstimate summarize(std::span<const double> samples) {
  MeanEstimate out;
  out.count = samples.size();
  if (samples.empty()) {
    return out;
  }
  double sum = 0.0;
  for (double v : samples) {
    sum += v;
  }
  out.mean = sum / static_cast<double>(samples.size());
  if (samples.size() < 2) {
    return out;
  }
  double ss = 0.0;
  for (double v : samples) {
    ss += (v - out.mean) * (v - out.mean);
  }
  const double n = static_cast<double>(samples.size());
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

namespace {

double ks_sorted(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return ks_sorted(sorted, cdf);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) {
    return 1.0;
  }
  if (lambda < 0.2) {
    // Series converges too slowly here; the survival is 1 to double precision.
    return 1.0;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) {
      break;
    }
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_value(double statistic, std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("ks_p_value: n must be positive");
  }
  const double rn = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * statistic);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("ks_critical_value: alpha must lie in (0,1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ks_p_value(mid, n) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

EmpiricalLaw::EmpiricalLaw(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) {
    throw std::invalid_argument("EmpiricalLaw: empty sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalLaw::cdf(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalLaw::ks_distance(const std::function<double(double)>& reference_cdf) const {
  return ks_sorted(sorted_, reference_cdf);
}

}  // namespace rdelab::stats
