#include "rdelab/operators.hpp"

#include <algorithm>
#include <cmath>

#include "rdelab/logistic.hpp"
#include "rdelab/rng.hpp"
#include "rdelab/text.hpp"

namespace rdelab {

namespace {

void require_symmetric(const RealGrid& grid, const char* who) {
  if (!grid.is_symmetric()) {
    throw std::invalid_argument(std::string(who) + ": grid must be symmetric about 0 with odd size");
  }
}

// int_{x_max}^inf (Hbar - f) under f's closure.
double difference_closure_mass(const TailFunction& f) {
  const double b = f.grid().x_max();
  switch (f.closure()) {
    case TailClosure::logistic_squeeze:
      // Hbar - [(1-l) Hbar^2 + l Hbar] = (1-l) Hbar H, and int_b^inf Hbar H = Hbar(b).
      return (1.0 - f.squeeze_weight()) * logistic::tail(b);
    case TailClosure::zero_right:
      return logistic::tail_integral_right(b);
    case TailClosure::constant:
      if (f.values().back() != 0.0) {
        throw QuadratureError("apply_T: constant closure is not integrable");
      }
      return logistic::tail_integral_right(b);
  }
  return 0.0;
}

}  // namespace

std::vector<double> normalized_T(const TailFunction& f, const QuadratureSpec& quadrature) {
  quadrature.validate();
  const RealGrid& grid = f.grid();
  require_symmetric(grid, "apply_T");
  const std::size_t n = grid.size();
  std::vector<double> difference(n);
  for (std::size_t k = 0; k < n; ++k) {
    difference[k] = logistic::tail(grid.node(k)) - f.value(k);
  }
  const auto cumulative = cumulative_from_right(difference, grid.step(), quadrature.rule);
  const double closure = difference_closure_mass(f);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    // -node(k) == node(n-1-k) exactly on a symmetric grid.
    out[k] = std::exp(-(cumulative[n - 1 - k] + closure));
  }
  return out;
}

std::vector<double> normalized_A(const TailFunction& f, const QuadratureSpec& quadrature) {
  const RealGrid& grid = f.grid();
  require_symmetric(grid, "apply_A");
  const auto cumulative = cumulative_right(f, quadrature);
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = std::exp(-cumulative[n - 1 - k]) / logistic::tail(grid.node(k));
  }
  return out;
}

double identity_residual(const TailFunction& f, const QuadratureSpec& quadrature) {
  const auto t = normalized_T(f, quadrature);
  const auto a = normalized_A(f, quadrature);
  double worst = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    worst = std::max(worst, std::fabs(t[k] * a[k] - 1.0));
  }
  return worst;
}

TailFunction apply_T(const TailFunction& f, const OperatorOptions& options) {
  if (auto violation = f.find_envelope_violation(options.envelope_slack)) {
    throw EnvelopeError(*violation);
  }
  auto out = normalized_T(f, options.quadrature);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] *= logistic::tail(f.grid().node(k));
  }
  return TailFunction(f.grid(), std::move(out), TailClosure::logistic_squeeze);
}

TailFunction apply_A(const TailFunction& f, const QuadratureSpec& quadrature) {
  const RealGrid& grid = f.grid();
  require_symmetric(grid, "apply_A");
  const auto cumulative = cumulative_right(f, quadrature);
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = std::exp(-cumulative[n - 1 - k]);
  }
  return TailFunction(grid, std::move(out), TailClosure::logistic_squeeze);
}

double sup_distance(const TailFunction& a, const TailFunction& b) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument("sup_distance: grids differ");
  }
  double d = 0.0;
  for (std::size_t k = 0; k < a.grid().size(); ++k) {
    d = std::max(d, std::fabs(a.value(k) - b.value(k)));
  }
  return d;
}

double sup_distance_to_logistic_tail(const TailFunction& f) {
  double d = 0.0;
  for (std::size_t k = 0; k < f.grid().size(); ++k) {
    d = std::max(d, std::fabs(f.value(k) - logistic::tail(f.grid().node(k))));
  }
  return d;
}

IterationTrajectory iterate_to_fixed_point(const TailFunction& seed, std::size_t max_iters,
                                           double tolerance, const OperatorOptions& options) {
  if (max_iters == 0) {
    throw std::invalid_argument("iterate_to_fixed_point: max_iters must be positive");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("iterate_to_fixed_point: tolerance must be positive");
  }
  IterationTrajectory trajectory;
  trajectory.iterates.push_back({0, seed, sup_distance_to_logistic_tail(seed)});
  for (std::size_t n = 0; n < max_iters; ++n) {
    const TailFunction& current = trajectory.iterates.back().function;
    TailFunction next = apply_T(current, options);
    const double step = sup_distance(current, next);
    const double to_fixed_point = sup_distance_to_logistic_tail(next);
    trajectory.iterates.push_back({n + 1, std::move(next), to_fixed_point});
    trajectory.last_step_distance = step;
    if (step < tolerance) {
      trajectory.converged = true;
      trajectory.converged_index = n;
      break;
    }
  }
  return trajectory;
}

TailFunction envelope_mixture(const RealGrid& grid, const std::function<double(double)>& lambda) {
  return TailFunction::sample(grid, [&](double x) {
    const double upper = logistic::tail(x);
    const double l = std::clamp(lambda(x), 0.0, 1.0);
    return l * upper * upper + (1.0 - l) * upper;
  });
}

TailFunction random_envelope_member(const RealGrid& grid, std::uint64_t key) {
  rng::CounterStream u(rng::derive(key, 0x656e76ULL));
  double lo = u();
  double hi = u();
  if (lo > hi) std::swap(lo, hi);
  const double centre = -5.0 + 10.0 * u();
  const double width = 0.3 + 2.7 * u();
  return envelope_mixture(grid, [=](double x) {
    return lo + (hi - lo) * logistic::cdf((x - centre) / width);
  });
}

TailFunction random_admissible_tail(const RealGrid& grid, std::uint64_t key, std::string* family) {
  rng::CounterStream u(rng::derive(key, 0x616473ULL));
  const auto kind = static_cast<int>(u() * 4.0);
  const double location = -3.0 + 6.0 * u();
  const double scale = 0.3 + 1.2 * u();
  std::function<double(double)> tail;
  std::string name;
  switch (kind) {
    case 0:
      tail = [=](double x) { return logistic::tail((x - location) / scale); };
      name = "logistic";
      break;
    case 1:
      tail = [=](double x) { return 0.5 * std::erfc((x - location) / (scale * std::sqrt(2.0))); };
      name = "normal";
      break;
    case 2:
      tail = [=](double x) { return x <= location ? 1.0 : std::exp(-(x - location) / scale); };
      name = "shifted-exponential";
      break;
    default: {
      const double weight = u();
      const double second = -3.0 + 6.0 * u();
      tail = [=](double x) {
        return weight * logistic::tail((x - location) / scale) +
               (1.0 - weight) * logistic::tail(x - second);
      };
      name = "logistic-mixture";
      break;
    }
  }
  if (family) {
    *family = name + "(" + text::format_double(location) + "," + text::format_double(scale) + ")";
  }
  return TailFunction::sample(grid, tail);
}

BivariateTailEstimate bivariate_gamma_tail_estimate(
    std::span<const std::pair<double, double>> samples, BivariateTailQuery query) {
  if (samples.empty()) {
    throw std::invalid_argument("bivariate_gamma_tail: empty sample set");
  }
  if (!std::isfinite(query.x) || !std::isfinite(query.y)) {
    throw std::domain_error("bivariate_gamma_tail: query must be finite");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& [a, b] : samples) {
    const double z = std::min(std::max(a + query.x, 0.0), std::max(b + query.y, 0.0));
    sum += z;
    sum_sq += z * z;
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  const double variance = n > 1.0 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  BivariateTailEstimate out;
  out.value = std::min(1.0, logistic::tail(query.x) * logistic::tail(query.y) * std::exp(mean));
  out.std_error = out.value * std::sqrt(variance / n);
  return out;
}

double bivariate_gamma_tail(std::span<const std::pair<double, double>> samples,
                            BivariateTailQuery query) {
  return bivariate_gamma_tail_estimate(samples, query).value;
}

}  // namespace rdelab
