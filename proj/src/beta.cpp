#include "rdelab/beta.hpp"

#include <algorithm>
#include <cmath>

#include "rdelab/text.hpp"

namespace rdelab {

UnitIntervalCurve initial_beta(std::size_t resolution) {
  return UnitIntervalCurve::sample(resolution, [](double s) { return 1.0 - s; });
}

double beta_integrand(double w, double v) { return -std::expm1(-v) / w; }

UnitIntervalCurve next_beta(const UnitIntervalCurve& prev, const QuadratureSpec& spec) {
  auto values = cumulative_unit(prev, beta_integrand, spec);
  // Roundoff can push the empty-interval end or tiny values a hair below 0.
  for (double& v : values) {
    v = std::clamp(v, 0.0, 1.0);
  }
  return UnitIntervalCurve(std::move(values));
}

const UnitIntervalCurve& BetaSequence::curve(std::size_t n) const {
  for (std::size_t i = 0; i < curve_indices.size(); ++i) {
    if (curve_indices[i] == n) {
      return curves[i];
    }
  }
  throw std::out_of_range("BetaSequence: curve " + std::to_string(n) + " was not retained");
}

namespace {

double sup_of(const UnitIntervalCurve& c) {
  const auto v = c.values();
  return *std::max_element(v.begin(), v.end());
}

}  // namespace

BetaSequence run_recursion(std::size_t n_max, double stop_tolerance,
                           const BetaRecursionOptions& options) {
  if (n_max < 1) {
    throw std::invalid_argument("run_recursion: n_max must be at least 1");
  }
  if (!(stop_tolerance > 0.0)) {
    throw std::invalid_argument("run_recursion: stop_tolerance must be positive");
  }
  BetaSequence seq;
  UnitIntervalCurve current = initial_beta(options.resolution);
  seq.curves.push_back(current);
  seq.curve_indices.push_back(0);
  seq.values_at_zero.push_back(current.value(0));
  seq.sup_values.push_back(sup_of(current));
  if (options.on_curve) {
    options.on_curve(0, current);
  }

  for (std::size_t n = 1; n <= n_max; ++n) {
    UnitIntervalCurve next = next_beta(current, options.quadrature);
    const std::size_t m = next.resolution();
    double step = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      const double drop = current.value(k) - next.value(k);
      if (drop < -options.monotone_slack) {
        throw InvariantViolation("beta-monotone-decrease",
                                 "beta_" + std::to_string(n) + " exceeds beta_" +
                                     std::to_string(n - 1) + " at s = " +
                                     text::format_double(next.node(k)));
      }
      step = std::max(step, std::fabs(drop));
    }
    if (next.value(m) != 0.0) {
      throw InvariantViolation("beta-zero-at-one", "beta_" + std::to_string(n) + "(1) = " +
                                                       text::format_double(next.value(m)));
    }
    if (!(next.value(0) < current.value(0)) && next.value(0) != 0.0) {
      throw InvariantViolation("beta-at-zero-decreasing",
                               "beta_" + std::to_string(n) + "(0) did not decrease");
    }
    seq.values_at_zero.push_back(next.value(0));
    seq.sup_values.push_back(sup_of(next));
    seq.step_distances.push_back(step);

    if (options.on_curve) {
      options.on_curve(n, next);
    }
    const bool stop = step < stop_tolerance;
    if (n <= options.retain_curves || stop || n == n_max) {
      seq.curves.push_back(next);
      seq.curve_indices.push_back(n);
    }
    current = std::move(next);
    if (stop) {
      seq.stopped_early = true;
      break;
    }
  }
  return seq;
}

LimitDiagnostic check_L_equation(const UnitIntervalCurve& candidate, const QuadratureSpec& spec) {
  const std::size_t m = candidate.resolution();
  if (std::fabs(candidate.value(m)) > 1e-12) {
    throw std::invalid_argument("check_L_equation: candidate(1) must be 0, got " +
                                text::format_double(candidate.value(m)));
  }
  LimitDiagnostic out{candidate, 0.0, 0.0, std::vector<double>(m + 1, 0.0)};
  const auto image = cumulative_unit(candidate, beta_integrand, spec);
  for (std::size_t k = 0; k <= m; ++k) {
    out.integral_residual = std::max(out.integral_residual, std::fabs(candidate.value(k) - image[k]));
  }
  // eta(0) = eta(1) = 0 because L(1) = 0; evaluate only the interior.
  for (std::size_t k = 1; k < m; ++k) {
    const double w = candidate.node(k);
    const double eta =
        (1.0 - w) * std::exp(candidate.value(m - k)) + w * std::exp(-candidate.value(k)) - 1.0;
    out.eta[k] = eta;
    out.eta_max_abs = std::max(out.eta_max_abs, std::fabs(eta));
  }
  return out;
}

}  // namespace rdelab
