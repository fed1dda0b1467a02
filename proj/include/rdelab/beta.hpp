#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rdelab/errors.hpp"
#include "rdelab/grid.hpp"

namespace rdelab {

// beta_0(s) = 1 - s.
UnitIntervalCurve initial_beta(std::size_t resolution);

// (1/w)(1 - e^{-v}); the integrand of the beta recursion and the L equation.
double beta_integrand(double w, double v);

// beta_n(s) = int_s^1 (1/w)(1 - e^{-beta_{n-1}(1-w)}) dw at every node s = k/m.
UnitIntervalCurve next_beta(const UnitIntervalCurve& prev, const QuadratureSpec& spec = {});

struct BetaRecursionOptions {
  std::size_t resolution = 10000;
  QuadratureSpec quadrature{};
  // Curves with index > retain_curves are dropped except the terminal one;
  // summary values are kept for every n.
  std::size_t retain_curves = static_cast<std::size_t>(-1);
  // Slack allowed in the nodewise check beta_{n+1} <= beta_n.
  double monotone_slack = 1e-12;
  // Called with (n, beta_n) for every computed curve, beta_0 included.
  std::function<void(std::size_t, const UnitIntervalCurve&)> on_curve;
};

struct BetaSequence {
  std::vector<UnitIntervalCurve> curves;   // beta_0, beta_1, ... (see retain_curves)
  std::vector<std::size_t> curve_indices;  // n of each retained curve
  std::vector<double> values_at_zero;      // beta_n(0) for every computed n
  std::vector<double> sup_values;          // max_s beta_n(s) for every computed n
  std::vector<double> step_distances;      // sup |beta_n - beta_{n-1}|, n >= 1
  bool stopped_early = false;

  std::size_t last_index() const { return values_at_zero.size() - 1; }
  const UnitIntervalCurve& terminal() const { return curves.back(); }
  // Retained curve for index n; throws std::out_of_range if it was dropped.
  const UnitIntervalCurve& curve(std::size_t n) const;
};

// beta_0 .. beta_N, stopping after the first n with sup |beta_n - beta_{n-1}|
// < stop_tolerance or at n = n_max. Checks the nodewise decrease, the zero at
// s = 1 and the decrease of beta_n(0) as it goes; throws InvariantViolation
// on failure.
BetaSequence run_recursion(std::size_t n_max, double stop_tolerance,
                           const BetaRecursionOptions& options = {});

struct LimitDiagnostic {
  UnitIntervalCurve candidate;
  // sup_s |L(s) - int_s^1 (1/w)(1 - e^{-L(1-w)}) dw|
  double integral_residual = 0.0;
  // sup_w |(1-w) e^{L(1-w)} + w e^{-L(w)} - 1|
  double eta_max_abs = 0.0;
  std::vector<double> eta;  // eta at every node w = k/m
};

// Residuals of the limit equation for a candidate L with L(1) = 0; any other
// value at s = 1 throws std::invalid_argument.
LimitDiagnostic check_L_equation(const UnitIntervalCurve& candidate, const QuadratureSpec& spec = {});

}  // namespace rdelab
