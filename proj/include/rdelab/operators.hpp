#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rdelab/grid.hpp"

namespace rdelab {

// Thrown when an operator restricted to the envelope set receives a function
// outside Hbar^2 <= f <= Hbar.
class EnvelopeError : public std::invalid_argument {
 public:
  explicit EnvelopeError(EnvelopeViolation violation)
      : std::invalid_argument(violation.describe()), violation_(violation) {}

  const EnvelopeViolation& violation() const { return violation_; }

 private:
  EnvelopeViolation violation_;
};

struct OperatorOptions {
  QuadratureSpec quadrature{};
  double envelope_slack = 1e-12;
};

// Diagonal operator of the bivariate Logistic RDE, evaluated in the form
//   T(f)(x) = Hbar(x) exp(-int_{-x}^inf (Hbar(s) - f(s)) ds),
// which equals Hbar^2(x) exp(int_{-x}^inf f) but never exponentiates a large
// integral. Requires a symmetric grid so that -x is a node.
TailFunction apply_T(const TailFunction& f, const OperatorOptions& options = {});

// T(f)/Hbar = exp(-int_{-x}^inf (Hbar - f)) at every node, for any tail with a
// finite right integral (T extended beyond the envelope set). The result need
// not be a tail function outside the envelope set, hence raw values.
std::vector<double> normalized_T(const TailFunction& f, const QuadratureSpec& quadrature = {});

// A(f)/Hbar at every node.
std::vector<double> normalized_A(const TailFunction& f, const QuadratureSpec& quadrature = {});

// max over nodes of |normalized_T(f) * normalized_A(f) - 1|. The two factors
// come from different integrands (Hbar - f against f), so a small residual
// checks the quadrature against the closed form int_{-x}^inf Hbar = -ln Hbar(x).
double identity_residual(const TailFunction& f, const QuadratureSpec& quadrature = {});

// Tail of min_j (xi_j - X_j) for X_j iid with tail f and xi a rate-1 Poisson
// process: x -> exp(-int_{-x}^inf f(s) ds). Anti-monotone in f.
TailFunction apply_A(const TailFunction& f, const QuadratureSpec& quadrature = {});

double sup_distance(const TailFunction& a, const TailFunction& b);
double sup_distance_to_logistic_tail(const TailFunction& f);

struct OperatorIterate {
  std::size_t index = 0;
  TailFunction function;
  double sup_distance_to_logistic_tail = 0.0;
};

struct IterationTrajectory {
  std::vector<OperatorIterate> iterates;  // f_0 (the seed), f_1, ...
  bool converged = false;
  // n such that sup |f_{n+1} - f_n| < tolerance first held.
  std::size_t converged_index = 0;
  double last_step_distance = 0.0;
};

// f_n = T(f_{n-1}) until consecutive iterates are within `tolerance` in sup
// norm or `max_iters` applications of T were made. Non-convergence is
// reported through `converged`, not thrown.
IterationTrajectory iterate_to_fixed_point(const TailFunction& seed, std::size_t max_iters,
                                           double tolerance, const OperatorOptions& options = {});

// Pointwise lambda Hbar^2 + (1 - lambda) Hbar. Any lambda: R -> [0,1] that is
// non-decreasing gives a member of the envelope set.
TailFunction envelope_mixture(const RealGrid& grid, const std::function<double(double)>& lambda);

// Randomized inputs for property checks, fully determined by `key`.
//  random_envelope_member: lambda Hbar^2 + (1-lambda) Hbar with
//    lambda(x) = lo + (hi - lo) H((x - c)/w), non-decreasing, so the result is
//    continuous, non-increasing and inside the envelope.
//  random_admissible_tail: tail of a Logistic, Normal, shifted Exponential or
//    two-Logistic mixture law with random location/scale, all with finite
//    E[X^+]. `family` receives a short description.
TailFunction random_envelope_member(const RealGrid& grid, std::uint64_t key);
TailFunction random_admissible_tail(const RealGrid& grid, std::uint64_t key,
                                    std::string* family = nullptr);

struct BivariateTailQuery {
  double x = 0.0;
  double y = 0.0;
};

struct BivariateTailEstimate {
  double value = 0.0;
  double std_error = 0.0;  // delta method on the sample mean
};

// Plug-in estimate of the joint tail of the bivariate Logistic operator
// applied to the empirical law of `samples`:
//   Hbar(x) Hbar(y) exp(mean[(X+x)^+ ^ (Y+y)^+]).
// For diagonal samples at x = y this is Hbar(x)^2 exp(int_{-x}^inf Hbar) = Hbar(x).
BivariateTailEstimate bivariate_gamma_tail_estimate(std::span<const std::pair<double, double>> samples,
                                                    BivariateTailQuery query);
double bivariate_gamma_tail(std::span<const std::pair<double, double>> samples,
                            BivariateTailQuery query);

}  // namespace rdelab
