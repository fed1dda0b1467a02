#pragma once

#include <cmath>
#include <concepts>

namespace rdelab::logistic {

// Standard Logistic law: H(x) = 1/(1+e^{-x}), Hbar(x) = 1 - H(x).
// All functions reject non-finite arguments with std::domain_error.

double cdf(double x);
double tail(double x);

// H'(x) = H(x) Hbar(x).
double density(double x);

// ln(p/(1-p)); p must lie strictly inside (0,1).
double quantile(double p);

// Closed-form right integrals, used as quadrature closures and oracles.
//   int_a^inf Hbar(s) ds   = ln(1 + e^{-a})
//   int_a^inf Hbar(s)^2 ds = ln(1 + e^{-a}) - Hbar(a)
double tail_integral_right(double a);
double tail_squared_integral_right(double a);

// Upper quantile that bounds child values during pruned tree evaluation.
inline const double kUpperQuantile = std::log((1.0 - 1e-6) / 1e-6);

template <typename Source>
concept UniformSource = requires(Source& s) {
  { s() } -> std::convertible_to<double>;
};

// Inverse-CDF draw. The source must yield uniforms in the open interval (0,1).
template <UniformSource Source>
double sample(Source& source) {
  return quantile(static_cast<double>(source()));
}

}  // namespace rdelab::logistic
