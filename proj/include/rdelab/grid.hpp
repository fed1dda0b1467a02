#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdelab {

enum class QuadratureRule { trapezoid, simpson };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::simpson;
  double abs_tolerance = 1e-6;

  void validate() const;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniform grid on [x_min, x_max]. Node k is (x_min (n-1-k) + x_max k)/(n-1), so
// endpoints are exact and a symmetric grid satisfies node(n-1-k) == -node(k).
class RealGrid {
 public:
  RealGrid(double x_min, double x_max, std::size_t points);

  // Step must divide the span to within 1e-9 relative.
  static RealGrid with_step(double x_min, double x_max, double step);
  static RealGrid symmetric(double x_max, double step) { return with_step(-x_max, x_max, step); }
  // [-40, 40] at step 0.01.
  static RealGrid standard() { return symmetric(40.0, 0.01); }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return points_; }
  double step() const { return (x_max_ - x_min_) / static_cast<double>(points_ - 1); }
  double node(std::size_t k) const;
  bool is_symmetric() const { return x_min_ == -x_max_ && points_ % 2 == 1; }

  bool operator==(const RealGrid&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t points_;
};

// Extrapolation rule beyond the sampled window.
//  logistic_squeeze: left of the grid the boundary value is held; right of it
//    the function follows Hbar^2 + lambda (Hbar - Hbar^2) with lambda fixed by
//    the last sample. Members of the envelope set stay inside it.
//  zero_right: left clamp, zero right of the grid.
//  constant: both sides clamp; non-integrable unless the last value is 0.
enum class TailClosure { logistic_squeeze, zero_right, constant };

std::string to_string(TailClosure closure);
TailClosure tail_closure_from_string(const std::string& name);

struct EnvelopeViolation {
  std::size_t index;
  double x;
  double value;
  double lower;
  double upper;

  std::string describe() const;
};

// Grid sampling of a non-increasing function R -> [0,1], typically a tail
// P(Z > x). Immutable after construction.
class TailFunction {
 public:
  // Throws std::invalid_argument if values are non-finite, outside [0,1], or
  // increase by more than kMonotoneSlack between neighbours.
  TailFunction(RealGrid grid, std::vector<double> values,
               TailClosure closure = TailClosure::logistic_squeeze);

  static TailFunction sample(const RealGrid& grid, const std::function<double(double)>& fn,
                             TailClosure closure = TailClosure::logistic_squeeze);
  static TailFunction logistic_tail(const RealGrid& grid);
  static TailFunction logistic_tail_squared(const RealGrid& grid);

  static constexpr double kMonotoneSlack = 1e-12;

  const RealGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t k) const { return values_[k]; }
  TailClosure closure() const { return closure_; }

  // Linear interpolation inside the grid, closure outside; result in [0,1].
  double evaluate(double x) const;

  // Fixed lambda of the logistic_squeeze closure, in [0,1].
  double squeeze_weight() const;

  // int_{x_max}^inf f under the closure; +inf when non-integrable.
  double closure_mass_right() const;

  // First grid point where Hbar^2 <= f <= Hbar fails by more than `slack`.
  std::optional<EnvelopeViolation> find_envelope_violation(double slack = 1e-12) const;

 private:
  RealGrid grid_;
  std::vector<double> values_;
  TailClosure closure_;
};

// Samples of a function on [0,1] at s = k/m, k = 0..m.
class UnitIntervalCurve {
 public:
  explicit UnitIntervalCurve(std::vector<double> values);

  static UnitIntervalCurve sample(std::size_t resolution, const std::function<double(double)>& fn);

  std::size_t resolution() const { return values_.size() - 1; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t k) const { return values_[k]; }
  double node(std::size_t k) const {
    return static_cast<double>(k) / static_cast<double>(resolution());
  }

  // Linear interpolation; s is clamped to [0,1].
  double evaluate(double s) const;

 private:
  std::vector<double> values_;
};

// C[k] = int_{x_k}^{x_N} y for samples y at uniform step h. Simpson panels are
// anchored at the right end; odd offsets add one 3-point single-interval term.
std::vector<double> cumulative_from_right(std::span<const double> y, double h, QuadratureRule rule);

// int_a^inf f. Throws QuadratureError if the closure is non-integrable or the
// Richardson estimate (step h against 2h) exceeds spec.abs_tolerance.
double integrate_right(const TailFunction& f, double a, const QuadratureSpec& spec = {});

// int_{x_k}^inf f at every grid node, closure mass included.
std::vector<double> cumulative_right(const TailFunction& f, const QuadratureSpec& spec = {});

// Integrand builder for the unit-interval quadrature: (w, c(1-w)) -> value.
using UnitTransform = std::function<double(double w, double curve_at_one_minus_w)>;

// B[k] = int_{w_k}^1 transform(w, c(1-w)) dw at every node w_k = k/m. The
// transform is never called at w = 0; that endpoint value is extrapolated
// quadratically from w = h, 2h, 3h, which presumes a bounded integrand.
std::vector<double> cumulative_unit(const UnitIntervalCurve& c, const UnitTransform& transform,
                                    const QuadratureSpec& spec = {});

// int_s^1 transform(w, c(1-w)) dw; s outside [0,1] throws std::invalid_argument.
double integrate_unit(const UnitIntervalCurve& c, double s, const UnitTransform& transform,
                      const QuadratureSpec& spec = {});

// CSV with header "x,value" (or "s,value") and 17 significant digits.
void write_csv(std::ostream& out, const TailFunction& f);
void write_csv(std::ostream& out, const UnitIntervalCurve& c);
TailFunction read_tail_csv(std::istream& in, TailClosure closure = TailClosure::logistic_squeeze);
UnitIntervalCurve read_curve_csv(std::istream& in);

}  // namespace rdelab
