#include "rdelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "rdelab/logistic.hpp"
#include "rdelab/text.hpp"

namespace rdelab {

void QuadratureSpec::validate() const {
  if (!(abs_tolerance > 0.0) || !std::isfinite(abs_tolerance)) {
    throw std::invalid_argument("QuadratureSpec: abs_tolerance must be positive and finite");
  }
}

RealGrid::RealGrid(double x_min, double x_max, std::size_t points)
    : x_min_(x_min), x_max_(x_max), points_(points) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw std::invalid_argument("RealGrid: need finite x_min < x_max");
  }
  if (points < 2) {
    throw std::invalid_argument("RealGrid: need at least two points");
  }
}

RealGrid RealGrid::with_step(double x_min, double x_max, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("RealGrid: step must be positive");
  }
  const double intervals = (x_max - x_min) / step;
  const double rounded = std::round(intervals);
  if (!(rounded >= 1.0) || std::fabs(intervals - rounded) > 1e-9 * rounded) {
    throw std::invalid_argument("RealGrid: step does not divide [x_min, x_max]");
  }
  return RealGrid(x_min, x_max, static_cast<std::size_t>(rounded) + 1);
}

double RealGrid::node(std::size_t k) const {
  const auto last = static_cast<double>(points_ - 1);
  const auto kk = static_cast<double>(k);
  return (x_min_ * (last - kk) + x_max_ * kk) / last;
}

std::string to_string(TailClosure closure) {
  switch (closure) {
    case TailClosure::logistic_squeeze:
      return "logistic-squeeze";
    case TailClosure::zero_right:
      return "zero-right";
    case TailClosure::constant:
      return "constant";
  }
  return "unknown";
}

TailClosure tail_closure_from_string(const std::string& name) {
  if (name == "logistic-squeeze") return TailClosure::logistic_squeeze;
  if (name == "zero-right") return TailClosure::zero_right;
  if (name == "constant") return TailClosure::constant;
  throw std::invalid_argument("unknown tail closure '" + name + "'");
}

std::string EnvelopeViolation::describe() const {
  std::ostringstream os;
  os << "envelope violated at grid index " << index << " (x = " << text::format_double(x)
     << "): value " << text::format_double(value) << " outside [" << text::format_double(lower)
     << ", " << text::format_double(upper) << "]";
  return os.str();
}

TailFunction::TailFunction(RealGrid grid, std::vector<double> values, TailClosure closure)
    : grid_(grid), values_(std::move(values)), closure_(closure) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("TailFunction: value count does not match grid");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("TailFunction: value at index " + std::to_string(k) +
                                  " is outside [0,1]");
    }
    if (k > 0 && v > values_[k - 1] + kMonotoneSlack) {
      throw std::invalid_argument("TailFunction: values increase at index " + std::to_string(k));
    }
  }
}

TailFunction TailFunction::sample(const RealGrid& grid, const std::function<double(double)>& fn,
                                  TailClosure closure) {
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = fn(grid.node(k));
  }
  return TailFunction(grid, std::move(values), closure);
}

TailFunction TailFunction::logistic_tail(const RealGrid& grid) {
  return sample(grid, [](double x) { return logistic::tail(x); });
}

TailFunction TailFunction::logistic_tail_squared(const RealGrid& grid) {
  return sample(grid, [](double x) {
    const double t = logistic::tail(x);
    return t * t;
  });
}

double TailFunction::squeeze_weight() const {
  const double b = grid_.x_max();
  const double upper = logistic::tail(b);
  const double lower = upper * upper;
  if (!(upper > lower)) {
    return 1.0;
  }
  return std::clamp((values_.back() - lower) / (upper - lower), 0.0, 1.0);
}

double TailFunction::evaluate(double x) const {
  if (std::isnan(x)) {
    throw std::domain_error("TailFunction::evaluate: NaN argument");
  }
  if (x <= grid_.x_min()) {
    return values_.front();
  }
  if (x >= grid_.x_max()) {
    if (x == grid_.x_max()) {
      return values_.back();
    }
    switch (closure_) {
      case TailClosure::logistic_squeeze: {
        const double lambda = squeeze_weight();
        const double upper = std::isfinite(x) ? logistic::tail(x) : 0.0;
        return (1.0 - lambda) * upper * upper + lambda * upper;
      }
      case TailClosure::zero_right:
        return 0.0;
      case TailClosure::constant:
        return values_.back();
    }
  }
  const double t = (x - grid_.x_min()) / grid_.step();
  auto k = static_cast<std::size_t>(std::floor(t));
  k = std::min(k, values_.size() - 2);
  const double frac = std::clamp(t - static_cast<double>(k), 0.0, 1.0);
  return std::clamp(values_[k] + frac * (values_[k + 1] - values_[k]), 0.0, 1.0);
}

namespace {

// Closure mass int_a^inf for a >= x_max.
double closure_mass_from(const TailFunction& f, double a) {
  switch (f.closure()) {
    case TailClosure::logistic_squeeze: {
      const double lambda = f.squeeze_weight();
      return (1.0 - lambda) * logistic::tail_squared_integral_right(a) +
             lambda * logistic::tail_integral_right(a);
    }
    case TailClosure::zero_right:
      return 0.0;
    case TailClosure::constant:
      return f.values().back() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

double richardson_divisor(QuadratureRule rule) { return rule == QuadratureRule::simpson ? 15.0 : 3.0; }

}  // namespace

double TailFunction::closure_mass_right() const { return closure_mass_from(*this, grid_.x_max()); }

std::optional<EnvelopeViolation> TailFunction::find_envelope_violation(double slack) const {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double x = grid_.node(k);
    const double upper = logistic::tail(x);
    const double lower = upper * upper;
    const double v = values_[k];
    if (v < lower - slack || v > upper + slack) {
      return EnvelopeViolation{k, x, v, lower, upper};
    }
  }
  return std::nullopt;
}

UnitIntervalCurve::UnitIntervalCurve(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw std::invalid_argument("UnitIntervalCurve: need resolution >= 1");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("UnitIntervalCurve: value at index " + std::to_string(k) +
                                  " is outside [0,1]");
    }
  }
}

UnitIntervalCurve UnitIntervalCurve::sample(std::size_t resolution,
                                            const std::function<double(double)>& fn) {
  if (resolution < 1) {
    throw std::invalid_argument("UnitIntervalCurve: resolution must be positive");
  }
  std::vector<double> values(resolution + 1);
  for (std::size_t k = 0; k <= resolution; ++k) {
    values[k] = fn(static_cast<double>(k) / static_cast<double>(resolution));
  }
  return UnitIntervalCurve(std::move(values));
}

double UnitIntervalCurve::evaluate(double s) const {
  const double m = static_cast<double>(resolution());
  const double t = std::clamp(s, 0.0, 1.0) * m;
  auto k = static_cast<std::size_t>(std::floor(t));
  k = std::min(k, resolution() - 1);
  const double frac = t - static_cast<double>(k);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

std::vector<double> cumulative_from_right(std::span<const double> y, double h,
                                          QuadratureRule rule) {
  if (y.empty()) {
    return {};
  }
  const std::size_t n = y.size() - 1;
  std::vector<double> c(y.size(), 0.0);
  if (n == 0) {
    return c;
  }
  if (rule == QuadratureRule::trapezoid || n == 1) {
    for (std::size_t k = n; k-- > 0;) {
      c[k] = c[k + 1] + 0.5 * h * (y[k] + y[k + 1]);
    }
    return c;
  }
  // Even offsets from the right end: composite Simpson.
  for (std::size_t k = n; k >= 2;) {
    k -= 2;
    c[k] = c[k + 2] + h / 3.0 * (y[k] + 4.0 * y[k + 1] + y[k + 2]);
    if (k < 2) {
      break;
    }
  }
  // Odd offsets: one interval on top of the neighbouring Simpson value.
  c[n - 1] = h / 12.0 * (-y[n - 2] + 8.0 * y[n - 1] + 5.0 * y[n]);
  for (std::size_t k = n - 1; k >= 2;) {
    k -= 2;
    c[k] = c[k + 1] + h / 12.0 * (5.0 * y[k] + 8.0 * y[k + 1] - y[k + 2]);
    if (k < 2) {
      break;
    }
  }
  return c;
}

namespace {

std::vector<double> grid_cumulative(const TailFunction& f, QuadratureRule rule) {
  return cumulative_from_right(f.values(), f.grid().step(), rule);
}

}  // namespace

std::vector<double> cumulative_right(const TailFunction& f, const QuadratureSpec& spec) {
  spec.validate();
  const double mass = f.closure_mass_right();
  if (!std::isfinite(mass)) {
    throw QuadratureError("integrate_right: closure '" + to_string(f.closure()) +
                          "' is not integrable");
  }
  auto c = grid_cumulative(f, spec.rule);
  for (double& v : c) {
    v += mass;
  }
  return c;
}

double integrate_right(const TailFunction& f, double a, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(a)) {
    throw std::domain_error("integrate_right: NaN lower limit");
  }
  const RealGrid& grid = f.grid();
  if (a >= grid.x_max()) {
    const double tail_mass = closure_mass_from(f, a);
    if (!std::isfinite(tail_mass)) {
      throw QuadratureError("integrate_right: closure '" + to_string(f.closure()) +
                            "' is not integrable");
    }
    return tail_mass;
  }
  const auto c = cumulative_right(f, spec);
  const auto values = f.values();
  const std::size_t n = values.size() - 1;
  const double h = grid.step();

  double result = 0.0;
  std::size_t first_node = 0;
  if (a <= grid.x_min()) {
    result = c[0] + (grid.x_min() - a) * values[0];
  } else {
    const double t = (a - grid.x_min()) / h;
    const double nearest = std::round(t);
    if (std::fabs(t - nearest) <= 1e-9 * std::max(1.0, t)) {
      first_node = static_cast<std::size_t>(nearest);
      result = c[first_node];
    } else {
      // Quadratic through three neighbouring nodes, integrated from a to x_{k+1}.
      const auto k = std::min(static_cast<std::size_t>(std::floor(t)), n - 1);
      const std::size_t j = (k + 2 <= n || k == 0) ? k : k - 1;
      const double y0 = values[j];
      const double y1 = values[std::min(j + 1, n)];
      const double y2 = j + 2 <= n ? values[j + 2] : y1;
      const double d2 = y2 - 2.0 * y1 + y0;
      const auto antiderivative = [&](double u) {
        return y0 * u + 0.5 * (y1 - y0) * u * u + 0.5 * d2 * (u * u * u / 3.0 - 0.5 * u * u);
      };
      const double lower = t - static_cast<double>(j);
      const double upper = static_cast<double>(k + 1 - j);
      result = c[k + 1] + h * (antiderivative(upper) - antiderivative(lower));
      first_node = k + 1;
    }
  }

  // Richardson estimate over the grid part, on a node with even offset from x_max.
  std::size_t j = first_node + ((n - first_node) % 2);
  if (j + 4 <= n) {
    std::vector<double> coarse;
    coarse.reserve((n - j) / 2 + 1);
    for (std::size_t k = j; k <= n; k += 2) {
      coarse.push_back(values[k]);
    }
    const auto cc = cumulative_from_right(coarse, 2.0 * h, spec.rule);
    const double fine = c[j] - f.closure_mass_right();
    const double estimate = std::fabs(fine - cc[0]) / richardson_divisor(spec.rule);
    if (estimate > spec.abs_tolerance) {
      throw QuadratureError("integrate_right: error estimate " + text::format_double(estimate) +
                            " exceeds tolerance " + text::format_double(spec.abs_tolerance));
    }
  }
  return result;
}

namespace {

std::vector<double> unit_integrand(const UnitIntervalCurve& c, const UnitTransform& transform) {
  const std::size_t m = c.resolution();
  std::vector<double> g(m + 1);
  for (std::size_t k = 1; k <= m; ++k) {
    g[k] = transform(c.node(k), c.value(m - k));
  }
  g[0] = m >= 3 ? 3.0 * g[1] - 3.0 * g[2] + g[3] : g[1];
  return g;
}

}  // namespace

std::vector<double> cumulative_unit(const UnitIntervalCurve& c, const UnitTransform& transform,
                                    const QuadratureSpec& spec) {
  spec.validate();
  const auto g = unit_integrand(c, transform);
  return cumulative_from_right(g, 1.0 / static_cast<double>(c.resolution()), spec.rule);
}

double integrate_unit(const UnitIntervalCurve& c, double s, const UnitTransform& transform,
                      const QuadratureSpec& spec) {
  spec.validate();
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("integrate_unit: s must lie in [0,1]");
  }
  const std::size_t m = c.resolution();
  const auto g = unit_integrand(c, transform);
  const double h = 1.0 / static_cast<double>(m);
  const auto b = cumulative_from_right(g, h, spec.rule);
  const double t = s * static_cast<double>(m);
  const auto k = std::min(static_cast<std::size_t>(std::floor(t)), m - 1);
  const double frac = t - static_cast<double>(k);
  if (frac == 0.0) {
    return b[k];
  }
  const double gs = g[k] + frac * (g[k + 1] - g[k]);
  return b[k + 1] + 0.5 * (c.node(k + 1) - s) * (gs + g[k + 1]);
}

void write_csv(std::ostream& out, const TailFunction& f) {
  out << "x,value\n";
  for (std::size_t k = 0; k < f.grid().size(); ++k) {
    out << text::format_double(f.grid().node(k)) << ',' << text::format_double(f.value(k)) << '\n';
  }
}

void write_csv(std::ostream& out, const UnitIntervalCurve& c) {
  out << "s,value\n";
  for (std::size_t k = 0; k <= c.resolution(); ++k) {
    out << text::format_double(c.node(k)) << ',' << text::format_double(c.value(k)) << '\n';
  }
}

namespace {

std::vector<std::pair<double, double>> read_two_columns(std::istream& in,
                                                        const std::string& header) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("csv: missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw std::invalid_argument("csv: expected header '" + header + "', got '" + line + "'");
  }
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("csv: line " + std::to_string(line_no) + " has no comma");
    }
    rows.emplace_back(text::parse_double(line.substr(0, comma)),
                      text::parse_double(line.substr(comma + 1)));
  }
  return rows;
}

}  // namespace

TailFunction read_tail_csv(std::istream& in, TailClosure closure) {
  const auto rows = read_two_columns(in, "x,value");
  if (rows.size() < 2) {
    throw std::invalid_argument("csv: need at least two rows");
  }
  RealGrid grid(rows.front().first, rows.back().first, rows.size());
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double expected = grid.node(k);
    if (std::fabs(rows[k].first - expected) > 1e-9 * std::max(1.0, std::fabs(expected))) {
      throw std::invalid_argument("csv: x column is not a uniform grid at row " +
                                  std::to_string(k + 1));
    }
    values.push_back(rows[k].second);
  }
  return TailFunction(grid, std::move(values), closure);
}

UnitIntervalCurve read_curve_csv(std::istream& in) {
  const auto rows = read_two_columns(in, "s,value");
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double expected = static_cast<double>(k) / static_cast<double>(rows.size() - 1);
    if (std::fabs(rows[k].first - expected) > 1e-9) {
      throw std::invalid_argument("csv: s column is not k/m at row " + std::to_string(k + 1));
    }
    values.push_back(rows[k].second);
  }
  return UnitIntervalCurve(std::move(values));
}

}  // namespace rdelab
