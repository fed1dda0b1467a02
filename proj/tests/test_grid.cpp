#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "rdelab/grid.hpp"
#include "rdelab/logistic.hpp"

using namespace rdelab;

TEST_SUITE("grid") {
TEST_CASE("real grid nodes") {
  const RealGrid g = RealGrid::standard();
  CHECK(g.size() == 8001);
  CHECK(g.node(0) == -40.0);
  CHECK(g.node(8000) == 40.0);
  CHECK(g.node(4000) == 0.0);
  CHECK(g.is_symmetric());
  for (std::size_t k = 0; k < g.size(); k += 7) {
    CHECK(g.node(g.size() - 1 - k) == -g.node(k));
  }
  CHECK_THROWS_AS(RealGrid::with_step(0.0, 1.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(RealGrid(1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(RealGrid(0.0, 1.0, 1), std::invalid_argument);
  CHECK_FALSE(RealGrid(-1.0, 2.0, 31).is_symmetric());
}

TEST_CASE("tail function validation") {
  const RealGrid g(-1.0, 1.0, 3);
  CHECK_NOTHROW(TailFunction(g, {1.0, 0.5, 0.0}));
  CHECK_THROWS_AS(TailFunction(g, {0.5, 0.6, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(TailFunction(g, {1.2, 0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(TailFunction(g, {1.0, NAN, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(TailFunction(g, {1.0, 0.5}), std::invalid_argument);
  CHECK(tail_closure_from_string(to_string(TailClosure::zero_right)) == TailClosure::zero_right);
  CHECK_THROWS_AS(tail_closure_from_string("nope"), std::invalid_argument);
}

TEST_CASE("evaluate interpolates and closes") {
  const RealGrid g(-1.0, 1.0, 3);
  const TailFunction f(g, {0.9, 0.5, 0.1}, TailClosure::zero_right);
  CHECK(f.evaluate(-0.5) == doctest::Approx(0.7));
  CHECK(f.evaluate(-5.0) == 0.9);
  CHECK(f.evaluate(2.0) == 0.0);
  const TailFunction c(g, {0.9, 0.5, 0.1}, TailClosure::constant);
  CHECK(c.evaluate(2.0) == 0.1);
  CHECK(std::isinf(c.closure_mass_right()));
  CHECK_THROWS_AS(integrate_right(c, 0.0), QuadratureError);
}

TEST_CASE("logistic squeeze closure") {
  const RealGrid g = RealGrid::symmetric(10.0, 0.01);
  const auto hbar = TailFunction::logistic_tail(g);
  const auto sq = TailFunction::logistic_tail_squared(g);
  CHECK(hbar.squeeze_weight() == doctest::Approx(1.0));
  CHECK(sq.squeeze_weight() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hbar.evaluate(15.0) == doctest::Approx(logistic::tail(15.0)).epsilon(1e-12));
  CHECK(sq.evaluate(15.0) == doctest::Approx(std::pow(logistic::tail(15.0), 2)).epsilon(1e-12));
  CHECK(hbar.closure_mass_right() == doctest::Approx(logistic::tail_integral_right(10.0)).epsilon(1e-12));
  CHECK(sq.closure_mass_right() == doctest::Approx(logistic::tail_squared_integral_right(10.0)).epsilon(1e-9));
  CHECK_FALSE(hbar.find_envelope_violation().has_value());
  CHECK_FALSE(sq.find_envelope_violation().has_value());
  const TailFunction outside = TailFunction::sample(g, [](double x) { return x < 0.0 ? 1.0 : 0.0; });
  const auto v = outside.find_envelope_violation();
  REQUIRE(v.has_value());
  CHECK_FALSE(v->describe().empty());
}

TEST_CASE("cumulative_from_right on polynomials") {
  // Composite Simpson is exact on cubics at even offsets from the right end;
  // the single-interval term at odd offsets is exact on quadratics.
  for (std::size_t n : {9u, 10u, 11u}) {
    const double h = 0.25;
    const double top = (n - 1) * h;
    std::vector<double> cubic(n);
    std::vector<double> quadratic(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = k * h;
      cubic[k] = x * x * x - 2.0 * x + 1.0;
      quadratic[k] = 3.0 * x * x - x + 2.0;
    }
    const auto cc = cumulative_from_right(cubic, h, QuadratureRule::simpson);
    const auto cq = cumulative_from_right(quadratic, h, QuadratureRule::simpson);
    const auto cubic_integral = [](double x) { return x * x * x * x / 4.0 - x * x + x; };
    const auto quadratic_integral = [](double x) { return x * x * x - x * x / 2.0 + 2.0 * x; };
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(cq[k] == doctest::Approx(quadratic_integral(top) - quadratic_integral(k * h)).epsilon(1e-13));
      if ((n - 1 - k) % 2 == 0) {
        CHECK(cc[k] == doctest::Approx(cubic_integral(top) - cubic_integral(k * h)).epsilon(1e-13));
      }
    }
    const auto t = cumulative_from_right(std::vector<double>(n, 2.0), h, QuadratureRule::trapezoid);
    CHECK(t[0] == doctest::Approx(2.0 * top));
  }
}

TEST_CASE("integrate_right against closed forms") {
  const RealGrid g = RealGrid::standard();
  const auto hbar = TailFunction::logistic_tail(g);
  const auto sq = TailFunction::logistic_tail_squared(g);
  for (double a : {-39.0, -10.0, -3.3, -0.013, 0.0, 0.005, 1.7, 12.0, 39.99, 39.995, 45.0}) {
    CHECK(integrate_right(hbar, a) == doctest::Approx(logistic::tail_integral_right(a)).epsilon(1e-8));
    CHECK(std::fabs(integrate_right(sq, a) - logistic::tail_squared_integral_right(a)) <= 1e-8);
  }
  // Left of the grid the boundary value is held: Hbar(-40) ~ 1.
  CHECK(integrate_right(hbar, -41.0) == doctest::Approx(logistic::tail_integral_right(-40.0) + 1.0).epsilon(1e-9));
  const auto cum = cumulative_right(hbar);
  for (std::size_t k = 0; k < g.size(); k += 113) {
    CHECK(std::fabs(cum[k] - logistic::tail_integral_right(g.node(k))) <= 1e-8);
  }
}

TEST_CASE("halving the step barely moves the integral") {
  const QuadratureSpec spec;
  const double coarse = integrate_right(TailFunction::logistic_tail(RealGrid::symmetric(40.0, 0.02)), 0.0, spec);
  const double fine = integrate_right(TailFunction::logistic_tail(RealGrid::symmetric(40.0, 0.01)), 0.0, spec);
  CHECK(std::fabs(coarse - fine) < 4.0 * spec.abs_tolerance);
}

TEST_CASE("integrate_right is additive at grid-aligned split points") {
  // f = (Hbar(x) + Hbar(2x))/2 has int_a^b f = (L(a) - L(b))/2 + (L(2a) - L(2b))/4, L(a) = ln(1 + e^{-a}).
  const QuadratureSpec spec;
  const RealGrid g = RealGrid::standard();
  const auto f = TailFunction::sample(g, [](double x) { return 0.5 * logistic::tail(x) + 0.5 * logistic::tail(2.0 * x); });
  const auto L = [](double a) { return logistic::tail_integral_right(a); };
  for (double a : {-12.0, -1.234, 0.5}) {
    for (double b : {-3.0, 0.0, 2.5}) {
      if (b <= a) continue;
      const double between = 0.5 * (L(a) - L(b)) + 0.25 * (L(2.0 * a) - L(2.0 * b));
      CHECK(std::fabs(integrate_right(f, a, spec) - (between + integrate_right(f, b, spec))) <=
            2.0 * spec.abs_tolerance);
    }
  }
}

TEST_CASE("richardson guard rejects a coarse grid") {
  const RealGrid coarse = RealGrid::symmetric(40.0, 1.0);
  const auto rough = TailFunction::sample(coarse, [](double x) { return logistic::tail(8.0 * (x - 0.3)); });
  QuadratureSpec tight;
  tight.abs_tolerance = 1e-12;
  CHECK_THROWS_AS(integrate_right(rough, -5.0, tight), QuadratureError);
  QuadratureSpec bad;
  bad.abs_tolerance = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("unit interval quadrature") {
  // int_s^1 c(1-w) dw with c(u) = u^2 is (1-s)^3/3.
  const auto c = UnitIntervalCurve::sample(1000, [](double u) { return u * u; });
  const auto cum = cumulative_unit(c, [](double, double v) { return v; });
  for (std::size_t k = 0; k <= 1000; k += 50) {
    const double s = k / 1000.0;
    CHECK(cum[k] == doctest::Approx(std::pow(1.0 - s, 3) / 3.0).epsilon(1e-12));
  }
  // Integrand (1 - e^{-w})/w is bounded at w = 0; its integral over [0,1] is Ein(1).
  const auto one = UnitIntervalCurve::sample(1000, [](double) { return 0.0; });
  const double ein1 = integrate_unit(one, 0.0, [](double w, double) { return -std::expm1(-w) / w; });
  CHECK(ein1 == doctest::Approx(0.7965995992970531).epsilon(1e-10));
  CHECK_THROWS_AS(integrate_unit(one, 1.5, [](double, double v) { return v; }), std::invalid_argument);
  CHECK(c.evaluate(0.5) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(c.evaluate(-1.0) == 0.0);
  CHECK_THROWS_AS(UnitIntervalCurve({0.5}), std::invalid_argument);
  CHECK_THROWS_AS(UnitIntervalCurve({0.5, 1.5}), std::invalid_argument);
}

TEST_CASE("csv round trip is lossless") {
  const RealGrid g = RealGrid::symmetric(5.0, 0.1);
  const auto f = TailFunction::logistic_tail_squared(g);
  std::stringstream buf;
  write_csv(buf, f);
  const auto back = read_tail_csv(buf);
  CHECK(back.grid() == g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(back.value(k) == f.value(k));
  }
  const auto c = UnitIntervalCurve::sample(10, [](double s) { return 1.0 - s * s; });
  std::stringstream cbuf;
  write_csv(cbuf, c);
  const auto cback = read_curve_csv(cbuf);
  for (std::size_t k = 0; k <= 10; ++k) {
    CHECK(cback.value(k) == c.value(k));
  }
  std::stringstream broken("x,value\n0,0.5\n1,abc\n");
  CHECK_THROWS(read_tail_csv(broken));
}
}
