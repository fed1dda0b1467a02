#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rdelab/logistic.hpp"
#include "rdelab/parallel.hpp"
#include "rdelab/rng.hpp"
#include "rdelab/stats.hpp"
#include "rdelab/text.hpp"

using namespace rdelab;

TEST_SUITE("stats") {
TEST_CASE("summarize") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto s = stats::summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.count == 4);
  // Sample variance 5/3, SE sqrt(5/12).
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)));
}

TEST_CASE("ks statistic by hand") {
  // Samples 0.1, 0.5, 0.9 under U(0,1): D = max(1/3 - 0.1, 0.5 - 1/3, 2/3 - 0.5, 0.9 - 2/3, 1 - 0.9).
  const std::vector<double> v{0.9, 0.1, 0.5};
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(stats::ks_statistic(v, uniform) == doctest::Approx(0.2333333333333333));
  CHECK(stats::EmpiricalLaw(v).ks_distance(uniform) == doctest::Approx(0.2333333333333333));
  stats::EmpiricalLaw law(v);
  CHECK(law.cdf(0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(law.tail(0.95) == 0.0);
}

TEST_CASE("kolmogorov distribution reference points") {
  // Q(1.358) = 0.05 and Q(1.628) = 0.01 are the classical critical values.
  CHECK(stats::kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(stats::kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(2e-3));
  CHECK(stats::kolmogorov_survival(0.1) == 1.0);
  const double d = stats::ks_critical_value(10000, 0.01);
  CHECK(d == doctest::Approx(1.6276 / 100.0).epsilon(2e-3));
  CHECK(stats::ks_p_value(d, 10000) == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("logistic samples pass KS at the 1% level") {
  rng::CounterStream stream(7);
  std::vector<double> v(5000);
  for (auto& x : v) x = logistic::sample(stream);
  const double d = stats::ks_statistic(v, [](double x) { return logistic::cdf(x); });
  CHECK(stats::ks_p_value(d, v.size()) > 0.01);
  // A shifted law is rejected.
  for (auto& x : v) x += 0.3;
  const double shifted = stats::ks_statistic(v, [](double x) { return logistic::cdf(x); });
  CHECK(stats::ks_p_value(shifted, v.size()) < 1e-6);
}

TEST_CASE("rng determinism and range") {
  CHECK(rng::derive(1, 2) == rng::derive(1, 2));
  CHECK(rng::derive(1, 2) != rng::derive(2, 1));
  CHECK(rng::uniform_at(99, 5) == rng::uniform_at(99, 5));
  rng::CounterStream a(3), b(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = a();
    CHECK(u == b());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (std::size_t workers : {0u, 1u, 3u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("17-digit formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.7965995992970531}) {
    CHECK(text::parse_double(text::format_double(v)) == v);
  }
  CHECK(text::format_double(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(text::parse_double("1.0x"), std::invalid_argument);
  CHECK_THROWS_AS(text::parse_double(""), std::invalid_argument);
}
}
