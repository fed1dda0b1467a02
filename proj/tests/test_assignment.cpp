#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "rdelab/assignment.hpp"
#include "rdelab/rng.hpp"

using namespace rdelab::assignment;

namespace {

double brute_force_minimum(const CostMatrix& m) {
  std::vector<std::size_t> p(m.size());
  std::iota(p.begin(), p.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += m.at(i, p[i]);
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace

TEST_SUITE("assignment") {
TEST_CASE("hand-checked matrices") {
  const CostMatrix two(2, {1.0, 2.0, 3.0, 1.0}, CostLaw::uniform01);
  const auto r = solve_exact(two);
  CHECK(r.permutation == std::vector<std::size_t>{0, 1});
  CHECK(r.total_cost == 2.0);
  CHECK(r.objective == 2.0);
  CHECK_FALSE(r.normalized);

  std::vector<double> c(16, 1.0);
  for (int i = 0; i < 4; ++i) c[i * 4 + i] = 0.0;
  const auto diag = solve_exact(CostMatrix(4, c, CostLaw::exponential_mean_n));
  CHECK(diag.permutation == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(diag.objective == 0.0);
  CHECK(diag.normalized);
}

TEST_CASE("solver equals brute force for n <= 8") {
  for (std::size_t n = 1; n <= 8; ++n) {
    const std::size_t instances = 200;
    for (std::uint64_t seed = 0; seed < instances; ++seed) {
      const auto m = sample_costs(n, seed % 2 == 0 ? CostLaw::exponential_mean_n : CostLaw::uniform01,
                                  rdelab::rng::derive(n, seed));
      const auto r = solve_exact(m);
      const double brute = brute_force_minimum(m);
      CHECK(r.total_cost == doctest::Approx(brute).epsilon(1e-12));
      CHECK(std::fabs(permutation_cost(m, r.permutation) - r.total_cost) <= 1e-9);
      CHECK(verify_dual_certificate(m, r));
      const double scale = m.law() == CostLaw::exponential_mean_n ? 1.0 / n : 1.0;
      CHECK(r.objective == doctest::Approx(r.total_cost * scale));
    }
  }
}

TEST_CASE("sampling") {
  const auto a = sample_costs(5, CostLaw::exponential_mean_n, 9);
  CHECK(a == sample_costs(5, CostLaw::exponential_mean_n, 9));
  CHECK_FALSE(a == sample_costs(5, CostLaw::exponential_mean_n, 10));
  // Entries of the n = 50 law have mean 50 and standard deviation 50.
  const auto big = sample_costs(50, CostLaw::exponential_mean_n, 1);
  double sum = 0.0;
  for (double v : big.costs()) sum += v;
  const double mean = sum / 2500.0;
  CHECK(std::fabs(mean - 50.0) <= 3.0 * 50.0 / 50.0);
  const auto u = sample_costs(30, CostLaw::uniform01, 1);
  for (double v : u.costs()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(CostMatrix(2, {1.0, 2.0, 3.0}, CostLaw::uniform01), std::invalid_argument);
  CHECK_THROWS_AS(CostMatrix(1, {-1.0}, CostLaw::uniform01), std::invalid_argument);
  CHECK_THROWS_AS(CostMatrix(1, {INFINITY}, CostLaw::uniform01), std::invalid_argument);
  CHECK_THROWS_AS(CostMatrix(0, {}, CostLaw::uniform01), std::invalid_argument);
  const CostMatrix m(2, {1.0, 2.0, 3.0, 1.0}, CostLaw::uniform01);
  CHECK_THROWS_AS(permutation_cost(m, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_mean_objective(3, CostLaw::uniform01, 1, 0), std::invalid_argument);
  CHECK(cost_law_from_string("exponential") == CostLaw::exponential_mean_n);
  CHECK(to_string(CostLaw::uniform01) == "uniform01");
  CHECK_THROWS_AS(cost_law_from_string("gamma"), std::invalid_argument);
}

TEST_CASE("parisi partial sums") {
  CHECK(parisi_partial_sum(1) == 1.0);
  CHECK(parisi_partial_sum(2) == 1.25);
  CHECK(parisi_partial_sum(3) == doctest::Approx(1.0 + 0.25 + 1.0 / 9.0).epsilon(1e-15));
  CHECK(parisi_partial_sum(100) == doctest::Approx(1.634983900184892).epsilon(1e-14));
  double prev = 0.0;
  for (std::size_t n = 1; n < 500; ++n) {
    const double s = parisi_partial_sum(n);
    CHECK(s > prev);
    CHECK(s < std::numbers::pi * std::numbers::pi / 6.0);
    prev = s;
  }
}

TEST_CASE("small-n Monte Carlo against Parisi") {
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto est = estimate_mean_objective(n, CostLaw::exponential_mean_n, 4000, 1234 + n, 2);
    CHECK(std::fabs(est.mean - parisi_partial_sum(n)) <= 3.0 * est.std_error);
  }
  const auto one = estimate_mean_objective(4, CostLaw::uniform01, 50, 5, 1);
  const auto three = estimate_mean_objective(4, CostLaw::uniform01, 50, 5, 3);
  CHECK(one.mean == three.mean);
  CHECK(one.std_error == three.std_error);
}
}
