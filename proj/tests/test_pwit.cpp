#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rdelab/logistic.hpp"
#include "rdelab/operators.hpp"
#include "rdelab/pwit.hpp"
#include "rdelab/stats.hpp"

using namespace rdelab;
using pwit::InnovationStream;
using pwit::PwitConfig;
using pwit::Role;

namespace {

// Exhaustive evaluation of the truncated tree: every arrival below the cutoff,
// every child to the frontier, no pruning.
double brute_force(const PwitConfig& config, pwit::NodeKey node, std::size_t depth, Role role) {
  if (depth == 0) {
    auto s = InnovationStream::substream(node, role);
    return config.boundary.draw(s());
  }
  auto arrivals = InnovationStream::substream(node, Role::xi);
  double best = std::numeric_limits<double>::infinity();
  double xi = 0.0;
  for (std::uint64_t j = 0;; ++j) {
    xi -= std::log(arrivals());
    if (xi > config.xi_cutoff) break;
    best = std::min(best, xi - brute_force(config, InnovationStream::child(node, j), depth - 1, role));
  }
  return best;
}

// 2 int (Hbar - f_d) with f_d the depth-d iterate of T from Hbar^2.
std::vector<double> analytic_gaps(std::size_t max_depth) {
  const RealGrid g = RealGrid::standard();
  auto f = TailFunction::logistic_tail_squared(g);
  std::vector<double> out;
  for (std::size_t d = 0; d <= max_depth; ++d) {
    double area = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double w = (k == 0 || k + 1 == g.size()) ? 0.5 : 1.0;
      area += w * (logistic::tail(g.node(k)) - f.value(k)) * g.step();
    }
    out.push_back(2.0 * area);
    f = apply_T(f);
  }
  return out;
}

}  // namespace

TEST_SUITE("pwit") {
TEST_CASE("pruned search equals exhaustive evaluation") {
  PwitConfig config;
  config.xi_cutoff = 12.0;
  std::size_t mismatches = 0;
  for (std::size_t depth : {1u, 2u, 3u}) {
    config.depth = depth;
    for (std::uint64_t r = 0; r < 60; ++r) {
      const InnovationStream stream(11, r);
      for (int tag : {1, 2}) {
        const auto fast = pwit::sample_root(config, stream, tag);
        const double slow =
            brute_force(config, stream.root(), depth, tag == 1 ? Role::boundary_1 : Role::boundary_2);
        if (std::fabs(fast.value - slow) > 1e-12) ++mismatches;
      }
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("depth one with a point-mass frontier is a shifted exponential") {
  PwitConfig config;
  config.depth = 1;
  config.boundary = pwit::BoundaryLaw::point_mass(0.5);
  config.replicates = 4000;
  config.master_seed = 3;
  const auto samples = pwit::sample_coupling(config, 1);
  CHECK(samples.root_1 == samples.root_2);
  const double d =
      stats::ks_statistic(samples.root_1, [](double x) { return x < -0.5 ? 0.0 : 1.0 - std::exp(-(x + 0.5)); });
  CHECK(stats::ks_p_value(d, samples.root_1.size()) > 0.001);
}

TEST_CASE("root marginal stays logistic at every depth") {
  PwitConfig config;
  config.replicates = 3000;
  config.master_seed = 21;
  for (std::size_t depth : {1u, 3u}) {
    config.depth = depth;
    const auto row = pwit::run_coupling(config, 1);
    CHECK(stats::ks_p_value(row.ks_statistic_root_vs_logistic, row.replicates) > 0.001);
  }
}

TEST_CASE("mean gap agrees with the analytic value") {
  const auto expected = analytic_gaps(4);
  CHECK(expected[0] == doctest::Approx(2.0).epsilon(1e-9));
  PwitConfig config;
  config.replicates = 3000;
  config.master_seed = 99;
  for (std::size_t depth : {0u, 2u, 4u}) {
    config.depth = depth;
    const auto row = pwit::run_coupling(config, 1);
    CHECK(std::fabs(row.mean_abs_root_gap - expected[depth]) <= 4.0 * row.gap_std_error);
  }
}

TEST_CASE("results do not depend on worker count") {
  PwitConfig config;
  config.depth = 4;
  config.replicates = 200;
  config.master_seed = 8;
  const auto one = pwit::sample_coupling(config, 1);
  const auto four = pwit::sample_coupling(config, 4);
  CHECK(one.root_1 == four.root_1);
  CHECK(one.root_2 == four.root_2);
  CHECK(one.nodes_visited == four.nodes_visited);
}

TEST_CASE("paired gap comparison") {
  PwitConfig config;
  config.replicates = 2000;
  config.master_seed = 4;
  const std::vector<std::size_t> depths{0, 3};
  const auto report = pwit::run_coupling_ladder(config, depths, 1);
  const auto cmp = pwit::compare_gaps(report.samples[0], report.samples[1]);
  CHECK(cmp.mean_difference == doctest::Approx(report.rows[0].mean_abs_root_gap - report.rows[1].mean_abs_root_gap));
  CHECK(cmp.z > 3.0);
  CHECK_THROWS(pwit::compare_gaps(report.samples[0], pwit::CouplingSamples{}));
}

TEST_CASE("config guards") {
  PwitConfig config;
  config.depth = 99;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.depth = 2;
  config.xi_cutoff = 3.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.xi_cutoff = 30.0;
  config.boundary = pwit::BoundaryLaw::uniform(1.0, 0.0);
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.boundary = pwit::BoundaryLaw::logistic();
  CHECK_THROWS_AS(pwit::sample_root(config, InnovationStream(1, 1), 3), std::invalid_argument);
  config.depth = 6;
  config.node_budget = 10;
  CHECK_THROWS_AS(pwit::sample_root(config, InnovationStream(1, 1), 1), pwit::NodeBudgetExceeded);
}

TEST_CASE("innovation paths") {
  const InnovationStream s(5, 6);
  const std::vector<std::uint64_t> path{2, 0, 7};
  CHECK(s.at_path(path) == InnovationStream::child(InnovationStream::child(InnovationStream::child(s.root(), 2), 0), 7));
  CHECK_FALSE(InnovationStream(5, 6).root() == InnovationStream(5, 7).root());
  auto a = InnovationStream::substream(s.root(), Role::boundary_1);
  auto b = InnovationStream::substream(s.root(), Role::boundary_2);
  CHECK(a() != b());
}
}
