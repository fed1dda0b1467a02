#include "rdelab/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rdelab/parallel.hpp"
#include "rdelab/rng.hpp"

namespace rdelab::assignment {

std::string to_string(CostLaw law) {
  return law == CostLaw::exponential_mean_n ? "exponential" : "uniform01";
}

CostLaw cost_law_from_string(const std::string& name) {
  if (name == "exponential" || name == "exponential_mean_n") return CostLaw::exponential_mean_n;
  if (name == "uniform01") return CostLaw::uniform01;
  throw std::invalid_argument("unknown cost law '" + name + "'");
}

CostMatrix::CostMatrix(std::size_t n, std::vector<double> costs, CostLaw law)
    : n_(n), costs_(std::move(costs)), law_(law) {
  if (n_ == 0) {
    throw std::invalid_argument("CostMatrix: n must be positive");
  }
  if (costs_.size() != n_ * n_) {
    throw std::invalid_argument("CostMatrix: expected n*n entries");
  }
  for (double c : costs_) {
    if (!std::isfinite(c) || c < 0.0) {
      throw std::invalid_argument("CostMatrix: entries must be finite and nonnegative");
    }
  }
}

CostMatrix sample_costs(std::size_t n, CostLaw law, std::uint64_t seed) {
  if (n == 0) {
    throw std::invalid_argument("sample_costs: n must be positive");
  }
  const std::uint64_t key = rng::derive(seed, 0x636f737473ULL);
  std::vector<double> costs(n * n);
  const double mean = static_cast<double>(n);
  for (std::size_t k = 0; k < costs.size(); ++k) {
    const double u = rng::uniform_at(key, k);
    costs[k] = law == CostLaw::exponential_mean_n ? -mean * std::log(u) : u;
  }
  return CostMatrix(n, std::move(costs), law);
}

AssignmentResult solve_exact(const CostMatrix& m) {
  const std::size_t n = m.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source of each augmentation.
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> row_of(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  std::vector<double> min_slack(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = m.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentResult result;
  result.permutation.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    result.permutation[row_of[j] - 1] = j - 1;
  }
  result.total_cost = permutation_cost(m, result.permutation);
  result.normalized = m.law() == CostLaw::exponential_mean_n;
  result.objective = result.normalized ? result.total_cost / static_cast<double>(n) : result.total_cost;
  result.row_duals.assign(u.begin() + 1, u.end());
  result.col_duals.assign(v.begin() + 1, v.end());
  return result;
}

bool verify_dual_certificate(const CostMatrix& m, const AssignmentResult& result, double tol) {
  const std::size_t n = m.size();
  if (result.row_duals.size() != n || result.col_duals.size() != n || result.permutation.size() != n) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double slack = m.at(i, j) - result.row_duals[i] - result.col_duals[j];
      const double scale = std::max(1.0, m.at(i, j));
      if (slack < -tol * scale) return false;
      if (j == result.permutation[i] && std::fabs(slack) > tol * scale) return false;
    }
  }
  return true;
}

double permutation_cost(const CostMatrix& m, const std::vector<std::size_t>& permutation) {
  if (permutation.size() != m.size()) {
    throw std::invalid_argument("permutation_cost: size mismatch");
  }
  std::vector<char> seen(m.size(), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    const std::size_t j = permutation[i];
    if (j >= m.size() || seen[j]) {
      throw std::invalid_argument("permutation_cost: not a bijection");
    }
    seen[j] = 1;
    total += m.at(i, j);
  }
  return total;
}

stats::MeanEstimate estimate_mean_objective(std::size_t n, CostLaw law, std::size_t replicates,
                                            std::uint64_t seed, std::size_t workers) {
  if (replicates < 2) {
    throw std::invalid_argument("estimate_mean_objective: need at least 2 replicates");
  }
  std::vector<double> objectives(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    objectives[r] = solve_exact(sample_costs(n, law, rng::derive(seed, r))).objective;
  });
  return stats::summarize(objectives);
}

double parisi_partial_sum(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("parisi_partial_sum: n must be positive");
  }
  double sum = 0.0;
  // Smallest terms first.
  for (std::size_t k = n; k >= 1; --k) {
    const double kk = static_cast<double>(k);
    sum += 1.0 / (kk * kk);
  }
  return sum;
}

}  // namespace rdelab::assignment
