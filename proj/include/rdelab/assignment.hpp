#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdelab/stats.hpp"

namespace rdelab::assignment {

// exponential_mean_n: C_ij ~ Exp(mean n), objective (1/n) sum C_{i,pi(i)}.
// uniform01:          C_ij ~ U(0,1),      objective sum C_{i,pi(i)} (raw).
enum class CostLaw { exponential_mean_n, uniform01 };

std::string to_string(CostLaw law);
CostLaw cost_law_from_string(const std::string& name);

class CostMatrix {
 public:
  // Row-major costs; entries must be finite and nonnegative.
  CostMatrix(std::size_t n, std::vector<double> costs, CostLaw law);

  std::size_t size() const { return n_; }
  CostLaw law() const { return law_; }
  double at(std::size_t row, std::size_t col) const { return costs_[row * n_ + col]; }
  const std::vector<double>& costs() const { return costs_; }

  bool operator==(const CostMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<double> costs_;
  CostLaw law_;
};

CostMatrix sample_costs(std::size_t n, CostLaw law, std::uint64_t seed);

struct AssignmentResult {
  std::vector<std::size_t> permutation;  // row i is matched to column permutation[i]
  double total_cost = 0.0;               // sum_i C_{i,pi(i)}
  double objective = 0.0;                // per the law's normalization
  bool normalized = false;               // objective divided by n
  std::vector<double> row_duals;
  std::vector<double> col_duals;
};

// Shortest augmenting path with row/column potentials, O(n^3). Ties are
// broken by the scan order (lowest column index first).
AssignmentResult solve_exact(const CostMatrix& m);

// u_i + v_j <= C_ij for all (i,j) and equality on the matching, within tol.
bool verify_dual_certificate(const CostMatrix& m, const AssignmentResult& result, double tol = 1e-9);

// sum_i C_{i,pi(i)} for an arbitrary permutation.
double permutation_cost(const CostMatrix& m, const std::vector<std::size_t>& permutation);

// Mean and standard error of solve_exact(...).objective over independent
// instances; instance r uses seed derive(seed, r).
stats::MeanEstimate estimate_mean_objective(std::size_t n, CostLaw law, std::size_t replicates,
                                            std::uint64_t seed, std::size_t workers = 1);

// 1 + 1/4 + ... + 1/n^2.
double parisi_partial_sum(std::size_t n);

}  // namespace rdelab::assignment
