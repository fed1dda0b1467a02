#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdelab/rng.hpp"
#include "rdelab/stats.hpp"

namespace rdelab::pwit {

// Law of the values planted at the depth-d frontier of the truncated tree.
struct BoundaryLaw {
  enum class Kind { logistic, point_mass, uniform };

  Kind kind = Kind::logistic;
  double a = 0.0;  // point mass location, or uniform lower end
  double b = 0.0;  // uniform upper end

  static BoundaryLaw logistic() { return {}; }
  static BoundaryLaw point_mass(double v) { return {Kind::point_mass, v, v}; }
  static BoundaryLaw uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }

  // Inverse-CDF draw from u in (0,1).
  double draw(double u) const;
  void validate() const;
  std::string describe() const;

  bool operator==(const BoundaryLaw&) const = default;
};

struct PwitConfig {
  static constexpr std::size_t kMaxDepth = 14;
  static constexpr double kMinCutoff = 8.0;

  std::size_t depth = 0;
  double xi_cutoff = 30.0;
  BoundaryLaw boundary{};
  std::size_t replicates = 10000;
  std::uint64_t master_seed = 0;
  // Node visits allowed per root evaluation.
  std::uint64_t node_budget = 500'000'000;

  void validate() const;
};

class NodeBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeKey {
  std::uint64_t value = 0;
  bool operator==(const NodeKey&) const = default;
};

enum class Role : std::uint64_t { xi = 0, boundary_1 = 1, boundary_2 = 2 };

// Deterministic innovations of one tree. A node is addressed by its path of
// child indices from the root; (master_seed, replicate, path, role) fixes its
// substream, so two evaluations of the same tree see the same Poisson
// arrivals wherever they look, whatever order they visit nodes in.
class InnovationStream {
 public:
  InnovationStream(std::uint64_t master_seed, std::uint64_t replicate);

  NodeKey root() const { return root_; }
  static NodeKey child(NodeKey parent, std::uint64_t index) {
    return NodeKey{rng::derive(parent.value, index)};
  }
  NodeKey at_path(std::span<const std::uint64_t> path) const;

  static rng::CounterStream substream(NodeKey node, Role role) {
    return rng::CounterStream(rng::derive(node.value ^ 0x5bd1e9955bd1e995ULL, static_cast<std::uint64_t>(role)));
  }

 private:
  NodeKey root_;
};

struct RootSample {
  double value = 0.0;
  // Some node hit xi_cutoff while later arrivals could still have won.
  bool truncated = false;
  std::uint64_t nodes_visited = 0;
};

// X = min_j (xi_j - X_j) evaluated on the depth-d truncated tree, frontier
// values drawn from the boundary law under role boundary_<tag> (tag 1 or 2).
//
// Children are scanned in arrival order with an alpha-beta window: a child is
// only resolved as far as it can still change its parent's minimum, and the
// scan stops once xi_j - q_hi reaches the relevant bound, q_hi being the
// Logistic 1 - 1e-6 quantile. Arrivals above xi_cutoff are never generated.
RootSample sample_root(const PwitConfig& config, const InnovationStream& stream, int boundary_tag);

struct CouplingSamples {
  std::size_t depth = 0;
  std::vector<double> root_1;
  std::vector<double> root_2;
  std::vector<std::uint8_t> truncated;  // either evaluation flagged
  std::uint64_t nodes_visited = 0;

  std::vector<double> gaps() const;
  std::vector<double> minima() const;
};

// Replicate r evaluates the tree of InnovationStream(master_seed, r) twice,
// with boundary tags 1 and 2: shared arrivals, independent frontier draws.
CouplingSamples sample_coupling(const PwitConfig& config, std::size_t workers = 1);

struct CouplingRow {
  std::size_t depth = 0;
  std::size_t replicates = 0;
  double mean_abs_root_gap = 0.0;
  double gap_std_error = 0.0;
  double rms_root_gap = 0.0;
  double ks_statistic_min_vs_logistic = 0.0;
  double ks_statistic_root_vs_logistic = 0.0;
  double truncation_flag_rate = 0.0;
  double mean_nodes_per_root = 0.0;
};

CouplingRow summarize_coupling(const CouplingSamples& samples);

struct CouplingReport {
  std::uint64_t master_seed = 0;
  double xi_cutoff = 0.0;
  BoundaryLaw boundary{};
  std::vector<CouplingRow> rows;
  std::vector<CouplingSamples> samples;  // same order as rows
};

// One coupling experiment at config.depth.
CouplingRow run_coupling(const PwitConfig& config, std::size_t workers = 1);

// The experiment repeated over a depth ladder with the same replicate seeds,
// so rows at different depths are paired replicate by replicate.
CouplingReport run_coupling_ladder(const PwitConfig& config, std::span<const std::size_t> depths,
                                   std::size_t workers = 1);

// Paired one-sided comparison of |X1 - X2| between two depths of one ladder.
struct GapComparison {
  double mean_difference = 0.0;  // shallow minus deep
  double std_error = 0.0;
  double z = 0.0;
};
GapComparison compare_gaps(const CouplingSamples& shallow, const CouplingSamples& deep);

// Empirical law of X1 ^ X2 from the coupling at config.depth.
stats::EmpiricalLaw estimate_min_law(const PwitConfig& config, std::size_t workers = 1);

}  // namespace rdelab::pwit
