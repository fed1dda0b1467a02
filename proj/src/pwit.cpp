#include "rdelab/pwit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdelab/logistic.hpp"
#include "rdelab/parallel.hpp"
#include "rdelab/text.hpp"

namespace rdelab::pwit {

double BoundaryLaw::draw(double u) const {
  switch (kind) {
    case Kind::logistic:
      return logistic::quantile(u);
    case Kind::point_mass:
      return a;
    case Kind::uniform:
      return a + (b - a) * u;
  }
  return 0.0;
}

void BoundaryLaw::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("boundary law: parameters must be finite");
  }
  if (kind == Kind::uniform && !(a < b)) {
    throw std::invalid_argument("boundary law: uniform needs a < b");
  }
}

std::string BoundaryLaw::describe() const {
  switch (kind) {
    case Kind::logistic:
      return "logistic";
    case Kind::point_mass:
      return "point_mass(" + text::format_double(a) + ")";
    case Kind::uniform:
      return "uniform(" + text::format_double(a) + "," + text::format_double(b) + ")";
  }
  return "unknown";
}

void PwitConfig::validate() const {
  if (depth > kMaxDepth) {
    throw std::invalid_argument("pwit: depth " + std::to_string(depth) + " exceeds guard " +
                                std::to_string(kMaxDepth));
  }
  if (!(xi_cutoff >= kMinCutoff) || !std::isfinite(xi_cutoff)) {
    throw std::invalid_argument("pwit: xi_cutoff must be finite and >= 8");
  }
  if (replicates < 1) {
    throw std::invalid_argument("pwit: replicates must be positive");
  }
  if (node_budget < 1) {
    throw std::invalid_argument("pwit: node_budget must be positive");
  }
  boundary.validate();
}

InnovationStream::InnovationStream(std::uint64_t master_seed, std::uint64_t replicate)
    : root_{rng::derive(rng::derive(master_seed, 0x7077697472656573ULL), replicate)} {}

NodeKey InnovationStream::at_path(std::span<const std::uint64_t> path) const {
  NodeKey node = root_;
  for (std::uint64_t index : path) {
    node = child(node, index);
  }
  return node;
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

class TreeEvaluator {
 public:
  TreeEvaluator(const PwitConfig& config, Role boundary_role)
      : config_(config), boundary_role_(boundary_role) {}

  // Value of the subtree if it lies in (alpha, beta); otherwise a bound on the
  // correct side of the window.
  double search(NodeKey node, std::size_t depth, double alpha, double beta) {
    if (++nodes_ > config_.node_budget) {
      throw NodeBudgetExceeded("pwit: node budget of " + std::to_string(config_.node_budget) +
                               " exceeded");
    }
    if (depth == 0) {
      auto boundary = InnovationStream::substream(node, boundary_role_);
      return config_.boundary.draw(boundary());
    }
    auto arrivals = InnovationStream::substream(node, Role::xi);
    double best = kInfinity;
    double xi = 0.0;
    for (std::uint64_t j = 0;; ++j) {
      xi -= std::log(arrivals());
      const double bound = std::min(best, beta);
      if (xi - logistic::kUpperQuantile >= bound) {
        return std::min(best, xi - logistic::kUpperQuantile);
      }
      if (xi > config_.xi_cutoff) {
        // The truncated tree ends here; an empty node falls back to the bound.
        truncated_ = true;
        return best < kInfinity ? best : xi - logistic::kUpperQuantile;
      }
      const double child = search(InnovationStream::child(node, j), depth - 1, xi - bound, xi - alpha);
      best = std::min(best, xi - child);
      if (best <= alpha) {
        return best;
      }
    }
  }

  bool truncated() const { return truncated_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  const PwitConfig& config_;
  Role boundary_role_;
  std::uint64_t nodes_ = 0;
  bool truncated_ = false;
};

Role boundary_role(int tag) {
  switch (tag) {
    case 1:
      return Role::boundary_1;
    case 2:
      return Role::boundary_2;
    default:
      throw std::invalid_argument("pwit: boundary_tag must be 1 or 2");
  }
}

}  // namespace

RootSample sample_root(const PwitConfig& config, const InnovationStream& stream, int boundary_tag) {
  config.validate();
  TreeEvaluator evaluator(config, boundary_role(boundary_tag));
  const double value = evaluator.search(stream.root(), config.depth, -kInfinity, kInfinity);
  return RootSample{value, evaluator.truncated(), evaluator.nodes()};
}

std::vector<double> CouplingSamples::gaps() const {
  std::vector<double> out(root_1.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::fabs(root_1[i] - root_2[i]);
  }
  return out;
}

std::vector<double> CouplingSamples::minima() const {
  std::vector<double> out(root_1.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::min(root_1[i], root_2[i]);
  }
  return out;
}

CouplingSamples sample_coupling(const PwitConfig& config, std::size_t workers) {
  config.validate();
  CouplingSamples out;
  out.depth = config.depth;
  out.root_1.resize(config.replicates);
  out.root_2.resize(config.replicates);
  out.truncated.resize(config.replicates);
  std::vector<std::uint64_t> nodes(config.replicates);
  parallel_for(config.replicates, workers, [&](std::size_t r) {
    const InnovationStream stream(config.master_seed, r);
    const RootSample first = sample_root(config, stream, 1);
    const RootSample second = sample_root(config, stream, 2);
    out.root_1[r] = first.value;
    out.root_2[r] = second.value;
    out.truncated[r] = (first.truncated || second.truncated) ? 1 : 0;
    nodes[r] = first.nodes_visited + second.nodes_visited;
  });
  for (std::uint64_t n : nodes) {
    out.nodes_visited += n;
  }
  return out;
}

CouplingRow summarize_coupling(const CouplingSamples& samples) {
  CouplingRow row;
  row.depth = samples.depth;
  row.replicates = samples.root_1.size();
  if (row.replicates == 0) {
    return row;
  }
  const auto gaps = samples.gaps();
  const auto gap_summary = stats::summarize(gaps);
  row.mean_abs_root_gap = gap_summary.mean;
  row.gap_std_error = gap_summary.std_error;
  double sq = 0.0;
  for (double g : gaps) {
    sq += g * g;
  }
  const double n = static_cast<double>(row.replicates);
  row.rms_root_gap = std::sqrt(sq / n);
  const auto logistic_cdf = [](double x) { return logistic::cdf(x); };
  row.ks_statistic_min_vs_logistic = stats::EmpiricalLaw(samples.minima()).ks_distance(logistic_cdf);
  row.ks_statistic_root_vs_logistic = stats::ks_statistic(samples.root_1, logistic_cdf);
  std::size_t flagged = 0;
  for (auto t : samples.truncated) {
    flagged += t;
  }
  row.truncation_flag_rate = static_cast<double>(flagged) / n;
  row.mean_nodes_per_root = static_cast<double>(samples.nodes_visited) / (2.0 * n);
  return row;
}

CouplingRow run_coupling(const PwitConfig& config, std::size_t workers) {
  return summarize_coupling(sample_coupling(config, workers));
}

CouplingReport run_coupling_ladder(const PwitConfig& config, std::span<const std::size_t> depths,
                                   std::size_t workers) {
  CouplingReport report;
  report.master_seed = config.master_seed;
  report.xi_cutoff = config.xi_cutoff;
  report.boundary = config.boundary;
  for (std::size_t depth : depths) {
    PwitConfig at_depth = config;
    at_depth.depth = depth;
    auto samples = sample_coupling(at_depth, workers);
    report.rows.push_back(summarize_coupling(samples));
    report.samples.push_back(std::move(samples));
  }
  return report;
}

GapComparison compare_gaps(const CouplingSamples& shallow, const CouplingSamples& deep) {
  if (shallow.root_1.size() != deep.root_1.size() || shallow.root_1.size() < 2) {
    throw std::invalid_argument("compare_gaps: need paired samples of equal size >= 2");
  }
  const auto a = shallow.gaps();
  const auto b = deep.gaps();
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff[i] = a[i] - b[i];
  }
  const auto s = stats::summarize(diff);
  GapComparison out;
  out.mean_difference = s.mean;
  out.std_error = s.std_error;
  out.z = s.std_error > 0.0 ? s.mean / s.std_error : (s.mean > 0.0 ? kInfinity : 0.0);
  return out;
}

stats::EmpiricalLaw estimate_min_law(const PwitConfig& config, std::size_t workers) {
  return stats::EmpiricalLaw(sample_coupling(config, workers).minima());
}

}  // namespace rdelab::pwit
