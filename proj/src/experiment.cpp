#include "rdelab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "rdelab/assignment.hpp"
#include "rdelab/beta.hpp"
#include "rdelab/errors.hpp"
#include "rdelab/logistic.hpp"
#include "rdelab/operators.hpp"
#include "rdelab/pwit.hpp"
#include "rdelab/rng.hpp"
#include "rdelab/text.hpp"

#ifndef RDELAB_VERSION
#define RDELAB_VERSION "dev"
#endif

namespace rdelab::experiment {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string library_version() { return RDELAB_VERSION; }

std::string to_string(Command command) {
  switch (command) {
    case Command::logistic_check:
      return "logistic-check";
    case Command::iterate_t:
      return "iterate-t";
    case Command::beta:
      return "beta";
    case Command::coupling:
      return "coupling";
    case Command::assignment:
      return "assignment";
    case Command::identity_check:
      return "identity-check";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (auto c : {Command::logistic_check, Command::iterate_t, Command::beta, Command::coupling,
                 Command::assignment, Command::identity_check}) {
    if (to_string(c) == name) {
      return c;
    }
  }
  throw ConfigError("command", "unknown command '" + name + "'");
}

namespace {

// ---- parsing ---------------------------------------------------------------

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ConfigError(path.empty() ? "$" : path, "expected an object");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(join(path, key), "unknown field");
    }
  }
}

void read_number(const json& j, const std::string& path, const char* key, double& target) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number()) {
    throw ConfigError(join(path, key), "expected a number");
  }
  target = v.get<double>();
}

std::size_t as_count(const json& v, const std::string& field) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(field, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

void read_count(const json& j, const std::string& path, const char* key, std::size_t& target) {
  if (!j.contains(key)) return;
  target = as_count(j.at(key), join(path, key));
}

void read_string(const json& j, const std::string& path, const char* key, std::string& target) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_string()) {
    throw ConfigError(join(path, key), "expected a string");
  }
  target = v.get<std::string>();
}

void read_count_list(const json& j, const std::string& path, const char* key,
                     std::vector<std::size_t>& target) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  const std::string field = join(path, key);
  if (!v.is_array()) {
    throw ConfigError(field, "expected an array of nonnegative integers");
  }
  target.clear();
  for (std::size_t i = 0; i < v.size(); ++i) {
    target.push_back(as_count(v[i], field + "[" + std::to_string(i) + "]"));
  }
}

void require(bool ok, const std::string& field, const std::string& reason) {
  if (!ok) {
    throw ConfigError(field, reason);
  }
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

void check_ranges(const ExperimentConfig& c) {
  require(std::isfinite(c.grid.x_max) && c.grid.x_max >= 5.0 && c.grid.x_max <= 300.0, "grid.x_max",
          "must lie in [5, 300]");
  require(positive_finite(c.grid.step) && c.grid.step <= 1.0, "grid.step", "must lie in (0, 1]");
  try {
    (void)RealGrid::symmetric(c.grid.x_max, c.grid.step);
  } catch (const std::invalid_argument&) {
    throw ConfigError("grid.step", "must divide 2 * x_max into a whole number of intervals");
  }
  require(c.grid.resolution >= 3 && c.grid.resolution <= 1'000'000, "grid.resolution",
          "must lie in [3, 1000000]");

  const auto& it = c.iteration;
  require(it.max_iters >= 1 && it.max_iters <= 100'000, "iteration.max_iters", "must lie in [1, 100000]");
  require(positive_finite(it.tolerance), "iteration.tolerance", "must be positive");
  require(it.seed_function == "logistic-tail-squared" || it.seed_function == "logistic-tail",
          "iteration.seed_function", "must be 'logistic-tail-squared' or 'logistic-tail'");
  require(it.n_max >= 1 && it.n_max <= 100'000, "iteration.n_max", "must lie in [1, 100000]");
  require(positive_finite(it.stop_tolerance), "iteration.stop_tolerance", "must be positive");
  require(it.x_stride >= 1, "iteration.x_stride", "must be positive");
  require(it.s_stride >= 1, "iteration.s_stride", "must be positive");

  const auto& mc = c.monte_carlo;
  require(!mc.depths.empty(), "monte_carlo.depths", "must not be empty");
  for (std::size_t i = 0; i < mc.depths.size(); ++i) {
    require(mc.depths[i] <= pwit::PwitConfig::kMaxDepth, "monte_carlo.depths[" + std::to_string(i) + "]",
            "exceeds depth guard " + std::to_string(pwit::PwitConfig::kMaxDepth));
  }
  require(mc.replicates >= 2 && mc.replicates <= 100'000'000, "monte_carlo.replicates",
          "must lie in [2, 1e8]");
  require(std::isfinite(mc.xi_cutoff) && mc.xi_cutoff >= pwit::PwitConfig::kMinCutoff,
          "monte_carlo.xi_cutoff", "must be finite and >= 8");
  const auto& b = mc.boundary;
  require(b.kind == "logistic" || b.kind == "point_mass" || b.kind == "uniform",
          "monte_carlo.boundary.kind", "must be logistic, point_mass or uniform");
  require(std::isfinite(b.a) && std::isfinite(b.b), "monte_carlo.boundary", "parameters must be finite");
  require(b.kind != "uniform" || b.a < b.b, "monte_carlo.boundary.b", "uniform needs a < b");
  require(!mc.n.empty(), "monte_carlo.n", "must not be empty");
  for (std::size_t i = 0; i < mc.n.size(); ++i) {
    require(mc.n[i] >= 1 && mc.n[i] <= 2000, "monte_carlo.n[" + std::to_string(i) + "]",
            "must lie in [1, 2000]");
  }
  require(mc.law == "exponential" || mc.law == "uniform01", "monte_carlo.law",
          "must be 'exponential' or 'uniform01'");
  require(mc.identity_samples >= 1 && mc.identity_samples <= 100'000, "monte_carlo.identity_samples",
          "must lie in [1, 100000]");
}

namespace {

ExperimentConfig from_json(const json& root) {
  ExperimentConfig c;
  expect_object(root, "");
  reject_unknown(root, "", {"command", "seed", "grid", "iteration", "monte_carlo", "output"});
  if (root.contains("command")) {
    std::string name;
    read_string(root, "", "command", name);
    c.command = command_from_string(name);
  }
  if (root.contains("seed")) {
    const auto& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed", "expected a nonnegative 64-bit integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (root.contains("grid")) {
    const auto& g = root.at("grid");
    expect_object(g, "grid");
    reject_unknown(g, "grid", {"x_max", "step", "resolution"});
    read_number(g, "grid", "x_max", c.grid.x_max);
    read_number(g, "grid", "step", c.grid.step);
    read_count(g, "grid", "resolution", c.grid.resolution);
  }
  if (root.contains("iteration")) {
    const auto& it = root.at("iteration");
    expect_object(it, "iteration");
    reject_unknown(it, "iteration",
                   {"max_iters", "tolerance", "seed_function", "n_max", "stop_tolerance", "x_stride", "s_stride"});
    read_count(it, "iteration", "max_iters", c.iteration.max_iters);
    read_number(it, "iteration", "tolerance", c.iteration.tolerance);
    read_string(it, "iteration", "seed_function", c.iteration.seed_function);
    read_count(it, "iteration", "n_max", c.iteration.n_max);
    read_number(it, "iteration", "stop_tolerance", c.iteration.stop_tolerance);
    read_count(it, "iteration", "x_stride", c.iteration.x_stride);
    read_count(it, "iteration", "s_stride", c.iteration.s_stride);
  }
  if (root.contains("monte_carlo")) {
    const auto& mc = root.at("monte_carlo");
    const std::string p = "monte_carlo";
    expect_object(mc, p);
    reject_unknown(mc, p, {"depths", "replicates", "xi_cutoff", "boundary", "n", "law", "identity_samples"});
    read_count_list(mc, p, "depths", c.monte_carlo.depths);
    read_count(mc, p, "replicates", c.monte_carlo.replicates);
    read_number(mc, p, "xi_cutoff", c.monte_carlo.xi_cutoff);
    if (mc.contains("boundary")) {
      const auto& b = mc.at("boundary");
      const std::string bp = "monte_carlo.boundary";
      expect_object(b, bp);
      reject_unknown(b, bp, {"kind", "a", "b"});
      read_string(b, bp, "kind", c.monte_carlo.boundary.kind);
      read_number(b, bp, "a", c.monte_carlo.boundary.a);
      read_number(b, bp, "b", c.monte_carlo.boundary.b);
    }
    read_count_list(mc, p, "n", c.monte_carlo.n);
    read_string(mc, p, "law", c.monte_carlo.law);
    read_count(mc, p, "identity_samples", c.monte_carlo.identity_samples);
  }
  if (root.contains("output")) {
    const auto& o = root.at("output");
    expect_object(o, "output");
    reject_unknown(o, "output", {"format", "path"});
    std::string format = "csv";
    read_string(o, "output", "format", format);
    if (format == "csv") {
      c.output.format = OutputFormat::csv;
    } else if (format == "json") {
      c.output.format = OutputFormat::json;
    } else {
      throw ConfigError("output.format", "must be 'csv' or 'json'");
    }
    read_string(o, "output", "path", c.output.path);
  }
  check_ranges(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["seed"] = c.seed;
  j["grid"] = {{"x_max", c.grid.x_max}, {"step", c.grid.step}, {"resolution", c.grid.resolution}};
  j["iteration"] = {{"max_iters", c.iteration.max_iters},
                    {"tolerance", c.iteration.tolerance},
                    {"seed_function", c.iteration.seed_function},
                    {"n_max", c.iteration.n_max},
                    {"stop_tolerance", c.iteration.stop_tolerance},
                    {"x_stride", c.iteration.x_stride},
                    {"s_stride", c.iteration.s_stride}};
  j["monte_carlo"] = {
      {"depths", c.monte_carlo.depths},
      {"replicates", c.monte_carlo.replicates},
      {"xi_cutoff", c.monte_carlo.xi_cutoff},
      {"boundary",
       {{"kind", c.monte_carlo.boundary.kind}, {"a", c.monte_carlo.boundary.a}, {"b", c.monte_carlo.boundary.b}}},
      {"n", c.monte_carlo.n},
      {"law", c.monte_carlo.law},
      {"identity_samples", c.monte_carlo.identity_samples}};
  j["output"] = {{"format", c.output.format == OutputFormat::csv ? "csv" : "json"}, {"path", c.output.path}};
  return j;
}

}  // namespace

ExperimentConfig validate_config(const std::string& raw) {
  if (raw.find_first_not_of(" \t\r\n") == std::string::npos) {
    return ExperimentConfig{};
  }
  json parsed;
  try {
    parsed = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return from_json(parsed);
}

std::string to_canonical_json(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

fs::path default_output_dir() {
  if (const char* env = std::getenv("RDELAB_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return fs::path("rdelab-out");
}

ExperimentConfig config_from_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) {
    throw IoError("cannot read manifest " + manifest.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("config")) {
    throw ConfigError("config", "manifest has no config section");
  }
  return from_json(j.at("config"));
}

// ---- running -----------------------------------------------------------------

namespace {

using text::format_double;

struct Artifact {
  std::string name;
  std::string content;
};

class Runner {
 public:
  Runner(const ExperimentConfig& config, const RunContext& context) : config_(config), context_(context) {}

  RunOutcome execute() {
    const auto start = std::chrono::steady_clock::now();
    switch (config_.command) {
      case Command::logistic_check:
        logistic_check();
        break;
      case Command::iterate_t:
        iterate_t();
        break;
      case Command::beta:
        beta();
        break;
      case Command::coupling:
        coupling();
        break;
      case Command::assignment:
        assignment_run();
        break;
      case Command::identity_check:
        identity_check();
        break;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return persist(wall);
  }

 private:
  bool csv() const { return config_.output.format == OutputFormat::csv; }

  RealGrid grid() const { return RealGrid::symmetric(config_.grid.x_max, config_.grid.step); }

  void add(std::string name, std::string content) { artifacts_.push_back({std::move(name), std::move(content)}); }

  void line(const std::string& s) { summary_ << s << '\n'; }

  // Writes a deferred failure after the artifacts so the evidence is on disk.
  void fail_later(const std::string& invariant, const std::string& detail) {
    if (failed_invariant_.empty()) {
      failed_invariant_ = invariant;
      failure_detail_ = detail;
    }
  }

  void logistic_check() {
    const RealGrid g = grid();
    double fd = 0.0;
    double product = 0.0;
    double symmetry = 0.0;
    double complement = 0.0;
    double a1 = 0.0;
    const double h = 1e-4;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.node(k);
      const double d = logistic::density(x);
      fd = std::max(fd, std::fabs(d - (logistic::cdf(x + h) - logistic::cdf(x - h)) / (2.0 * h)));
      product = std::max(product, std::fabs(d - logistic::cdf(x) * logistic::tail(x)));
      symmetry = std::max(symmetry, std::fabs(logistic::cdf(-x) - logistic::tail(x)));
      complement = std::max(complement, std::fabs(logistic::cdf(x) + logistic::tail(x) - 1.0));
      a1 = std::max(a1, std::fabs(logistic::tail(x) - std::exp(-logistic::tail_integral_right(-x))));
    }
    double round_trip = 0.0;
    for (double p = 0.001; p < 1.0; p += 0.001) {
      round_trip = std::max(round_trip, std::fabs(logistic::cdf(logistic::quantile(p)) - p));
    }
    const double ln2 = std::fabs(logistic::tail_integral_right(0.0) - std::numbers::ln2);
    struct Check {
      const char* name;
      double value;
      double threshold;
    };
    const Check checks[] = {
        {"density_vs_central_difference", fd, 1e-7},
        {"density_equals_cdf_times_tail", product, 0.0},
        {"symmetry_cdf_neg_x_equals_tail", symmetry, 0.0},
        {"cdf_plus_tail_equals_one", complement, 1e-15},
        {"integral_identity_a1", a1, 1e-8},
        {"integral_tail_zero_to_inf_ln2", ln2, 1e-10},
        {"quantile_round_trip", round_trip, 1e-12},
    };
    std::ostringstream out;
    json rows = json::array();
    if (csv()) out << "check,value,threshold,passed\n";
    for (const auto& c : checks) {
      const bool ok = c.value <= c.threshold;
      if (csv()) {
        out << c.name << ',' << format_double(c.value) << ',' << format_double(c.threshold) << ','
            << (ok ? "true" : "false") << '\n';
      }
      rows.push_back({{"check", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", ok}});
      line(std::string(ok ? "PASS " : "FAIL ") + c.name + " = " + format_double(c.value) +
           " (threshold " + format_double(c.threshold) + ")");
      if (!ok) fail_later(c.name, format_double(c.value) + " > " + format_double(c.threshold));
    }
    add(csv() ? "logistic_check.csv" : "logistic_check.json", csv() ? out.str() : rows.dump(2) + "\n");
  }

  void iterate_t() {
    const RealGrid g = grid();
    const auto& it = config_.iteration;
    const TailFunction seed = it.seed_function == "logistic-tail" ? TailFunction::logistic_tail(g)
                                                                  : TailFunction::logistic_tail_squared(g);
    const auto traj = iterate_to_fixed_point(seed, it.max_iters, it.tolerance);
    std::ostringstream out;
    json data = json::array();
    if (csv()) out << "n,x,f_n_of_x\n";
    json summary = json::array();
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& iterate : traj.iterates) {
      if (auto v = iterate.function.find_envelope_violation(1e-12)) {
        fail_later("envelope-closure", "f_" + std::to_string(iterate.index) + ": " + v->describe());
      }
      if (iterate.sup_distance_to_logistic_tail > previous + 1e-12) {
        fail_later("monotone-convergence", "sup distance increased at n = " + std::to_string(iterate.index));
      }
      previous = iterate.sup_distance_to_logistic_tail;
      summary.push_back({{"n", iterate.index}, {"sup_distance", iterate.sup_distance_to_logistic_tail}});
      json values = json::array();
      for (std::size_t k = 0; k < g.size(); k += it.x_stride) {
        if (csv()) {
          out << iterate.index << ',' << format_double(g.node(k)) << ','
              << format_double(iterate.function.value(k)) << '\n';
        } else {
          values.push_back({g.node(k), iterate.function.value(k)});
        }
      }
      if (!csv()) data.push_back({{"n", iterate.index}, {"points", values}});
    }
    add(csv() ? "iterate_t.csv" : "iterate_t.json", csv() ? out.str() : data.dump(2) + "\n");
    json s = {{"iterates", summary},
              {"converged", traj.converged},
              {"converged_index", traj.converged_index},
              {"last_step_distance", traj.last_step_distance}};
    add("iterate_t_summary.json", s.dump(2) + "\n");
    line("iterates: " + std::to_string(traj.iterates.size() - 1) + ", converged: " +
         (traj.converged ? "yes" : "no") + ", final sup |f_n - Hbar| = " +
         format_double(traj.iterates.back().sup_distance_to_logistic_tail));
  }

  void beta() {
    const auto& it = config_.iteration;
    BetaRecursionOptions options;
    options.resolution = config_.grid.resolution;
    options.retain_curves = 0;
    std::ostringstream out;
    json data = json::array();
    if (csv()) out << "n,s,beta_n_of_s\n";
    options.on_curve = [&](std::size_t n, const UnitIntervalCurve& c) {
      json values = json::array();
      for (std::size_t k = 0; k <= c.resolution(); k += it.s_stride) {
        if (csv()) {
          out << n << ',' << format_double(c.node(k)) << ',' << format_double(c.value(k)) << '\n';
        } else {
          values.push_back({c.node(k), c.value(k)});
        }
      }
      if (!csv()) data.push_back({{"n", n}, {"points", values}});
    };
    const BetaSequence seq = run_recursion(it.n_max, it.stop_tolerance, options);
    add(csv() ? "beta_curves.csv" : "beta_curves.json", csv() ? out.str() : data.dump(2) + "\n");
    json summary = json::array();
    for (std::size_t n = 0; n < seq.values_at_zero.size(); ++n) {
      summary.push_back({{"n", n}, {"beta_n_at_zero", seq.values_at_zero[n]}, {"sup_value", seq.sup_values[n]}});
    }
    const auto diagnostic = check_L_equation(seq.terminal());
    json s = {{"sequence", summary},
              {"stopped_early", seq.stopped_early},
              {"terminal_index", seq.last_index()},
              {"terminal_integral_residual", diagnostic.integral_residual},
              {"terminal_eta_max_abs", diagnostic.eta_max_abs}};
    add("beta_summary.json", s.dump(2) + "\n");
    line("beta_" + std::to_string(seq.last_index()) + "(0) = " + format_double(seq.values_at_zero.back()) +
         ", sup = " + format_double(seq.sup_values.back()) + ", eta max = " + format_double(diagnostic.eta_max_abs));
  }

  void coupling() {
    const auto& mc = config_.monte_carlo;
    pwit::PwitConfig pc;
    pc.xi_cutoff = mc.xi_cutoff;
    pc.replicates = mc.replicates;
    pc.master_seed = config_.seed;
    if (mc.boundary.kind == "point_mass") {
      pc.boundary = pwit::BoundaryLaw::point_mass(mc.boundary.a);
    } else if (mc.boundary.kind == "uniform") {
      pc.boundary = pwit::BoundaryLaw::uniform(mc.boundary.a, mc.boundary.b);
    }
    const auto report = pwit::run_coupling_ladder(pc, mc.depths, context_.workers);
    std::ostringstream out;
    json rows = json::array();
    if (csv()) {
      out << "depth,replicates,mean_abs_root_gap,gap_std_error,rms_root_gap,ks_statistic_min_vs_logistic,"
             "ks_statistic_root_vs_logistic,truncation_flag_rate,mean_nodes_per_root\n";
    }
    for (const auto& r : report.rows) {
      if (csv()) {
        out << r.depth << ',' << r.replicates << ',' << format_double(r.mean_abs_root_gap) << ','
            << format_double(r.gap_std_error) << ',' << format_double(r.rms_root_gap) << ','
            << format_double(r.ks_statistic_min_vs_logistic) << ',' << format_double(r.ks_statistic_root_vs_logistic)
            << ',' << format_double(r.truncation_flag_rate) << ',' << format_double(r.mean_nodes_per_root) << '\n';
      }
      rows.push_back({{"depth", r.depth},
                      {"replicates", r.replicates},
                      {"mean_abs_root_gap", r.mean_abs_root_gap},
                      {"gap_std_error", r.gap_std_error},
                      {"rms_root_gap", r.rms_root_gap},
                      {"ks_statistic_min_vs_logistic", r.ks_statistic_min_vs_logistic},
                      {"ks_statistic_root_vs_logistic", r.ks_statistic_root_vs_logistic},
                      {"truncation_flag_rate", r.truncation_flag_rate},
                      {"mean_nodes_per_root", r.mean_nodes_per_root}});
      line("depth " + std::to_string(r.depth) + ": gap " + format_double(r.mean_abs_root_gap) + " +- " +
           format_double(r.gap_std_error) + ", KS(min) " + format_double(r.ks_statistic_min_vs_logistic));
    }
    if (csv()) {
      add("coupling.csv", out.str());
    } else {
      json j = {{"master_seed", report.master_seed},
                {"xi_cutoff", report.xi_cutoff},
                {"boundary", report.boundary.describe()},
                {"rows", rows}};
      add("coupling.json", j.dump(2) + "\n");
    }
  }

  void assignment_run() {
    const auto& mc = config_.monte_carlo;
    const auto law = assignment::cost_law_from_string(mc.law);
    std::ostringstream out;
    json rows = json::array();
    if (csv()) out << "n,law,replicates,mean,std_error,parisi_value,abs_gap\n";
    for (std::size_t n : mc.n) {
      const auto est =
          assignment::estimate_mean_objective(n, law, mc.replicates, rng::derive(config_.seed, n), context_.workers);
      const double parisi = assignment::parisi_partial_sum(n);
      const double gap = std::fabs(est.mean - parisi);
      if (csv()) {
        out << n << ',' << mc.law << ',' << mc.replicates << ',' << format_double(est.mean) << ','
            << format_double(est.std_error) << ',' << format_double(parisi) << ',' << format_double(gap) << '\n';
      }
      rows.push_back({{"n", n},
                      {"law", mc.law},
                      {"replicates", mc.replicates},
                      {"mean", est.mean},
                      {"std_error", est.std_error},
                      {"parisi_value", parisi},
                      {"abs_gap", gap}});
      line("n = " + std::to_string(n) + ": mean " + format_double(est.mean) + ", 3-SE band [" +
           format_double(est.mean - 3.0 * est.std_error) + ", " + format_double(est.mean + 3.0 * est.std_error) +
           "], Parisi " + format_double(parisi) + (gap <= 3.0 * est.std_error ? " (inside)" : " (outside)"));
    }
    add(csv() ? "assignment.csv" : "assignment.json", csv() ? out.str() : rows.dump(2) + "\n");
  }

  void identity_check() {
    const RealGrid g = grid();
    const auto& mc = config_.monte_carlo;
    std::ostringstream out;
    json rows = json::array();
    if (csv()) out << "index,family,max_abs_residual\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < mc.identity_samples; ++i) {
      std::string family;
      const auto tail = random_admissible_tail(g, rng::derive(config_.seed, i), &family);
      const double r = identity_residual(tail);
      worst = std::max(worst, r);
      if (csv()) {
        out << i << ',' << '"' << family << '"' << ',' << format_double(r) << '\n';
      }
      rows.push_back({{"index", i}, {"family", family}, {"max_abs_residual", r}});
    }
    add(csv() ? "identity_check.csv" : "identity_check.json", csv() ? out.str() : rows.dump(2) + "\n");
    line("max |T/Hbar * A/Hbar - 1| over " + std::to_string(mc.identity_samples) +
         " laws = " + format_double(worst));
    if (worst > 1e-6) {
      fail_later("identity-equation", "residual " + format_double(worst) + " > 1e-6");
    }
  }

  RunOutcome persist(double wall_seconds) {
    std::error_code ec;
    fs::create_directories(context_.output_dir, ec);
    if (ec) {
      throw IoError("cannot create output directory " + context_.output_dir.string() + ": " + ec.message());
    }
    RunOutcome outcome;
    json outputs = json::array();
    for (const auto& a : artifacts_) {
      const fs::path p = context_.output_dir / a.name;
      write_file(p, a.content);
      outcome.files.push_back(p);
      outputs.push_back(a.name);
    }
    json manifest = {{"command", to_string(config_.command)},
                     {"config", to_json(config_)},
                     {"seed", config_.seed},
                     {"version", context_.version.empty() ? library_version() : context_.version},
                     {"wall_time_seconds", wall_seconds},
                     {"workers", context_.workers},
                     {"outputs", outputs},
                     {"status", failed_invariant_.empty() ? "ok" : "invariant-failure"}};
    const fs::path mp = context_.output_dir / "manifest.json";
    write_file(mp, manifest.dump(2) + "\n");
    outcome.files.push_back(mp);
    outcome.summary = summary_.str();
    if (!failed_invariant_.empty()) {
      throw InvariantViolation(failed_invariant_, failure_detail_);
    }
    return outcome;
  }

  static void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      throw IoError("cannot write " + path.string());
    }
  }

  const ExperimentConfig& config_;
  const RunContext& context_;
  std::vector<Artifact> artifacts_;
  std::ostringstream summary_;
  std::string failed_invariant_;
  std::string failure_detail_;
};

}  // namespace

RunOutcome run(const ExperimentConfig& config, const RunContext& context) {
  check_ranges(config);
  Runner runner(config, context);
  return runner.execute();
}

}  // namespace rdelab::experiment
