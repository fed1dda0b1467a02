#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdelab/errors.hpp"
#include "rdelab/experiment.hpp"
#include "rdelab/grid.hpp"

namespace {

using rdelab::experiment::Command;
using rdelab::experiment::ExperimentConfig;
namespace ex = rdelab::experiment;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitIo = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> x_max;
  std::optional<double> step;
  std::optional<std::size_t> resolution;
  std::optional<std::size_t> max_iters;
  std::optional<double> tolerance;
  std::optional<std::string> seed_function;
  std::optional<std::size_t> n_max;
  std::optional<double> stop_tolerance;
  std::optional<std::size_t> x_stride;
  std::optional<std::size_t> s_stride;
  std::vector<std::size_t> depths;
  std::optional<std::size_t> replicates;
  std::optional<double> xi_cutoff;
  std::optional<std::string> boundary;
  std::optional<double> boundary_a;
  std::optional<double> boundary_b;
  std::vector<std::size_t> n;
  std::optional<std::string> law;
  std::optional<std::size_t> identity_samples;
  std::optional<std::string> format;
  std::optional<std::string> out;
};

void emit_error(const std::string& kind, const std::string& message, const nlohmann::json& extra = {}) {
  nlohmann::json record = {{"error", kind}, {"message", message}};
  if (extra.is_object()) {
    record.update(extra);
  }
  std::cerr << record.dump() << '\n';
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ex::IoError("cannot read config " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExperimentConfig build_config(Command command, const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : ex::validate_config(read_text(o.config_path));
  c.command = command;
  if (o.seed) c.seed = *o.seed;
  if (o.x_max) c.grid.x_max = *o.x_max;
  if (o.step) c.grid.step = *o.step;
  if (o.resolution) c.grid.resolution = *o.resolution;
  if (o.max_iters) c.iteration.max_iters = *o.max_iters;
  if (o.tolerance) c.iteration.tolerance = *o.tolerance;
  if (o.seed_function) c.iteration.seed_function = *o.seed_function;
  if (o.n_max) c.iteration.n_max = *o.n_max;
  if (o.stop_tolerance) c.iteration.stop_tolerance = *o.stop_tolerance;
  if (o.x_stride) c.iteration.x_stride = *o.x_stride;
  if (o.s_stride) c.iteration.s_stride = *o.s_stride;
  if (!o.depths.empty()) c.monte_carlo.depths = o.depths;
  if (o.replicates) c.monte_carlo.replicates = *o.replicates;
  if (o.xi_cutoff) c.monte_carlo.xi_cutoff = *o.xi_cutoff;
  if (o.boundary) c.monte_carlo.boundary.kind = *o.boundary;
  if (o.boundary_a) c.monte_carlo.boundary.a = *o.boundary_a;
  if (o.boundary_b) c.monte_carlo.boundary.b = *o.boundary_b;
  if (!o.n.empty()) c.monte_carlo.n = o.n;
  if (o.law) c.monte_carlo.law = *o.law;
  if (o.identity_samples) c.monte_carlo.identity_samples = *o.identity_samples;
  if (o.format) {
    if (*o.format == "csv") {
      c.output.format = ex::OutputFormat::csv;
    } else if (*o.format == "json") {
      c.output.format = ex::OutputFormat::json;
    } else {
      throw ex::ConfigError("output.format", "must be 'csv' or 'json'");
    }
  }
  if (o.out) c.output.path = *o.out;
  ex::check_ranges(c);
  return c;
}

void add_run_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON config file; flags override its fields");
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--x-max", o.x_max, "Grid half-width");
  sub->add_option("--step", o.step, "Grid step");
  sub->add_option("--resolution", o.resolution, "Intervals on [0,1] for the beta recursion");
  sub->add_option("--max-iters", o.max_iters, "Operator iteration cap");
  sub->add_option("--tolerance", o.tolerance, "Operator iteration stopping tolerance");
  sub->add_option("--seed-function", o.seed_function, "logistic-tail-squared or logistic-tail");
  sub->add_option("--n-max", o.n_max, "Beta recursion cap");
  sub->add_option("--stop-tolerance", o.stop_tolerance, "Beta recursion stopping tolerance");
  sub->add_option("--x-stride", o.x_stride, "Write every k-th grid point");
  sub->add_option("--s-stride", o.s_stride, "Write every k-th node on [0,1]");
  sub->add_option("--depths", o.depths, "Coupling depth ladder")->delimiter(',');
  sub->add_option("--replicates", o.replicates, "Monte Carlo replicates");
  sub->add_option("--xi-cutoff", o.xi_cutoff, "Edge weight truncation");
  sub->add_option("--boundary", o.boundary, "Boundary law: logistic, point_mass or uniform");
  sub->add_option("--boundary-a", o.boundary_a, "Boundary parameter a");
  sub->add_option("--boundary-b", o.boundary_b, "Boundary parameter b");
  sub->add_option("--n", o.n, "Assignment sizes")->delimiter(',');
  sub->add_option("--law", o.law, "Cost law: exponential or uniform01");
  sub->add_option("--identity-samples", o.identity_samples, "Random laws for identity-check");
  sub->add_option("--format", o.format, "csv or json");
  sub->add_option("--out", o.out, "Output directory");
}

int execute(const ExperimentConfig& config, std::size_t workers) {
  ex::RunContext ctx;
  ctx.output_dir = config.output.path.empty() ? ex::default_output_dir() : std::filesystem::path(config.output.path);
  ctx.workers = workers == 0 ? 1 : workers;
  ctx.version = ex::library_version();
  const auto outcome = ex::run(config, ctx);
  std::cout << outcome.summary;
  for (const auto& f : outcome.files) {
    std::cout << "wrote " << f.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the logistic recursive distributional equation"};
  app.set_version_flag("--version", ex::library_version());
  app.require_subcommand(1);

  std::size_t workers = 1;
  app.add_option("--workers", workers, "Worker threads for replicate-parallel experiments")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));

  Overrides overrides;
  std::vector<std::pair<CLI::App*, Command>> runs;
  for (auto command : {Command::logistic_check, Command::iterate_t, Command::beta, Command::coupling,
                       Command::assignment, Command::identity_check}) {
    auto* sub = app.add_subcommand(ex::to_string(command));
    add_run_options(sub, overrides);
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
    runs.emplace_back(sub, command);
  }
  auto* replay = app.add_subcommand("replay", "Re-run the experiment recorded in a manifest");
  std::string manifest;
  std::optional<std::string> replay_out;
  replay->add_option("manifest", manifest, "manifest.json written by a previous run")->required();
  replay->add_option("--out", replay_out, "Output directory");
  replay->add_option("--workers", workers, "Worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return kExitConfig;
  }

  try {
    if (replay->parsed()) {
      auto config = ex::config_from_manifest(manifest);
      if (replay_out) config.output.path = *replay_out;
      return execute(config, workers);
    }
    for (const auto& [sub, command] : runs) {
      if (sub->parsed()) {
        return execute(build_config(command, overrides), workers);
      }
    }
  } catch (const ex::ConfigError& e) {
    emit_error("config", e.what(), {{"field", e.field()}});
    return kExitConfig;
  } catch (const rdelab::InvariantViolation& e) {
    emit_error("invariant", e.what(), {{"invariant", e.invariant()}});
    return kExitInvariant;
  } catch (const rdelab::QuadratureError& e) {
    emit_error("invariant", e.what(), {{"invariant", "quadrature-error-bound"}});
    return kExitInvariant;
  } catch (const ex::IoError& e) {
    emit_error("io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return kExitInvariant;
  }
  return kExitConfig;
}
