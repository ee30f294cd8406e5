// apc: solve, verify, simulate and sweep the asymmetric all-pay conflict model.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "apc/cli.hpp"

namespace {

struct Flags {
  std::optional<double> lambda, beta, alpha, epsilon;
  std::optional<std::string> params_file, output, trace, sweep;
  std::string method = "auto";
  std::string format;
  std::string scaling = "shared";
  std::size_t grid = apc::kDefaultGridSize;
  std::uint64_t n = 100000;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int max_iter = 100;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--lambda", f.lambda, "ratio lambda1/lambda2 of resource expectations");
  cmd->add_option("--beta", f.beta, "ratio beta1/beta2 of production aggression");
  cmd->add_option("--alpha", f.alpha, "fraction the loser keeps, in [0, 1]");
  cmd->add_option("--epsilon", f.epsilon, "regularization of the lower boundary (default 0 if lambda == beta, else 1e-3)");
  cmd->add_option("--params-file", f.params_file, "JSON with lambda/beta/alpha or raw per-country values");
  cmd->add_option("--scaling", f.scaling, "raw-parameter normalization")->check(CLI::IsMember({"shared", "per-country"}));
  cmd->add_option("--method", f.method, "solver")
      ->check(CLI::IsMember({"auto", "equal", "order0", "order1", "order2", "converge", "root"}));
  cmd->add_option("--tol", f.tol, "convergence tolerance for --method converge");
  cmd->add_option("--max-iter", f.max_iter, "iteration cap for --method converge");
  cmd->add_option("--grid", f.grid, "strategy table size");
  cmd->add_option("--output", f.output, "output path (stdout if omitted)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_sim(CLI::App* cmd, Flags& f) {
  cmd->add_option("--n", f.n, "number of simulated conflicts");
  cmd->add_option("--seed", f.seed, "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium solver and simulator for asymmetric all-pay conflicts"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "equilibrium strategy table");
  auto* verify = app.add_subcommand("verify", "oracle cross-check of a solution");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo conflicts under the equilibrium");
  auto* sweep = app.add_subcommand("sweep", "solve and simulate along one parameter axis");
  for (auto* cmd : {solve, verify, simulate, sweep}) add_common(cmd, f);
  add_sim(simulate, f);
  add_sim(sweep, f);
  simulate->add_option("--trace", f.trace, "per-draw CSV trace (single-threaded)");
  sweep->add_option("--sweep", f.sweep, "param:from:to:steps")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return apc::cli::kExitInvalidConfig;
  }

  apc::cli::RunConfig cfg;
  try {
    cfg.command = solve->parsed()      ? apc::cli::Command::Solve
                  : verify->parsed()   ? apc::cli::Command::Verify
                  : simulate->parsed() ? apc::cli::Command::Simulate
                                       : apc::cli::Command::Sweep;
    cfg.lambda = f.lambda;
    cfg.beta = f.beta;
    cfg.alpha = f.alpha;
    cfg.epsilon = f.epsilon;
    cfg.params_file = f.params_file;
    cfg.scaling = f.scaling == "per-country" ? apc::ResourceScaling::PerCountry : apc::ResourceScaling::SharedR1;
    cfg.method = apc::parse_solver_choice(f.method);
    cfg.converge.tol = f.tol;
    cfg.converge.max_iter = f.max_iter;
    cfg.output_path = f.output;
    if (!f.format.empty()) cfg.format = f.format == "json" ? apc::cli::Format::Json : apc::cli::Format::Csv;
    cfg.grid_size = f.grid;
    cfg.n = f.n;
    cfg.seed = f.seed;
    cfg.trace_path = f.trace;
    if (f.sweep) cfg.sweep = apc::cli::parse_sweep(*f.sweep);
    cfg.threads = apc::cli::threads_from_env();
  } catch (const apc::DomainError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return apc::cli::kExitInvalidConfig;
  }
  return apc::cli::run(cfg, std::cout, std::cerr);
}
