#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "apc/core_model.hpp"
#include "apc/errors.hpp"
#include "apc/io.hpp"
#include "apc/oracle.hpp"
#include "apc/simulator.hpp"
#include "apc/solve.hpp"
#include "apc/verify.hpp"

namespace apc::cli {

enum class Command { Solve, Verify, Simulate, Sweep };
enum class Format { Csv, Json };

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInvalidConfig = 2,
  kExitDivergence = 3,
  kExitVerificationFailed = 4,
};

struct SweepAxis {
  std::string param;  // lambda | beta | alpha | epsilon
  double from = 0.0;
  double to = 0.0;
  int steps = 2;

  double value(int i) const {
    if (i == steps - 1) return to;
    return from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
};

/// Parses "param:from:to:steps".
inline SweepAxis parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4) throw DomainError("sweep must look like param:from:to:steps");
  SweepAxis axis;
  axis.param = parts[0];
  if (axis.param != "lambda" && axis.param != "beta" && axis.param != "alpha" && axis.param != "epsilon") {
    throw DomainError("sweep parameter must be one of lambda, beta, alpha, epsilon");
  }
  axis.from = parse_double(parts[1]);
  axis.to = parse_double(parts[2]);
  try {
    std::size_t used = 0;
    axis.steps = std::stoi(parts[3], &used);
    if (used != parts[3].size()) throw DomainError("bad step count");
  } catch (const std::exception&) {
    throw DomainError("sweep steps must be an integer");
  }
  if (axis.steps < 2) throw DomainError("sweep needs at least 2 steps");
  return axis;
}

struct RunConfig {
  Command command = Command::Solve;
  std::optional<double> lambda;
  std::optional<double> beta;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::optional<std::string> params_file;
  ResourceScaling scaling = ResourceScaling::SharedR1;
  SolverChoice method = SolverChoice::Auto;
  ConvergeOptions converge{};
  std::optional<std::string> output_path;
  std::optional<Format> format;
  std::size_t grid_size = kDefaultGridSize;
  std::uint64_t n = 100000;
  std::uint64_t seed = 0;
  std::optional<SweepAxis> sweep;
  unsigned threads = 0;
  std::optional<std::string> trace_path;
};

/// APC_THREADS caps simulation workers; unset or 0 means hardware concurrency.
inline unsigned threads_from_env() {
  const char* v = std::getenv("APC_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) throw DomainError("APC_THREADS must be a nonnegative integer");
  return static_cast<unsigned>(n);
}

/// Model parameters before orientation and epsilon defaults are applied.
struct BaseParams {
  double lambda = 1.0;
  double beta = 1.0;
  double alpha = 0.0;
  std::optional<double> epsilon;
  bool swapped = false;
};

/// Ratio flags win over the parameter file; within the file, ratios win over
/// raw country values.
inline BaseParams resolve_base(const RunConfig& cfg) {
  std::optional<ParamsDocument> doc;
  if (cfg.params_file) {
    std::ifstream in(*cfg.params_file);
    if (!in) throw DomainError("cannot open parameter file '" + *cfg.params_file + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw DomainError(std::string("parameter file is not valid JSON: ") + e.what());
    }
    doc = parse_params_document(j);
  }

  BaseParams base;
  const auto alpha = cfg.alpha ? cfg.alpha : doc ? doc->alpha : std::nullopt;
  if (!alpha) throw DomainError("alpha is required (--alpha or params file)");
  base.alpha = *alpha;
  base.epsilon = cfg.epsilon ? cfg.epsilon : doc ? doc->epsilon : std::nullopt;

  if (cfg.lambda && cfg.beta) {
    base.lambda = *cfg.lambda;
    base.beta = *cfg.beta;
  } else if (cfg.lambda || cfg.beta) {
    throw DomainError("--lambda and --beta must be given together");
  } else if (doc && doc->lambda && doc->beta) {
    base.lambda = *doc->lambda;
    base.beta = *doc->beta;
  } else if (doc && doc->country1) {
    const auto r = normalize_ratios(*doc->country1, *doc->country2, base.alpha,
                                    base.epsilon.value_or(kDefaultEpsilon), cfg.scaling);
    base.lambda = r.lambda;
    base.beta = r.beta;
    base.swapped = r.swapped;
  } else {
    throw DomainError("lambda and beta are required (flags or params file)");
  }
  return base;
}

/// Oriented, validated ratios; epsilon defaults to 0 when lambda == beta and
/// to 1e-3 otherwise.
inline ConflictRatios to_ratios(const BaseParams& base) {
  auto probe = make_ratios(base.lambda, base.beta, base.alpha, base.epsilon.value_or(kDefaultEpsilon));
  if (!base.epsilon && is_equal_case(probe)) probe.epsilon = 0.0;
  validate(probe);
  probe.swapped = probe.swapped != base.swapped;
  return probe;
}

namespace detail {

class Sink {
public:
  Sink(const std::optional<std::string>& path, std::ostream& fallback) : os_(&fallback) {
    if (path) {
      file_.open(*path, std::ios::binary);
      if (!file_) throw DomainError("cannot open output file '" + *path + "'");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

private:
  std::ofstream file_;
  std::ostream* os_;
};

inline std::string companion_json_path(const std::string& path) {
  std::filesystem::path p(path);
  auto c = p;
  c.replace_extension(".json");
  if (c == p) c = std::filesystem::path(path + ".solution.json");
  return c.string();
}

inline json solve_document(const ConflictRatios& params, const SolveResult& r) {
  return json{{"params", params},
              {"method", to_string(r.choice)},
              {"solution", r.solution},
              {"diagnostics", r.diagnostics}};
}

inline json report_json(const VerificationReport& rep) {
  json probes = json::array();
  for (const auto& p : rep.probes) {
    probes.push_back({{"r1", p.r1}, {"best_response", p.best_response}, {"strategy", p.strategy}, {"gap", p.gap}});
  }
  json j{{"params", rep.params},
         {"solution", rep.solution},
         {"best_response", {{"probes", probes}, {"max_gap", rep.max_best_response_gap}, {"tolerance", rep.best_response_tol}}},
         {"ode_residual", {{"res1", rep.ode.res1}, {"res2", rep.ode.res2}, {"tolerance", rep.ode_tol}}},
         {"k0_cross_check", {{"k0", rep.solution.k0}, {"k0_root_exact", rep.k0_root},
                             {"gap_root", std::abs(rep.solution.k0 - rep.k0_root)}}},
         {"passed", rep.passed}};
  if (rep.k0_converged) {
    j["k0_cross_check"]["k0_converged"] = *rep.k0_converged;
    j["k0_cross_check"]["gap_converged"] = std::abs(rep.solution.k0 - *rep.k0_converged);
  } else {
    j["k0_cross_check"]["k0_converged"] = nullptr;
  }
  return j;
}

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{"n_draws",       "win_prob_1",      "win_prob_2",
                                             "tie_prob",      "mean_payoff_1",   "mean_payoff_2",
                                             "mean_production", "mean_transfer", "infeasible_bid_rate",
                                             "max_conservation_error", "seed"};
  return cols;
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void write_csv_rows(std::ostream& os, const std::vector<std::string>& cols, const std::vector<json>& rows) {
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_cell(row.at(cols[i]));
    os << '\n';
  }
}

inline int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto params = to_ratios(resolve_base(cfg));
  const auto result = solve(params, cfg.method, cfg.converge);
  const auto table = make_strategy_table(params, result.solution, cfg.grid_size);
  auto doc = solve_document(params, result);

  Sink sink(cfg.output_path, out);
  if (cfg.format.value_or(Format::Csv) == Format::Json) {
    doc["table"] = table;
    sink.stream() << doc.dump(2) << '\n';
  } else {
    write_table_csv(sink.stream(), table);
    if (cfg.output_path) {
      std::ofstream companion(companion_json_path(*cfg.output_path), std::ios::binary);
      if (!companion) throw DomainError("cannot write solution JSON next to the output");
      companion << doc.dump(2) << '\n';
    } else {
      err << doc.dump(2) << '\n';
    }
  }
  if (!result.diagnostics.converged) {
    err << "warning: K0 iteration did not converge; best iterate reported\n";
    return kExitDivergence;
  }
  return kExitOk;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto params = to_ratios(resolve_base(cfg));
  const auto result = solve(params, cfg.method, cfg.converge);
  VerifyOptions opts;
  opts.grid_size = cfg.grid_size;
  const auto rep = verify(params, result.solution, opts);
  auto j = report_json(rep);
  j["method"] = to_string(result.choice);
  j["diagnostics"] = result.diagnostics;
  Sink sink(cfg.output_path, out);
  sink.stream() << j.dump(2) << '\n';
  if (!rep.passed) {
    err << "verification failed: best-response gap " << rep.max_best_response_gap << " (tol "
        << rep.best_response_tol << "), ODE residuals " << rep.ode.res1 << ", " << rep.ode.res2 << " (tol "
        << rep.ode_tol << ")\n";
    return kExitVerificationFailed;
  }
  return kExitOk;
}

inline int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto params = to_ratios(resolve_base(cfg));
  const auto result = solve(params, cfg.method, cfg.converge);

  SimulationOptions opts;
  opts.threads = cfg.threads;
  std::ofstream trace;
  if (cfg.trace_path) {
    trace.open(*cfg.trace_path, std::ios::binary);
    if (!trace) throw DomainError("cannot open trace file '" + *cfg.trace_path + "'");
    write_trace_header(trace);
    opts.trace = [&trace](const DrawRecord& d) { write_trace_row(trace, d); };
  }
  const auto summary = simulate(StrategyPair(params, result.solution), cfg.n, cfg.seed, opts);

  Sink sink(cfg.output_path, out);
  if (cfg.format.value_or(Format::Json) == Format::Csv) {
    write_csv_rows(sink.stream(), summary_columns(), {json(summary)});
  } else {
    const json doc{{"params", params}, {"method", to_string(result.choice)}, {"solution", result.solution},
                   {"summary", summary}};
    sink.stream() << doc.dump(2) << '\n';
  }
  return kExitOk;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.sweep) throw DomainError("sweep requires --sweep param:from:to:steps");
  const auto& axis = *cfg.sweep;
  const BaseParams base = resolve_base(cfg);

  static const std::vector<std::string> cols{
      "param", "value", "lambda", "beta", "alpha", "epsilon", "swapped", "method", "status", "k0", "k1", "k2",
      "residual_bc_left1", "residual_bc_left2", "residual_bc_right", "fixed_point_residual", "converged",
      "win_prob_1"};
  std::vector<json> rows;
  for (int i = 0; i < axis.steps; ++i) {
    BaseParams point = base;
    const double v = axis.value(i);
    if (axis.param == "lambda") point.lambda = v;
    if (axis.param == "beta") point.beta = v;
    if (axis.param == "alpha") point.alpha = v;
    if (axis.param == "epsilon") point.epsilon = v;

    json row;
    for (const auto& c : cols) row[c] = nullptr;
    row["param"] = axis.param;
    row["value"] = v;
    try {
      const auto params = to_ratios(point);
      row["lambda"] = params.lambda;
      row["beta"] = params.beta;
      row["alpha"] = params.alpha;
      row["epsilon"] = params.epsilon;
      row["swapped"] = params.swapped;
      const auto result = solve(params, cfg.method, cfg.converge);
      row["method"] = to_string(result.choice);
      row["status"] = result.diagnostics.converged ? "ok" : "not_converged";
      row["k0"] = result.solution.k0;
      row["k1"] = result.solution.k1;
      row["k2"] = result.solution.k2;
      row["residual_bc_left1"] = result.diagnostics.residual_bc_left1;
      row["residual_bc_left2"] = result.diagnostics.residual_bc_left2;
      row["residual_bc_right"] = result.diagnostics.residual_bc_right;
      row["fixed_point_residual"] = result.diagnostics.fixed_point_residual;
      row["converged"] = result.diagnostics.converged;
      SimulationOptions opts;
      opts.threads = cfg.threads;
      row["win_prob_1"] = simulate(StrategyPair(params, result.solution), cfg.n, cfg.seed, opts).win_prob_1;
    } catch (const DivergenceError& e) {
      row["status"] = "diverged";
      err << "sweep point " << axis.param << "=" << v << ": " << e.what() << '\n';
    } catch (const DomainError& e) {
      row["status"] = "invalid";
      err << "sweep point " << axis.param << "=" << v << ": " << e.what() << '\n';
    }
    rows.push_back(std::move(row));
  }

  Sink sink(cfg.output_path, out);
  if (cfg.format.value_or(Format::Csv) == Format::Json) {
    sink.stream() << json(rows).dump(2) << '\n';
  } else {
    write_csv_rows(sink.stream(), cols, rows);
  }
  return kExitOk;
}

}  // namespace detail

/// Executes one command and returns the process exit status:
/// 0 success, 2 invalid configuration, 3 solver divergence,
/// 4 verification failure beyond tolerance.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (cfg.grid_size < 2) throw DomainError("grid size must be at least 2");
    switch (cfg.command) {
      case Command::Solve: return detail::run_solve(cfg, out, err);
      case Command::Verify: return detail::run_verify(cfg, out, err);
      case Command::Simulate: return detail::run_simulate(cfg, out, err);
      case Command::Sweep: return detail::run_sweep(cfg, out, err);
    }
  } catch (const DomainError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const DivergenceError& e) {
    err << "solver diverged: " << e.what() << " (trace:";
    for (double k : e.trace()) err << ' ' << k;
    err << ")\n";
    return kExitDivergence;
  } catch (const OracleError& e) {
    err << "verification error: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace apc::cli
