#pragma once

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "apc/core_model.hpp"
#include "apc/equal_solver.hpp"
#include "apc/errors.hpp"
#include "apc/general_solver.hpp"
#include "apc/oracle.hpp"
#include "apc/simulator.hpp"

namespace apc {

using json = nlohmann::json;

/// 17 significant digits, '.' decimal point; round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DomainError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

inline void to_json(json& j, const ConflictRatios& p) {
  j = json{{"lambda", p.lambda}, {"beta", p.beta}, {"alpha", p.alpha}, {"epsilon", p.epsilon}, {"swapped", p.swapped}};
}

inline void to_json(json& j, const EquilibriumSolution& s) {
  j = json{{"k0", s.k0}, {"k1", s.k1}, {"k2", s.k2}, {"method", to_string(s.method)}};
  j["order"] = s.order ? json(*s.order) : json(nullptr);
}

inline void to_json(json& j, const SolverDiagnostics& d) {
  j = json{{"k0_trace", d.k0_trace},
           {"residual_bc_left1", d.residual_bc_left1},
           {"residual_bc_left2", d.residual_bc_left2},
           {"residual_bc_right", d.residual_bc_right},
           {"fixed_point_residual", d.fixed_point_residual},
           {"converged", d.converged}};
}

inline void to_json(json& j, const SimulationSummary& s) {
  j = json{{"n_draws", s.n_draws},
           {"win_prob_1", s.win_prob_1},
           {"win_prob_2", s.win_prob_2},
           {"tie_prob", s.tie_prob},
           {"mean_payoff_1", s.mean_payoff_1},
           {"mean_payoff_2", s.mean_payoff_2},
           {"mean_production", s.mean_production},
           {"mean_transfer", s.mean_transfer},
           {"infeasible_bid_rate", s.infeasible_bid_rate},
           {"max_conservation_error", s.max_conservation_error},
           {"seed", s.seed}};
}

inline void to_json(json& j, const StrategyTable& t) {
  json rows = json::array();
  for (const auto& r : t.grid) {
    rows.push_back({{"r", r.r}, {"f1", r.f1}, {"f2", r.f2}, {"feasible1", r.feasible1}, {"feasible2", r.feasible2}});
  }
  j = json{{"params", t.params}, {"solution", t.solution}, {"grid", std::move(rows)}};
}

inline constexpr std::string_view kTableHeader = "r,f1,f2,feasible1,feasible2";

/// CSV with a header row, LF line endings and 17 significant digits.
inline void write_table_csv(std::ostream& os, const StrategyTable& t) {
  os << kTableHeader << '\n';
  for (const auto& r : t.grid) {
    os << format_double(r.r) << ',' << format_double(r.f1) << ',' << format_double(r.f2) << ','
       << (r.feasible1 ? "true" : "false") << ',' << (r.feasible2 ? "true" : "false") << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw DomainError("malformed boolean '" + std::string(s) + "'");
}

}  // namespace detail

/// Reads the rows written by write_table_csv. Params and solution are not
/// part of the CSV and are left for the caller to attach.
inline std::vector<TableRow> read_table_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTableHeader) throw DomainError("missing or unexpected table header");
  std::vector<TableRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 5) throw DomainError("table row must have 5 columns");
    rows.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2]),
                    detail::parse_bool(cells[3]), detail::parse_bool(cells[4])});
  }
  return rows;
}

inline constexpr std::string_view kTraceHeader = "draw,r1,r2,b1,b2,winner,w1,w2";

inline void write_trace_header(std::ostream& os) { os << kTraceHeader << '\n'; }

inline void write_trace_row(std::ostream& os, const DrawRecord& d) {
  os << d.draw << ',' << format_double(d.r1) << ',' << format_double(d.r2) << ',' << format_double(d.b1) << ','
     << format_double(d.b2) << ',' << to_string(d.winner) << ',' << format_double(d.w1) << ','
     << format_double(d.w2) << '\n';
}

/// Parameters from a JSON document: either raw per-country values
/// (lambda1_tilde, beta1_tilde, R1, lambda2_tilde, beta2_tilde, R2) or the
/// ratios lambda and beta directly, plus alpha and an optional epsilon.
struct ParamsDocument {
  std::optional<double> lambda;
  std::optional<double> beta;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::optional<CountryParams> country1;
  std::optional<CountryParams> country2;
};

inline ParamsDocument parse_params_document(const json& j) {
  if (!j.is_object()) throw DomainError("parameter document must be a JSON object");
  auto num = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_number()) throw DomainError(std::string("parameter '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  ParamsDocument doc;
  doc.lambda = num("lambda");
  doc.beta = num("beta");
  doc.alpha = num("alpha");
  doc.epsilon = num("epsilon");
  const auto l1 = num("lambda1_tilde"), b1 = num("beta1_tilde"), r1 = num("R1");
  const auto l2 = num("lambda2_tilde"), b2 = num("beta2_tilde"), r2 = num("R2");
  const bool any_raw = l1 || b1 || r1 || l2 || b2 || r2;
  if (any_raw) {
    if (!(l1 && b1 && r1 && l2 && b2 && r2)) throw DomainError("raw parameters need all six country values");
    doc.country1 = CountryParams{*l1, *b1, *r1};
    doc.country2 = CountryParams{*l2, *b2, *r2};
  }
  return doc;
}

}  // namespace apc
