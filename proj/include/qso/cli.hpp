#pragma once

// Command-line front end: qso dim | check | decompose | reduced.
//
// Exit codes: 0 success, 1 numerical check failure, 2 invalid input.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qso/cgc.hpp"
#include "qso/io.hpp"
#include "qso/reps.hpp"
#include "qso/tensorprod.hpp"
#include "qso/wigner.hpp"

namespace qso {

struct RunConfig {
  int algebra = 3;
  std::string kind = "classical";
  std::string weight;
  std::string eps;
  std::string ambient;
  std::string sector;
  std::vector<double> q{1.3, 0.7};
  std::optional<double> tol;
  std::string format = "json";
  std::string out;
  std::string matrices;
  bool vector = false;
  bool list = false;
};

inline Row parse_weight(const std::string& text) {
  if (text.empty()) throw ValidationError("a weight is required (e.g. --weight 1,0)");
  Row r;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    r.push_back(HalfInt::parse(item));
  }
  if (!text.empty() && text.back() == ',') throw ValidationError("malformed weight '" + text + "'");
  return r;
}

inline std::vector<int> parse_eps(const std::string& text) {
  std::vector<int> e;
  for (char c : text) {
    if (c == '+')
      e.push_back(1);
    else if (c == '-')
      e.push_back(-1);
    else
      throw ValidationError("eps must consist of '+' and '-', got '" + text + "'");
  }
  return e;
}

inline IrrepLabel make_label(int n, const std::string& kind, const std::string& weight,
                             const std::string& eps) {
  return IrrepLabel(n, parse_kind(kind), parse_weight(weight), parse_eps(eps));
}

/// Default tolerance: QSO_REPS_TOL when set, else 1e-9; --tol wins over both.
inline double resolve_tolerance(const std::optional<double>& flag) {
  if (flag) {
    if (!(*flag > 0.0)) throw ValidationError("--tol must be positive");
    return *flag;
  }
  if (const char* env = std::getenv("QSO_REPS_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0))
      throw ValidationError(std::string("QSO_REPS_TOL is not a positive number: ") + env);
    return v;
  }
  return 1e-9;
}

namespace detail {

struct Emitter {
  std::string text;
  void line(const std::string& s) { text += s + "\n"; }
};

inline std::string csv_num(double v) { return format_double(v); }

inline int cmd_dim(const RunConfig& cfg, Emitter& em) {
  const IrrepLabel label = make_label(cfg.algebra, cfg.kind, cfg.weight, cfg.eps);
  const auto basis = enumerate_patterns(label);
  if (cfg.format == "csv") {
    em.line("dim");
    em.line(std::to_string(basis.size()));
    if (cfg.list) {
      em.line("pattern");
      for (const auto& p : basis.patterns()) em.line("\"" + to_json_string(to_json(p)) + "\"");
    }
    return 0;
  }
  Json j;
  j["dim"] = basis.size();
  if (cfg.list) j["patterns"] = patterns_json(basis);
  em.line(to_json_string(j));
  return 0;
}

inline int cmd_check(const RunConfig& cfg, double tol, Emitter& em) {
  std::optional<IrrepLabel> label;
  std::vector<GeneratorMatrix> loaded;
  if (!cfg.matrices.empty()) {
    std::ifstream in(cfg.matrices);
    if (!in) throw ValidationError("cannot read matrices file '" + cfg.matrices + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ValidationError(std::string("matrices file is not valid JSON: ") + e.what());
    }
    loaded = generators_from_json(j);
  } else if (!cfg.vector) {
    label = make_label(cfg.algebra, cfg.kind, cfg.weight, cfg.eps);
  }
  bool all = true;
  Json results = Json::array();
  if (cfg.format == "csv") em.line("q,family,i,j,residual,scale,pass");
  for (double q : cfg.q) {
    const QContext ctx(q, tol, tol);
    std::vector<GeneratorMatrix> mats;
    if (!loaded.empty())
      mats = loaded;
    else if (cfg.vector)
      mats = vector_rep(cfg.algebra, ctx);
    else
      mats = build_representation(*label, ctx);
    const RelationReport rep = check_relations(mats, ctx);
    all = all && rep.pass();
    if (cfg.format == "csv") {
      for (const auto& r : rep.results)
        em.line(csv_num(q) + "," + r.family + "," + std::to_string(r.i) + "," +
                std::to_string(r.j) + "," + csv_num(r.residual) + "," + csv_num(r.scale) + "," +
                (r.pass ? "true" : "false"));
      continue;
    }
    Json j;
    j["q"] = q;
    j["dim"] = mats.front().mat.rows();
    j["pass"] = rep.pass();
    j["max_residual"] = rep.max_residual();
    j["relations"] = to_json(rep);
    results.push_back(j);
  }
  if (cfg.format != "csv") {
    Json j;
    if (label) j["label"] = to_json(*label);
    j["results"] = results;
    j["pass"] = all;
    em.line(to_json_string(j));
  }
  return all ? 0 : 1;
}

inline int cmd_decompose(const RunConfig& cfg, double tol, Emitter& em) {
  const IrrepLabel label = make_label(cfg.algebra, cfg.kind, cfg.weight, cfg.eps);
  bool all = true;
  Json results = Json::array();
  if (cfg.format == "csv") em.line("q,target,dim,max_residual,pass");
  for (double q : cfg.q) {
    const QContext ctx(q, tol, tol);
    const Decomposition dec = assemble_decomposition(label, ctx, false);
    all = all && dec.pass();
    if (cfg.format == "csv") {
      for (const auto& b : dec.blocks)
        em.line(csv_num(q) + ",\"" + row_str(b.table.target.weight) + "\"," +
                std::to_string(b.table.entries.size()) + "," +
                csv_num(b.max_relative_residual()) + "," + (b.pass() ? "true" : "false"));
      continue;
    }
    Json blocks = Json::array(), tables = Json::array();
    for (const auto& b : dec.blocks) {
      Json bj;
      bj["target"] = halfint_list(b.table.target.weight);
      bj["label"] = row_str(b.table.target.weight);
      bj["dim"] = b.table.entries.size();
      if (b.table.replaced) bj["replaced"] = true;
      Json res = Json::array();
      for (const auto& c : b.checks) res.push_back(c.residual);
      bj["residuals"] = res;
      bj["max_relative_residual"] = b.max_relative_residual();
      bj["pass"] = b.pass();
      blocks.push_back(bj);
      tables.push_back(to_json(b.table));
    }
    Json j;
    j["q"] = q;
    j["blocks"] = blocks;
    j["tensor_dim"] = dec.tensor_dim();
    j["sum_rule"] = dec.sum_rule();
    j["rank"] = dec.rank;
    j["pass"] = dec.pass();
    j["tables"] = tables;
    results.push_back(j);
  }
  if (cfg.format != "csv") {
    Json j;
    j["source"] = to_json(label);
    j["results"] = results;
    j["pass"] = all;
    em.line(to_json_string(j));
  }
  return all ? 0 : 1;
}

inline constexpr double reduced_ratio_tol = 1e-8;
inline constexpr double reduced_forbidden_tol = 1e-10;

inline int cmd_reduced(const RunConfig& cfg, double tol, Emitter& em) {
  const std::string& wtext = cfg.ambient.empty() ? cfg.weight : cfg.ambient;
  const IrrepLabel ambient = make_label(cfg.algebra + 1, cfg.kind, wtext, cfg.eps);
  std::optional<Kind> sector;
  if (!cfg.sector.empty()) sector = parse_kind(cfg.sector);
  bool all = true;
  Json results = Json::array();
  if (cfg.format == "csv") em.line("q,m_target,s_target,m_source,s_source,re,im,residual");
  for (double q : cfg.q) {
    const QContext ctx(q, tol, tol);
    const VectorOperator v = canonical_vector_operator(ambient, ctx);
    const RelationReport vo = check_vector_operator(v, ctx);
    ReducedElements red = reduced_matrix_elements(v, ctx, ambient.weight, false);
    if (sector) {
      std::erase_if(red.pairs, [&](const ReducedPair& p) { return p.source.kind != *sector; });
      std::erase_if(red.forbidden, [&](const ForbiddenPair& p) { return p.source.kind != *sector; });
    }
    const bool ok = vo.pass() && red.max_residual() <= reduced_ratio_tol &&
                    red.max_forbidden() <= reduced_forbidden_tol;
    all = all && ok;
    if (cfg.format == "csv") {
      for (const auto& p : red.pairs)
        em.line(csv_num(q) + ",\"" + row_str(p.target.weight) + "\"," + std::to_string(p.s_target) +
                ",\"" + row_str(p.source.weight) + "\"," + std::to_string(p.s_source) + "," +
                csv_num(p.value.real()) + "," + csv_num(p.value.imag()) + "," +
                csv_num(p.residual));
      continue;
    }
    Json j;
    j["q"] = q;
    j["vector_operator_pass"] = vo.pass();
    j["vector_operator_max_relative"] = vo.max_relative();
    j["pairs"] = to_json(red)["pairs"];
    j["max_residual"] = red.max_residual();
    j["max_forbidden"] = red.max_forbidden();
    j["pass"] = ok;
    results.push_back(j);
  }
  if (cfg.format != "csv") {
    Json j;
    j["ambient"] = to_json(ambient);
    j["results"] = results;
    j["pass"] = all;
    em.line(to_json_string(j));
  }
  return all ? 0 : 1;
}

}  // namespace detail

/// Runs the CLI on `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Representations of U'_q(so_n) in the Gel'fand-Tsetlin basis", "qso"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool needs_weight) {
    sub->add_option("--algebra", cfg.algebra, "rank n of so_n")->required()->check(CLI::Range(2, 64));
    sub->add_option("--kind", cfg.kind, "classical | nonclassical")
        ->check(CLI::IsMember({"classical", "nonclassical"}));
    auto* w = sub->add_option("--weight", cfg.weight, "highest weight, e.g. 1,0 or 3/2,1/2");
    if (needs_weight) w->required();
    sub->add_option("--eps", cfg.eps, "nonclassical signs, e.g. ++-");
    sub->add_option("--q", cfg.q, "evaluation points")->delimiter(',');
    sub->add_option("--tol", cfg.tol, "absolute and relative tolerance");
    sub->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "write output to this file");
  };
  auto* dim = app.add_subcommand("dim", "dimension of an irrep");
  common(dim, true);
  dim->add_flag("--list", cfg.list, "also list the tableaux");
  auto* check = app.add_subcommand("check", "verify the defining relations");
  common(check, false);
  check->add_option("--matrices", cfg.matrices, "JSON file with generator matrices");
  check->add_flag("--vector", cfg.vector, "check the vector representation of so_n");
  auto* decompose = app.add_subcommand("decompose", "decompose T_1 (x) T_m with CGC tables");
  common(decompose, true);
  auto* reduced = app.add_subcommand("reduced", "reduced matrix elements of the canonical vector operator");
  common(reduced, false);
  reduced->add_option("--ambient", cfg.ambient, "so_{n+1} weight of the ambient irrep");
  reduced->add_option("--sector", cfg.sector, "keep only classical or nonclassical blocks")
      ->check(CLI::IsMember({"classical", "nonclassical"}));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (check->parsed() && cfg.matrices.empty() && !cfg.vector && cfg.weight.empty())
      throw ValidationError("check needs --weight, --vector or --matrices");
    if (reduced->parsed() && cfg.ambient.empty() && cfg.weight.empty())
      throw ValidationError("reduced needs --ambient");
    if (cfg.q.empty()) throw ValidationError("at least one q value is required");
    for (double q : cfg.q) QContext{q}.validate();
    const double tol = resolve_tolerance(cfg.tol);
    detail::Emitter em;
    int code = 0;
    if (dim->parsed())
      code = detail::cmd_dim(cfg, em);
    else if (check->parsed())
      code = detail::cmd_check(cfg, tol, em);
    else if (decompose->parsed())
      code = detail::cmd_decompose(cfg, tol, em);
    else
      code = detail::cmd_reduced(cfg, tol, em);
    if (cfg.out.empty()) {
      out << em.text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw ValidationError("cannot write '" + cfg.out + "'");
      f << em.text;
    }
    return code;
  } catch (const std::invalid_argument& e) {  // ValidationError, DimensionError
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qso
