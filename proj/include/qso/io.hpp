#pragma once

// JSON serialization. Documents are built as nlohmann::ordered_json and
// written by a small printer that formats every floating value with %.17g so
// golden files round-trip exactly and are stable across runs.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qso/cgc.hpp"
#include "qso/reps.hpp"
#include "qso/wigner.hpp"

namespace qso {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";  // also folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        write_json(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_json(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Compact JSON with %.17g floats.
inline std::string to_json_string(const Json& j) {
  std::string out;
  detail::write_json(j, out);
  return out;
}

inline Json halfint_list(const Row& r) {
  Json a = Json::array();
  for (auto v : r) a.push_back(v.twice());
  return a;
}

inline std::string eps_string(const std::vector<int>& eps) {
  std::string s;
  for (int e : eps) s += e > 0 ? '+' : '-';
  return s;
}

/// Label header; weights as doubled integers.
inline Json to_json(const IrrepLabel& l) {
  Json j;
  j["n"] = l.n;
  j["kind"] = to_string(l.kind);
  j["weight"] = halfint_list(l.weight);
  if (l.kind == Kind::nonclassical) j["eps"] = eps_string(l.eps);
  return j;
}

/// Pattern as nested arrays of doubled integers, top row first.
inline Json to_json(const GTPattern& p) {
  Json a = Json::array();
  for (const auto& r : p.rows) a.push_back(halfint_list(r));
  return a;
}

inline Json patterns_json(const BasisIndex& b) {
  Json a = Json::array();
  for (const auto& p : b.patterns()) a.push_back(to_json(p));
  return a;
}

inline Json to_json(const GenId& g) {
  Json j;
  j["upper"] = g.upper;
  j["lower"] = g.lower;
  j["sign"] = g.sign;
  return j;
}

/// {dim, gen, triplets: [[row, col, re, im], ...]} sorted by row, then column.
inline Json to_json(const GeneratorMatrix& g) {
  struct Entry {
    Eigen::Index r, c;
    Cplx v;
  };
  std::vector<Entry> es;
  for (int c = 0; c < g.mat.outerSize(); ++c)
    for (SparseMat::InnerIterator it(g.mat, c); it; ++it)
      if (it.value() != Cplx(0.0)) es.push_back({it.row(), c, it.value()});
  std::sort(es.begin(), es.end(),
            [](const Entry& a, const Entry& b) { return a.r != b.r ? a.r < b.r : a.c < b.c; });
  Json t = Json::array();
  for (const auto& e : es) t.push_back(Json::array({e.r, e.c, e.v.real(), e.v.imag()}));
  Json j;
  j["dim"] = g.mat.rows();
  j["gen"] = to_json(g.gen);
  j["triplets"] = t;
  return j;
}

/// Inverse of to_json(GeneratorMatrix); validates indices and shape.
inline GeneratorMatrix generator_from_json(const Json& j) {
  try {
    const auto dim = j.at("dim").get<Eigen::Index>();
    if (dim <= 0) throw ValidationError("matrix dim must be positive");
    GeneratorMatrix g;
    const auto& gen = j.at("gen");
    g.gen = GenId{gen.at("upper").get<int>(), gen.at("lower").get<int>(),
                  gen.value("sign", 0)};
    std::vector<Triplet> t;
    for (const auto& e : j.at("triplets")) {
      if (!e.is_array() || e.size() != 4) throw ValidationError("triplet must be [row, col, re, im]");
      const auto r = e[0].get<Eigen::Index>();
      const auto c = e[1].get<Eigen::Index>();
      if (r < 0 || c < 0 || r >= dim || c >= dim) throw ValidationError("triplet index out of range");
      t.emplace_back(static_cast<int>(r), static_cast<int>(c),
                     Cplx(e[2].get<double>(), e[3].get<double>()));
    }
    g.mat = from_triplets(dim, dim, t);
    return g;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed matrix JSON: ") + e.what());
  }
}

/// Reads {"generators": [matrix, ...]} (or a bare array of matrices).
inline std::vector<GeneratorMatrix> generators_from_json(const Json& j) {
  const Json& arr = j.is_object() && j.contains("generators") ? j.at("generators") : j;
  if (!arr.is_array() || arr.empty()) throw ValidationError("expected a list of generator matrices");
  std::vector<GeneratorMatrix> out;
  for (const auto& m : arr) out.push_back(generator_from_json(m));
  return out;
}

inline Json to_json(const RelationReport& r) {
  Json a = Json::array();
  for (const auto& x : r.results) {
    Json j;
    j["family"] = x.family;
    j["i"] = x.i;
    j["j"] = x.j;
    j["residual"] = x.residual;
    j["scale"] = x.scale;
    j["pass"] = x.pass;
    a.push_back(j);
  }
  return a;
}

/// {source, target, entries: [{target_pattern, terms: [{k, source_pattern, re, im}]}]}
inline Json to_json(const CgcTable& t) {
  const auto src = enumerate_patterns(t.source);
  const auto tgt = enumerate_patterns(t.target);
  Json j;
  j["source"] = to_json(t.source);
  j["target"] = to_json(t.target);
  if (t.replaced) j["replaced"] = true;
  Json entries = Json::array();
  for (std::size_t ti = 0; ti < t.entries.size(); ++ti) {
    Json terms = Json::array();
    for (const auto& term : t.entries[ti]) {
      Json x;
      x["k"] = slot_str(term.slot);
      x["source_pattern"] = to_json(src[term.source]);
      x["re"] = term.value.real();
      x["im"] = term.value.imag();
      terms.push_back(x);
    }
    Json e;
    e["target_pattern"] = to_json(tgt[ti]);
    e["terms"] = terms;
    entries.push_back(e);
  }
  j["entries"] = entries;
  return j;
}

/// {pairs: [{m_target, s_target, m_source, s_source, re, im, residual}]}
inline Json to_json(const ReducedElements& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json j;
    j["m_target"] = halfint_list(p.target.weight);
    j["s_target"] = p.s_target;
    j["m_source"] = halfint_list(p.source.weight);
    j["s_source"] = p.s_source;
    j["re"] = p.value.real();
    j["im"] = p.value.imag();
    j["residual"] = p.residual;
    pairs.push_back(j);
  }
  Json j;
  j["pairs"] = pairs;
  return j;
}

}  // namespace qso
