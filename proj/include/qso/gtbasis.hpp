#pragma once

// Gel'fand-Tsetlin tableaux for classical and nonclassical type irreducible
// representations of U'_q(so_n), their l-coordinates and one-step branching.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qso/errors.hpp"
#include "qso/qarith.hpp"

namespace qso {

enum class Kind { classical, nonclassical };

inline std::string to_string(Kind k) { return k == Kind::classical ? "classical" : "nonclassical"; }

inline Kind parse_kind(const std::string& s) {
  if (s == "classical") return Kind::classical;
  if (s == "nonclassical") return Kind::nonclassical;
  throw ValidationError("unknown representation kind '" + s + "'");
}

/// One row m_k of a tableau: floor(k/2) entries.
using Row = std::vector<HalfInt>;

inline std::string row_str(const Row& r) {
  std::string s = "(";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) s += ",";
    s += r[i].str();
  }
  return s + ")";
}

inline int row_length(int level) { return level / 2; }

/// Dominance (DC) / (DCN) for a highest-weight row at the given level.
inline bool is_dominant(const Row& m, int level, Kind kind) {
  if (level < 2 || static_cast<int>(m.size()) != row_length(level)) return false;
  const int p = row_length(level);
  if (kind == Kind::nonclassical) {
    for (auto v : m)
      if (v.is_integral()) return false;
    for (int i = 0; i + 1 < p; ++i)
      if (m[i] < m[i + 1]) return false;
    return m[p - 1] >= HalfInt::half();
  }
  for (auto v : m)
    if (v.is_integral() != m[0].is_integral()) return false;
  if (level % 2 == 1) {
    for (int i = 0; i + 1 < p; ++i)
      if (m[i] < m[i + 1]) return false;
    return m[p - 1] >= HalfInt(0);
  }
  for (int i = 0; i + 2 < p; ++i)
    if (m[i] < m[i + 1]) return false;
  if (p >= 2 && m[p - 2] < m[p - 1].abs()) return false;
  return true;
}

/// Betweenness between a row at `upper_level` and the row at upper_level - 1.
inline bool interlaces(const Row& upper, int upper_level, const Row& lower, Kind kind) {
  if (static_cast<int>(upper.size()) != row_length(upper_level) ||
      static_cast<int>(lower.size()) != row_length(upper_level - 1))
    return false;
  for (auto v : lower)
    if ((v - upper[0]).is_integral() == false) return false;
  const int p = row_length(upper_level);
  if (upper_level % 2 == 1) {
    // m_{1,2p+1} >= m_{1,2p} >= m_{2,2p+1} >= ... >= m_{p,2p+1} >= m_{p,2p} >= bound
    for (int i = 0; i < p; ++i) {
      if (lower[i] > upper[i]) return false;
      if (i + 1 < p && lower[i] < upper[i + 1]) return false;
    }
    if (kind == Kind::classical) return lower[p - 1] >= -upper[p - 1];
    return lower[p - 1] >= HalfInt::half();
  }
  // m_{1,2p} >= m_{1,2p-1} >= m_{2,2p} >= ... >= m_{p-1,2p-1} >= |m_{p,2p}| (or m_{p,2p})
  for (int i = 0; i + 1 < p; ++i) {
    if (lower[i] > upper[i]) return false;
    if (i + 2 < p && lower[i] < upper[i + 1]) return false;
  }
  if (p >= 2) {
    const HalfInt bound = kind == Kind::classical ? upper[p - 1].abs() : upper[p - 1];
    if (lower[p - 2] < bound) return false;
  }
  return true;
}

/// Per-entry [lo, hi] ranges for rows at upper_level - 1 interlacing `upper`.
inline std::vector<std::pair<HalfInt, HalfInt>> lower_row_ranges(const Row& upper, int upper_level,
                                                                 Kind kind) {
  const int p = row_length(upper_level);
  std::vector<std::pair<HalfInt, HalfInt>> ranges;
  if (upper_level % 2 == 1) {
    for (int i = 0; i < p; ++i) {
      HalfInt lo;
      if (i + 1 < p)
        lo = upper[i + 1];
      else if (kind == Kind::classical)
        lo = -upper[p - 1];
      else
        lo = HalfInt::half();
      ranges.emplace_back(lo, upper[i]);
    }
  } else {
    for (int i = 0; i + 1 < p; ++i) {
      HalfInt lo;
      if (i + 2 < p)
        lo = upper[i + 1];
      else
        lo = kind == Kind::classical ? upper[p - 1].abs() : upper[p - 1];
      ranges.emplace_back(lo, upper[i]);
    }
  }
  return ranges;
}

/// Cartesian product of integer-step ranges, emitted in lexicographically
/// decreasing order. Empty ranges yield nothing.
inline void for_each_in_ranges(const std::vector<std::pair<HalfInt, HalfInt>>& ranges,
                               const std::function<void(const Row&)>& visit) {
  Row cur(ranges.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == ranges.size()) {
      visit(cur);
      return;
    }
    for (HalfInt v = ranges[i].second; v >= ranges[i].first; v -= 1) {
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
}

/// All rows at upper_level - 1 interlacing `upper`, lexicographically decreasing.
inline std::vector<Row> lower_rows(const Row& upper, int upper_level, Kind kind) {
  std::vector<Row> out;
  for_each_in_ranges(lower_row_ranges(upper, upper_level, kind), [&](const Row& r) {
    if (interlaces(upper, upper_level, r, kind)) out.push_back(r);
  });
  return out;
}

/// Irrep label: rank n, kind, highest weight m_n and (nonclassical) signs
/// eps = (eps_2, ..., eps_n).
struct IrrepLabel {
  int n = 2;
  Kind kind = Kind::classical;
  Row weight;
  std::vector<int> eps;

  IrrepLabel() = default;
  IrrepLabel(int n_, Kind kind_, Row weight_, std::vector<int> eps_ = {})
      : n(n_), kind(kind_), weight(std::move(weight_)), eps(std::move(eps_)) {
    validate();
  }

  static IrrepLabel classical(int n, Row weight) { return {n, Kind::classical, std::move(weight)}; }
  static IrrepLabel nonclassical(int n, Row weight, std::vector<int> eps) {
    return {n, Kind::nonclassical, std::move(weight), std::move(eps)};
  }

  void validate() const {
    if (n < 2) throw ValidationError("algebra rank n must be at least 2");
    if (static_cast<int>(weight.size()) != row_length(n))
      throw ValidationError("weight for so_" + std::to_string(n) + " needs " +
                            std::to_string(row_length(n)) + " entries, got " +
                            std::to_string(weight.size()));
    if (kind == Kind::classical) {
      if (!eps.empty()) throw ValidationError("signs eps apply to nonclassical labels only");
      for (auto v : weight)
        if (v.is_integral() != weight[0].is_integral())
          throw ValidationError("classical weight " + row_str(weight) +
                                " mixes integral and half-integral entries");
    } else {
      if (static_cast<int>(eps.size()) != n - 1)
        throw ValidationError("nonclassical label for so_" + std::to_string(n) + " needs " +
                              std::to_string(n - 1) + " signs");
      for (int e : eps)
        if (e != 1 && e != -1) throw ValidationError("signs must be +1 or -1");
      for (auto v : weight)
        if (v.is_integral())
          throw ValidationError("nonclassical weight " + row_str(weight) +
                                " must be half-integral");
    }
    if (!is_dominant(weight, n, kind))
      throw ValidationError("weight " + row_str(weight) + " is not dominant for " +
                            to_string(kind) + " so_" + std::to_string(n));
  }

  /// eps_i for 2 <= i <= n; +1 for classical labels.
  int eps_at(int i) const { return eps.empty() ? 1 : eps.at(i - 2); }

  /// Same kind, signs truncated to so_m (m <= n).
  IrrepLabel restricted(int m, Row w) const {
    std::vector<int> e;
    if (kind == Kind::nonclassical) e.assign(eps.begin(), eps.begin() + (m - 1));
    return {m, kind, std::move(w), std::move(e)};
  }

  std::string str() const {
    std::string s = "so_" + std::to_string(n) + " " + to_string(kind) + " " + row_str(weight);
    if (kind == Kind::nonclassical) {
      s += " eps=";
      for (int e : eps) s += e > 0 ? '+' : '-';
    }
    return s;
  }

  friend bool operator==(const IrrepLabel&, const IrrepLabel&) = default;
};

/// A tableau {m_n, m_{n-1}, ..., m_2}; rows[0] is the top row.
struct GTPattern {
  std::vector<Row> rows;

  int n() const { return static_cast<int>(rows.size()) + 1; }
  const Row& at_level(int level) const { return rows.at(n() - level); }
  Row& at_level(int level) { return rows.at(n() - level); }
  HalfInt m12() const { return rows.back().at(0); }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < rows.size(); ++i) s += (i ? " " : "") + row_str(rows[i]);
    return s;
  }

  friend bool operator==(const GTPattern&, const GTPattern&) = default;
  friend auto operator<=>(const GTPattern& a, const GTPattern& b) { return a.rows <=> b.rows; }
};

/// Whether every pair of adjacent rows obeys betweenness for `kind`.
inline bool is_valid_pattern(const GTPattern& xi, Kind kind) {
  for (std::size_t i = 0; i + 1 < xi.rows.size(); ++i) {
    const int level = xi.n() - static_cast<int>(i);
    if (!interlaces(xi.rows[i], level, xi.rows[i + 1], kind)) return false;
  }
  return true;
}

/// Ordered basis of an irrep plus the inverse lookup.
class BasisIndex {
 public:
  BasisIndex(IrrepLabel label, std::vector<GTPattern> patterns)
      : label_(std::move(label)), patterns_(std::move(patterns)) {
    for (std::size_t i = 0; i < patterns_.size(); ++i) lookup_.emplace(patterns_[i], i);
  }

  const IrrepLabel& label() const { return label_; }
  const std::vector<GTPattern>& patterns() const { return patterns_; }
  const GTPattern& operator[](std::size_t i) const { return patterns_[i]; }
  std::size_t size() const { return patterns_.size(); }

  std::optional<std::size_t> find(const GTPattern& xi) const {
    auto it = lookup_.find(xi);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t index_of(const GTPattern& xi) const {
    auto i = find(xi);
    if (!i) throw ValidationError("pattern " + xi.str() + " not in basis of " + label_.str());
    return *i;
  }

 private:
  IrrepLabel label_;
  std::vector<GTPattern> patterns_;
  std::map<GTPattern, std::size_t> lookup_;
};

/// All tableaux of `label`, lexicographically decreasing row by row.
inline BasisIndex enumerate_patterns(const IrrepLabel& label) {
  label.validate();
  std::vector<GTPattern> out;
  GTPattern cur;
  cur.rows.push_back(label.weight);
  std::function<void(int)> rec = [&](int level) {
    if (level == 2) {
      out.push_back(cur);
      return;
    }
    for (const Row& r : lower_rows(cur.rows.back(), level, label.kind)) {
      cur.rows.push_back(r);
      rec(level - 1);
      cur.rows.pop_back();
    }
  };
  rec(label.n);
  return {label, std::move(out)};
}

inline std::shared_ptr<const BasisIndex> make_basis(const IrrepLabel& label) {
  return std::make_shared<const BasisIndex>(enumerate_patterns(label));
}

inline std::size_t dimension(const IrrepLabel& label) { return enumerate_patterns(label).size(); }

/// l_{j,2p+1} = m_j + p - j + 1, l_{j,2p} = m_j + p - j (j from 1).
inline Row l_coords(const Row& m, int level) {
  if (static_cast<int>(m.size()) != row_length(level))
    throw ValidationError("row " + row_str(m) + " has wrong length for level " +
                          std::to_string(level));
  const int p = row_length(level);
  const int shift = level % 2 == 1 ? 1 : 0;
  Row l(m.size());
  for (int j = 1; j <= p; ++j) l[j - 1] = m[j - 1] + HalfInt(p - j + shift);
  return l;
}

/// One element of S(m): a target weight, flagged when it stands in for the
/// nonclassical m^{-p} at even level with m_p = 1/2.
struct BranchTarget {
  Row weight;
  bool replaced = false;

  friend bool operator==(const BranchTarget&, const BranchTarget&) = default;
};

/// S(m) for the tensor product with the vector representation, in
/// lexicographically decreasing order.
inline std::vector<BranchTarget> branching_set(const Row& m, int level, Kind kind) {
  if (!is_dominant(m, level, kind))
    throw ValidationError("branching_set: " + row_str(m) + " is not dominant at level " +
                          std::to_string(level));
  const int p = row_length(level);
  std::vector<BranchTarget> out;
  for (int j = 0; j < p; ++j) {
    for (int sign : {+1, -1}) {
      Row s = m;
      s[j] += HalfInt(sign);
      if (kind == Kind::nonclassical && level % 2 == 0 && sign < 0 && j == p - 1 &&
          m[p - 1] == HalfInt::half()) {
        out.push_back({m, true});
        continue;
      }
      if (is_dominant(s, level, kind)) out.push_back({s, false});
    }
  }
  if (level % 2 == 1) {
    const bool omit_self = kind == Kind::classical && m[p - 1] == HalfInt(0);
    if (!omit_self) out.push_back({m, false});
  }
  std::sort(out.begin(), out.end(),
            [](const BranchTarget& a, const BranchTarget& b) { return a.weight > b.weight; });
  return out;
}

/// Convenience: the branching targets of a label, as labels.
inline std::vector<IrrepLabel> branching_labels(const IrrepLabel& label) {
  std::vector<IrrepLabel> out;
  for (const auto& t : branching_set(label.weight, label.n, label.kind))
    out.push_back(label.restricted(label.n, t.weight));
  return out;
}

}  // namespace qso
