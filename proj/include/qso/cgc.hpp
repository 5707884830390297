#pragma once

// Clebsch-Gordan coefficients for T_1 (x) T_m: the so_2 coupled vectors, the
// explicit so_3 tables, the top-level (k = n) coefficients and the recursion
// through an auxiliary so_{n+1} weight for all other k. Blocks are assembled
// into intertwiners and the decomposition is verified numerically.

#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qso/reps.hpp"
#include "qso/tensorprod.hpp"

namespace qso {

// CGC slots: '+' and '-' are the coupled so_2 vectors, 3..n the plain v_k.
// Encoding '+' as 1 and '-' as 2 makes the integer order the slot order.
inline constexpr int slot_plus = 1;
inline constexpr int slot_minus = 2;

inline std::string slot_str(int slot) {
  if (slot == slot_plus) return "+";
  if (slot == slot_minus) return "-";
  return std::to_string(slot);
}

/// Coefficients (on v_1, v_2) of v_+^{(m)} and v_-^{(m)}.
struct CoupledPair {
  std::array<Cplx, 2> plus;
  std::array<Cplx, 2> minus;
};

/// classical: v_{+-} = -+ i q^{-1/2 +- m} v_1 + v_2;
/// nonclassical: v_{+-} = -eps_2 q^{-1/2 +- m} v_1 + v_2.
inline CoupledPair so2_coupled_vectors(HalfInt m, Kind kind, int eps2, const QContext& ctx) {
  const double up = q_power(m - HalfInt::half(), ctx);
  const double down = q_power(-m - HalfInt::half(), ctx);
  if (kind == Kind::classical) return {{Cplx(0.0, -up), 1.0}, {Cplx(0.0, down), 1.0}};
  return {{Cplx(-eps2 * up), 1.0}, {Cplx(-eps2 * down), 1.0}};
}

// ---------------------------------------------------------------------------
// Selection rules

namespace detail {

inline bool in_branching(const Row& target, const Row& source, int level, Kind kind) {
  if (!is_dominant(source, level, kind)) return false;
  for (const auto& t : branching_set(source, level, kind))
    if (t.weight == target) return true;
  return false;
}

}  // namespace detail

/// Whether (slot, source | target) can be nonzero; the zero conditions for
/// both kinds. `source` carries the tensor factor's weight m_n, `target` the
/// coupled weight m'_n.
inline bool cgc_allowed(int slot, const GTPattern& source, const GTPattern& target, Kind kind) {
  const int n = source.n();
  if (target.n() != n) return false;
  if (slot < 1 || slot > n) return false;
  if (!detail::in_branching(target.at_level(n), source.at_level(n), n, kind)) return false;
  const int lowest = slot >= 3 ? slot : 3;
  for (int s = n - 1; s >= lowest; --s)
    if (!detail::in_branching(target.at_level(s), source.at_level(s), s, kind)) return false;
  if (slot >= 3) {
    for (int s = slot - 1; s >= 2; --s)
      if (target.at_level(s) != source.at_level(s)) return false;
    return true;
  }
  const HalfInt ms = source.m12();
  const HalfInt mt = target.m12();
  if (slot == slot_plus) return mt == ms + 1;
  if (kind == Kind::nonclassical && ms == HalfInt::half()) return mt == HalfInt::half();
  return mt == ms - 1;
}

// ---------------------------------------------------------------------------
// so_3 explicit tables

/// One target vector |l', m> = alpha v_+ (x) |l, a> + beta v_3 (x) |l, m>
///                              + gamma v_- (x) |l, m+1>,
/// where a = m - 1 except for the nonclassical m = 1/2 column (a = 1/2, and
/// the alpha term then sits in the '-' slot).
struct So3Column {
  HalfInt m;
  HalfInt alpha_source;
  int alpha_slot = slot_plus;
  Cplx alpha, beta, gamma;
};

namespace detail {

inline double d_classical(HalfInt m, const QContext& ctx) {
  return 1.0 / std::sqrt(q_sum(m, ctx) * q_sum(m + 1, ctx));
}

inline double d_nonclassical(HalfInt m, const QContext& ctx) {
  const double v = q_diff(m, ctx) * q_diff(m + 1, ctx);
  if (v == 0.0) throw SingularityError("d~_m vanishes at m = " + m.str());
  return 1.0 / std::sqrt(v);
}

inline Cplx root_product(std::initializer_list<HalfInt> args, const QContext& ctx) {
  double v = 1.0;
  for (auto a : args) v *= q_bracket(a, ctx);
  return std::sqrt(Cplx(v, 0.0));
}

}  // namespace detail

/// The so_3 CGCs alpha, beta, gamma (or their nonclassical counterparts) for
/// T_1 (x) T_l -> T_{l_target}.
inline std::vector<So3Column> so3_cgc(HalfInt l, HalfInt l_target, Kind kind,
                                      const std::vector<int>& eps, const QContext& ctx) {
  const IrrepLabel src(3, kind, {l}, kind == Kind::nonclassical ? eps : std::vector<int>{});
  bool admissible = false;
  for (const auto& t : branching_set(src.weight, 3, kind)) admissible |= t.weight[0] == l_target;
  if (!admissible)
    throw ValidationError("l' = " + l_target.str() + " does not occur in T_1 (x) T_" + l.str());
  const int eps3 = src.eps_at(3);
  const HalfInt h = HalfInt::half();
  auto qp = [&](HalfInt a) { return q_power(a, ctx); };
  auto br = [&](HalfInt a) { return q_bracket(a, ctx); };
  const int shift = (l_target - l).twice() / 2;  // +1, 0 or -1

  std::vector<So3Column> out;
  const HalfInt lo = kind == Kind::classical ? -l_target : h;
  for (HalfInt m = lo; m <= l_target; m += 1) {
    So3Column c{m, m - 1, slot_plus, 0.0, 0.0, 0.0};
    if (kind == Kind::classical) {
      const double dm1 = detail::d_classical(m - 1, ctx);
      const double dm = detail::d_classical(m, ctx);
      if (shift == 1) {
        c.alpha = qp(l - m + h) * dm1 * detail::root_product({l + m, l + m + 1}, ctx);
        c.beta = detail::root_product({l - m + 1, l + m + 1}, ctx);
        c.gamma = -qp(l + m + h) * dm * detail::root_product({l - m, l - m + 1}, ctx);
      } else if (shift == 0) {
        c.alpha = -qp(-m - h) * dm1 * detail::root_product({l + m, l - m + 1}, ctx);
        c.beta = br(m);
        c.gamma = -qp(m - h) * dm * detail::root_product({l - m, l + m + 1}, ctx);
      } else {
        c.alpha = -qp(-l - m - h) * dm1 * detail::root_product({l - m, l - m + 1}, ctx);
        c.beta = detail::root_product({l - m, l + m}, ctx);
        c.gamma = qp(-l + m - h) * dm * detail::root_product({l + m, l + m + 1}, ctx);
      }
    } else {
      const double dm = detail::d_nonclassical(m, ctx);
      const bool bottom = m == h;
      const double dm1 = bottom ? 0.0 : detail::d_nonclassical(m - 1, ctx);
      const double plus_half = q_bracket_plus(h, ctx);
      if (bottom) {
        c.alpha_source = h;
        c.alpha_slot = slot_minus;
      }
      if (shift == 1) {
        c.alpha = bottom ? -qp(l) * plus_half * eps3 * detail::root_product({l + h, l + 3 * h}, ctx)
                         : qp(l - m + h) * dm1 * detail::root_product({l + m, l + m + 1}, ctx);
        c.beta = detail::root_product({l - m + 1, l + m + 1}, ctx);
        c.gamma = -qp(l + m + h) * dm * detail::root_product({l - m, l - m + 1}, ctx);
      } else if (shift == 0) {
        c.alpha = bottom ? Cplx(-qp(-1) * plus_half * eps3 * br(l + h))
                         : qp(-m - h) * dm1 * detail::root_product({l + m, l - m + 1}, ctx);
        c.beta = q_bracket_plus(m, ctx);
        c.gamma = -qp(m - h) * dm * detail::root_product({l - m, l + m + 1}, ctx);
      } else {
        c.alpha = bottom ? qp(-l - 1) * plus_half * eps3 * detail::root_product({l - h, l + h}, ctx)
                         : -qp(-l - m - h) * dm1 * detail::root_product({l - m, l - m + 1}, ctx);
        c.beta = detail::root_product({l - m, l + m}, ctx);
        c.gamma = qp(-l + m - h) * dm * detail::root_product({l + m, l + m + 1}, ctx);
      }
    }
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Top-level coefficients

/// (n, (m_n, xi) | (m'_n, xi)), depending on the two weights and the level
/// n-1 row of xi only. Zero when m'_n is not in S(m_n) or `lower` does not
/// fit under both weights.
inline Cplx top_cgc(Kind kind, int n, const Row& source, const Row& target, const Row& lower,
                    const QContext& ctx) {
  if (n < 3) throw ValidationError("top-level CGCs need n >= 3");
  if (!is_dominant(source, n, kind) || !is_dominant(target, n, kind)) return 0.0;
  if (!interlaces(source, n, lower, kind) || !interlaces(target, n, lower, kind)) return 0.0;
  if (!detail::in_branching(target, source, n, kind)) return 0.0;
  const Row L = l_coords(source, n);
  const Row l = l_coords(lower, n - 1);
  const int p = n / 2;
  const HalfInt h = HalfInt::half();

  if (target == source) {
    double v = 1.0;
    if (n % 2 == 1) {
      for (int r = 0; r < p; ++r)
        v *= kind == Kind::classical ? q_bracket(l[r], ctx) : q_bracket_plus(l[r], ctx);
    } else {
      for (int r = 0; r + 1 < p; ++r) v *= q_bracket(l[r] - h, ctx);
    }
    return v;
  }
  int j = -1, sign = 0;
  for (int i = 0; i < p; ++i)
    if (target[i] != source[i]) {
      j = i;
      sign = (target[i] - source[i]).twice() > 0 ? 1 : -1;
    }
  const HalfInt Lj = L[j];
  double v = 1.0;
  const int terms = n % 2 == 1 ? p : p - 1;
  for (int r = 0; r < terms; ++r) {
    if (n % 2 == 1) {
      v *= sign > 0 ? q_bracket(Lj + l[r], ctx) * q_bracket(Lj - l[r], ctx)
                    : q_bracket(Lj + l[r] - 1, ctx) * q_bracket(Lj - l[r] - 1, ctx);
    } else {
      v *= sign > 0 ? q_bracket(Lj + l[r], ctx) * q_bracket(Lj - l[r] + 1, ctx)
                    : q_bracket(Lj + l[r] - 1, ctx) * q_bracket(Lj - l[r], ctx);
    }
  }
  return std::sqrt(Cplx(v, 0.0));
}

// ---------------------------------------------------------------------------
// Auxiliary so_{n+1} weights and composite-generator blocks

/// Dominant level-(n+1) rows interlacing both weights with first entry at
/// most source[0] + 3, by increasing entry sum, then lexicographically
/// decreasing.
inline std::vector<Row> aux_candidates(Kind kind, int n, const Row& source, const Row& target) {
  const int len = row_length(n + 1);
  const HalfInt cap = source[0] + 3;
  const bool half = !source[0].is_integral();
  std::vector<Row> out;
  Row cur(len);
  std::function<void(int)> rec = [&](int i) {
    if (i == len) {
      if (is_dominant(cur, n + 1, kind) && interlaces(cur, n + 1, source, kind) &&
          interlaces(cur, n + 1, target, kind))
        out.push_back(cur);
      return;
    }
    for (HalfInt v = cap; v >= -cap; v -= 1) {
      if (v.is_integral() == half) continue;
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  auto sum = [](const Row& r) {
    int s = 0;
    for (auto v : r) s += v.twice();
    return s;
  };
  std::sort(out.begin(), out.end(), [&](const Row& a, const Row& b) {
    if (sum(a) != sum(b)) return sum(a) < sum(b);
    return a > b;
  });
  return out;
}

/// <aux, to, lower | I_{n+1,n} | aux, from, lower> in the so_{n+1} irrep with
/// highest weight `aux` (nonclassical signs end in +1).
inline Cplx aux_element(Kind kind, int n, const Row& aux, const Row& to, const Row& from,
                        const Row& lower, const QContext& ctx) {
  if (!interlaces(aux, n + 1, from, kind) || !interlaces(from, n, lower, kind)) return 0.0;
  for (const auto& t : apply_rows(kind, 1, n, aux, from, lower, ctx))
    if (t.mid == to) return t.coeff;
  return 0.0;
}

/// Blocks <left | I^{s}_{n+1,k} | right> of the so_{n+1} irrep `aux`, where
/// `left` and `right` are two so_n sectors. Element k of the result is the
/// block for I^{s}_{n+1,k}, for k = lowest..n (lower entries are empty).
inline std::vector<DenseMat> composite_blocks(Kind kind, const Row& aux, const BasisIndex& left,
                                              const BasisIndex& right,
                                              const std::vector<DenseMat>& left_gens,
                                              const std::vector<DenseMat>& right_gens, int sign,
                                              int lowest, const QContext& ctx) {
  const int n = left.label().n;
  const Row& wl = left.label().weight;
  const Row& wr = right.label().weight;
  DenseMat w = DenseMat::Zero(static_cast<Eigen::Index>(left.size()),
                              static_cast<Eigen::Index>(right.size()));
  for (std::size_t c = 0; c < right.size(); ++c) {
    const GTPattern& xi = right[c];
    const Row& lower = xi.at_level(n - 1);
    for (const auto& t : apply_rows(kind, 1, n, aux, wr, lower, ctx)) {
      if (t.mid != wl) continue;
      GTPattern img = xi;
      img.at_level(n) = wl;
      auto r = left.find(img);
      if (!r) throw ConsistencyError("composite block: image " + img.str() + " outside sector");
      w(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(c)) += t.coeff;
    }
  }
  const double a = q_power(HalfInt::from_twice(sign), ctx);
  const double b = q_power(HalfInt::from_twice(-sign), ctx);
  std::vector<DenseMat> blocks(static_cast<std::size_t>(n + 1));
  blocks[n] = w;
  for (int k = n - 1; k >= lowest; --k)
    blocks[k] = a * left_gens[k - 1] * blocks[k + 1] - b * blocks[k + 1] * right_gens[k - 1];
  return blocks;
}

inline std::vector<DenseMat> dense_generators(const std::vector<GeneratorMatrix>& gens) {
  std::vector<DenseMat> out;
  for (const auto& g : gens) out.emplace_back(DenseMat(g.mat));
  return out;
}

/// Ratio top / element over level n-1 rows fitting both weights. The ratio is
/// the same for every row where both are nonzero; `spread` measures that.
struct RowRatio {
  Cplx ratio = 0.0;
  double denominator = 0.0;  // |element| at the reference row
  Row reference;
  double spread = 0.0;       // max relative deviation across rows
};

inline RowRatio row_ratio(Kind kind, int n, const Row& aux, const Row& to, const Row& from,
                          const Row& source, const Row& target, const QContext& ctx) {
  RowRatio best;
  std::vector<Cplx> ratios;
  double best_key = -1.0;
  for (const Row& lower : lower_rows(source, n, kind)) {
    if (!interlaces(target, n, lower, kind)) continue;
    const Cplx top = top_cgc(kind, n, source, target, lower, ctx);
    const Cplx el = aux_element(kind, n, aux, to, from, lower, ctx);
    if (std::abs(el) == 0.0) continue;
    if (std::abs(top) > 0.0) ratios.push_back(top / el);
    const double key = std::abs(el) * (std::abs(top) > 0.0 ? 1.0 : 1e-300);
    if (key > best_key) {
      best_key = key;
      best.ratio = top / el;
      best.denominator = std::abs(el);
      best.reference = lower;
    }
  }
  for (const auto& r : ratios)
    best.spread = std::max(best.spread, std::abs(r - best.ratio) / std::max(std::abs(best.ratio), 1e-300));
  return best;
}

// ---------------------------------------------------------------------------
// CGC tables

struct CgcTerm {
  int slot = slot_plus;
  std::size_t source = 0;  // index into the source basis
  Cplx value;
};

struct CgcTable {
  IrrepLabel source;
  IrrepLabel target;
  bool replaced = false;  // target stands in for m^{-p} (nonclassical, m_p = 1/2)
  std::vector<std::vector<CgcTerm>> entries;  // per target basis index
  Cplx normalization = 1.0;   // stored values = raw values / normalization
  std::optional<Row> aux;     // auxiliary weight used (n >= 3)
  std::optional<Row> aux_check;  // second auxiliary weight, when one exists
  double aux_spread = 0.0;    // max relative disagreement between the two
  double ratio_spread = 0.0;  // top / element constancy across level n-1 rows
  double forbidden_max = 0.0; // largest raw value at selection-rule zeros, relative

  std::size_t nonzero_count() const {
    std::size_t c = 0;
    for (const auto& e : entries) c += e.size();
    return c;
  }
  std::optional<Cplx> find(std::size_t target_index, int slot, std::size_t source_index) const {
    for (const auto& t : entries.at(target_index))
      if (t.slot == slot && t.source == source_index) return t.value;
    return std::nullopt;
  }
};

namespace detail {

struct RawBlock {
  // raw[k] (k = 2..n) holds q^{k-n} B_k R, indexed [source, target]
  std::vector<DenseMat> raw;
  RowRatio ratio;
};

inline RawBlock raw_block(const BasisIndex& src, const BasisIndex& tgt,
                          const std::vector<DenseMat>& src_gens,
                          const std::vector<DenseMat>& tgt_gens, const Row& aux,
                          const QContext& ctx) {
  const Kind kind = src.label().kind;
  const int n = src.label().n;
  const Row& ws = src.label().weight;
  const Row& wt = tgt.label().weight;
  RawBlock out;
  out.ratio = row_ratio(kind, n, aux, ws, wt, ws, wt, ctx);
  auto blocks = composite_blocks(kind, aux, src, tgt, src_gens, tgt_gens, -1, 2, ctx);
  out.raw.resize(static_cast<std::size_t>(n + 1));
  for (int k = 2; k <= n; ++k)
    out.raw[k] = (q_power(k - n, ctx) * out.ratio.ratio) * blocks[k];
  return out;
}

inline bool aux_usable(const RowRatio& r) {
  return r.denominator > 1e-6 * std::max(1.0, std::abs(r.ratio) * r.denominator);
}

}  // namespace detail

/// First admissible auxiliary weight (and a second one for cross-checking).
struct AuxChoice {
  Row primary;
  std::optional<Row> secondary;
};

/// `primed` selects the denominator <target|I_{n+1,n}|source> used by the
/// inverse coefficients; `avoid` demotes one weight to second place.
inline AuxChoice find_aux(Kind kind, int n, const Row& source, const Row& target,
                          const QContext& ctx, bool primed = false,
                          const Row* avoid = nullptr) {
  std::vector<Row> usable;
  std::string tried;
  for (const Row& m : aux_candidates(kind, n, source, target)) {
    auto r = primed ? row_ratio(kind, n, m, target, source, source, target, ctx)
                    : row_ratio(kind, n, m, source, target, source, target, ctx);
    tried += " " + row_str(m);
    if (!detail::aux_usable(r) || std::abs(r.ratio) == 0.0) continue;
    usable.push_back(m);
    if (usable.size() >= 3) break;
  }
  if (usable.empty())
    throw AuxSearchError("no auxiliary weight for " + row_str(source) + " -> " + row_str(target) +
                         "; tried:" + tried);
  if (avoid && usable.size() > 1 && usable.front() == *avoid) std::swap(usable[0], usable[1]);
  AuxChoice c{usable[0], std::nullopt};
  if (usable.size() > 1) c.secondary = usable[1];
  return c;
}

inline IrrepLabel target_label(const IrrepLabel& source, const Row& weight) {
  return source.restricted(source.n, weight);
}

namespace detail {

inline CgcTable n2_table(const IrrepLabel& source, const BranchTarget& t) {
  const IrrepLabel tl = target_label(source, t.weight);
  CgcTable tab{source, tl, t.replaced, {}, 1.0, std::nullopt, std::nullopt, 0.0, 0.0, 0.0};
  const int slot = t.weight[0] > source.weight[0] ? slot_plus : slot_minus;
  tab.entries.push_back({CgcTerm{slot, 0, 1.0}});
  return tab;
}

inline void normalize(CgcTable& tab) {
  double peak = 0.0;
  for (const auto& e : tab.entries)
    for (const auto& t : e) peak = std::max(peak, std::abs(t.value));
  for (auto& e : tab.entries)
    e.erase(std::remove_if(e.begin(), e.end(),
                           [&](const CgcTerm& t) { return std::abs(t.value) <= 1e-14 * peak; }),
            e.end());
  for (auto& e : tab.entries)
    std::sort(e.begin(), e.end(), [](const CgcTerm& a, const CgcTerm& b) {
      return a.slot != b.slot ? a.slot < b.slot : a.source < b.source;
    });
  Cplx first = 0.0;
  for (const auto& e : tab.entries)
    if (!e.empty()) {
      first = e.front().value;
      break;
    }
  if (first == Cplx(0.0)) throw ConsistencyError("CGC block for " + tab.target.str() + " is empty");
  tab.normalization = first;
  for (auto& e : tab.entries)
    for (auto& t : e) t.value /= first;
}

}  // namespace detail

/// Unnormalized table from explicit so_3 formulas.
inline CgcTable so3_table(const IrrepLabel& source, HalfInt l_target, const QContext& ctx) {
  if (source.n != 3) throw ValidationError("so3_table needs an so_3 label");
  const auto src = enumerate_patterns(source);
  const IrrepLabel tl = target_label(source, {l_target});
  const auto tgt = enumerate_patterns(tl);
  CgcTable tab{source, tl, false, {}, 1.0, std::nullopt, std::nullopt, 0.0, 0.0, 0.0};
  tab.entries.resize(tgt.size());
  const HalfInt l = source.weight[0];
  for (const auto& c : so3_cgc(l, l_target, source.kind, source.eps, ctx)) {
    const auto ti = tgt.index_of(GTPattern{{{l_target}, {c.m}}});
    auto add = [&](int slot, HalfInt m, Cplx v) {
      auto si = src.find(GTPattern{{{l}, {m}}});
      if (si && v != Cplx(0.0)) tab.entries[ti].push_back({slot, *si, v});
    };
    add(c.alpha_slot, c.alpha_source, c.alpha);
    add(3, c.m, c.beta);
    add(slot_minus, c.m + 1, c.gamma);
  }
  for (auto& e : tab.entries)
    std::sort(e.begin(), e.end(), [](const CgcTerm& a, const CgcTerm& b) {
      return a.slot != b.slot ? a.slot < b.slot : a.source < b.source;
    });
  return tab;
}

/// Raw CGC block via the recursion with a given auxiliary weight: entry
/// [target index][slot] -> source index -> value, before normalization.
inline CgcTable cgc_block(const BasisIndex& src, const BasisIndex& tgt,
                          const std::vector<DenseMat>& src_gens,
                          const std::vector<DenseMat>& tgt_gens, const Row& aux,
                          bool replaced, const QContext& ctx) {
  const Kind kind = src.label().kind;
  const int n = src.label().n;
  auto rb = detail::raw_block(src, tgt, src_gens, tgt_gens, aux, ctx);
  CgcTable tab{src.label(), tgt.label(), replaced, {}, 1.0, aux, std::nullopt, 0.0,
               rb.ratio.spread, 0.0};
  tab.entries.resize(tgt.size());
  double peak = 0.0, forbidden = 0.0;
  for (std::size_t ti = 0; ti < tgt.size(); ++ti) {
    for (int slot = 1; slot <= n; ++slot) {
      const DenseMat& m = rb.raw[slot >= 3 ? slot : 2];
      for (std::size_t si = 0; si < src.size(); ++si) {
        const Cplx v = m(static_cast<Eigen::Index>(si), static_cast<Eigen::Index>(ti));
        if (cgc_allowed(slot, src[si], tgt[ti], kind)) {
          if (v != Cplx(0.0)) tab.entries[ti].push_back({slot, si, v});
          peak = std::max(peak, std::abs(v));
        } else if (slot != slot_minus) {
          // '+' and '-' read the same block; count the k = 2 block once
          bool other = slot == slot_plus && cgc_allowed(slot_minus, src[si], tgt[ti], kind);
          if (!other) forbidden = std::max(forbidden, std::abs(v));
        }
      }
    }
  }
  tab.forbidden_max = peak > 0.0 ? forbidden / peak : forbidden;
  return tab;
}

/// A single CGC (slot, source | target) by the recursion; zero when the
/// selection rules forbid it. Without `aux` the search picks one.
inline Cplx recurse_cgc(int slot, const GTPattern& target, const GTPattern& source,
                        const IrrepLabel& label, const QContext& ctx,
                        const std::optional<Row>& aux = std::nullopt) {
  const int n = label.n;
  if (n < 3) throw ValidationError("recurse_cgc needs n >= 3");
  if (source.n() != n || target.n() != n || source.rows[0] != label.weight)
    throw ValidationError("source pattern does not belong to " + label.str());
  if (!is_valid_pattern(source, label.kind))
    throw ValidationError("invalid source pattern " + source.str());
  if (!is_dominant(target.rows[0], n, label.kind) || !is_valid_pattern(target, label.kind))
    throw ValidationError("invalid target pattern " + target.str());
  if (!cgc_allowed(slot, source, target, label.kind)) return 0.0;
  const Row& wt = target.rows[0];
  const Row m_aux = aux ? *aux : find_aux(label.kind, n, label.weight, wt, ctx).primary;
  const auto src = enumerate_patterns(label);
  const auto tgt = enumerate_patterns(target_label(label, wt));
  const auto sg = dense_generators(build_representation(src, ctx));
  const auto tg = dense_generators(build_representation(tgt, ctx));
  auto rb = detail::raw_block(src, tgt, sg, tg, m_aux, ctx);
  const int k = slot >= 3 ? slot : 2;
  return rb.raw[k](static_cast<Eigen::Index>(src.index_of(source)),
                   static_cast<Eigen::Index>(tgt.index_of(target)));
}

// ---------------------------------------------------------------------------
// Intertwiners and the full decomposition

struct Intertwiner {
  IrrepLabel target;
  DenseMat P;  // n * dim(source) rows, dim(target) columns
};

/// Coupled vectors of a table, expanded in the tensor basis (k, xi).
inline DenseMat intertwiner_matrix(const CgcTable& tab, const BasisIndex& src,
                                   const QContext& ctx) {
  const int n = tab.source.n;
  const auto d = static_cast<Eigen::Index>(src.size());
  DenseMat P = DenseMat::Zero(n * d, static_cast<Eigen::Index>(tab.entries.size()));
  const int eps2 = tab.source.eps_at(2);
  for (std::size_t ti = 0; ti < tab.entries.size(); ++ti) {
    const auto col = static_cast<Eigen::Index>(ti);
    for (const auto& t : tab.entries[ti]) {
      const auto s = static_cast<Eigen::Index>(t.source);
      if (t.slot >= 3) {
        P((t.slot - 1) * d + s, col) += t.value;
        continue;
      }
      const auto pair = so2_coupled_vectors(src[t.source].m12(), tab.source.kind, eps2, ctx);
      const auto& v = t.slot == slot_plus ? pair.plus : pair.minus;
      P(s, col) += t.value * v[0];
      P(d + s, col) += t.value * v[1];
    }
  }
  return P;
}

struct IntertwinerCheck {
  int k = 0;  // generator I_{k+1,k}
  double residual = 0.0;
  double scale = 0.0;
  bool pass = false;
};

/// ||T(x)(I_{k+1,k}) P - P T'(I_{k+1,k})||_F for every k; the scale is
/// max(||T(x)||, ||T'||) ||P||.
inline std::vector<IntertwinerCheck> check_intertwiner(const std::vector<GeneratorMatrix>& tensor,
                                                       const std::vector<GeneratorMatrix>& target,
                                                       const DenseMat& P, const QContext& ctx) {
  std::vector<IntertwinerCheck> out;
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    DenseMat lhs = tensor[i].mat * P;
    DenseMat rhs = P * DenseMat(target[i].mat);
    const double bound = std::max(tensor[i].mat.norm(), target[i].mat.norm()) * P.norm();
    IntertwinerCheck c{static_cast<int>(i) + 1, (lhs - rhs).norm(), bound, false};
    c.pass = ctx.within(c.residual, c.scale);
    out.push_back(c);
  }
  return out;
}

struct DecompositionBlock {
  CgcTable table;
  Intertwiner intertwiner;
  std::vector<IntertwinerCheck> checks;

  double max_relative_residual() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.residual / std::max(c.scale, 1e-300));
    return m;
  }
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct Decomposition {
  IrrepLabel source;
  std::size_t source_dim = 0;
  std::vector<DecompositionBlock> blocks;
  Eigen::Index rank = 0;
  double smallest_singular = 0.0;  // of the column-normalized concatenation

  std::size_t total_dim() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += b.table.entries.size();
    return s;
  }
  std::size_t tensor_dim() const { return static_cast<std::size_t>(source.n) * source_dim; }
  bool sum_rule() const { return total_dim() == tensor_dim(); }
  bool full_rank() const { return rank == static_cast<Eigen::Index>(tensor_dim()); }
  bool pass() const {
    for (const auto& b : blocks)
      if (!b.pass()) return false;
    return sum_rule() && full_rank();
  }
};

/// Numerical rank of the column-normalized matrix [P_1 | P_2 | ...].
inline std::pair<Eigen::Index, double> concatenated_rank(const std::vector<DenseMat>& ps,
                                                         double rel_threshold) {
  Eigen::Index rows = ps.empty() ? 0 : ps.front().rows(), cols = 0;
  for (const auto& p : ps) cols += p.cols();
  DenseMat all(rows, cols);
  Eigen::Index c = 0;
  for (const auto& p : ps) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double nrm = p.col(j).norm();
      all.col(c++) = nrm > 0.0 ? DenseMat(p.col(j) / nrm) : DenseMat(p.col(j));
    }
  }
  if (cols == 0) return {0, 0.0};
  Eigen::BDCSVD<DenseMat> svd(all);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_threshold * s(0)) ++r;
  return {r, s(s.size() - 1)};
}

/// Decomposes T_1 (x) T_label into blocks, one per weight in S(m_n). With
/// `strict`, a block that fails to intertwine raises ConsistencyError naming
/// the target and generator.
inline Decomposition assemble_decomposition(const IrrepLabel& label, const QContext& ctx,
                                            bool strict = true) {
  const auto src = enumerate_patterns(label);
  const auto src_mats = build_representation(src, ctx);
  const auto src_gens = dense_generators(src_mats);
  const auto tensor = tensor_rep(src_mats, ctx);
  Decomposition dec{label, src.size(), {}, 0, 0.0};
  std::vector<DenseMat> ps;
  for (const auto& t : branching_set(label.weight, label.n, label.kind)) {
    const IrrepLabel tl = target_label(label, t.weight);
    const auto tgt = enumerate_patterns(tl);
    const auto tgt_mats = build_representation(tgt, ctx);
    CgcTable tab = [&] {
      if (label.n == 2) return detail::n2_table(label, t);
      const auto tgt_gens = dense_generators(tgt_mats);
      const AuxChoice aux = find_aux(label.kind, label.n, label.weight, t.weight, ctx);
      CgcTable main = cgc_block(src, tgt, src_gens, tgt_gens, aux.primary, t.replaced, ctx);
      if (aux.secondary) {
        CgcTable other =
            cgc_block(src, tgt, src_gens, tgt_gens, *aux.secondary, t.replaced, ctx);
        double peak = 0.0, diff = 0.0;
        for (std::size_t ti = 0; ti < main.entries.size(); ++ti)
          for (const auto& term : main.entries[ti]) {
            peak = std::max(peak, std::abs(term.value));
            const Cplx o = other.find(ti, term.slot, term.source).value_or(0.0);
            diff = std::max(diff, std::abs(o - term.value));
          }
        main.aux_check = aux.secondary;
        main.aux_spread = peak > 0.0 ? diff / peak : diff;
      }
      return main;
    }();
    detail::normalize(tab);
    DecompositionBlock block{tab, {tl, intertwiner_matrix(tab, src, ctx)}, {}};
    block.checks = check_intertwiner(tensor, tgt_mats, block.intertwiner.P, ctx);
    if (strict)
      for (const auto& c : block.checks)
        if (!c.pass)
          throw ConsistencyError("block " + row_str(t.weight) + " fails to intertwine I_{" +
                                 std::to_string(c.k + 1) + "," + std::to_string(c.k) +
                                 "}: residual " + std::to_string(c.residual));
    ps.push_back(block.intertwiner.P);
    dec.blocks.push_back(std::move(block));
  }
  auto [rank, smin] = concatenated_rank(ps, 1e-10);
  dec.rank = rank;
  dec.smallest_singular = smin;
  if (strict && !dec.full_rank())
    throw ConsistencyError("concatenated intertwiners have rank " + std::to_string(rank) +
                           ", expected " + std::to_string(dec.tensor_dim()));
  return dec;
}

}  // namespace qso
