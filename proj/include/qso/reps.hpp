#pragma once

// Generator matrices of classical and nonclassical type irreps in the
// Gel'fand-Tsetlin basis, composite generators I^{+-}_{k,l}, and numerical
// verification of the defining relations.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qso/errors.hpp"
#include "qso/gtbasis.hpp"
#include "qso/qarith.hpp"

namespace qso {

using Cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<Cplx>;
using DenseMat = Eigen::MatrixXcd;
using Triplet = Eigen::Triplet<Cplx>;

enum class CoeffKind { A, B, C, D };

namespace detail {

// Running product of q-brackets. A numerator factor [0] makes the whole
// coefficient vanish; a denominator factor [0] is recorded as a singularity.
class BracketProduct {
 public:
  explicit BracketProduct(const QContext& ctx) : ctx_(ctx) {}

  void num(HalfInt a) {
    if (a.twice() == 0)
      zero_ = true;
    else
      value_ *= q_bracket(a, ctx_);
  }
  void num_plus(HalfInt a) { value_ *= q_bracket_plus(a, ctx_); }
  void den(HalfInt a, const char* what) {
    if (a.twice() == 0) {
      if (singular_.empty()) singular_ = std::string("[") + what + "] = [0]";
      return;
    }
    value_ /= q_bracket(a, ctx_);
  }
  void den_plus(HalfInt a) { value_ /= q_bracket_plus(a, ctx_); }
  void scale(double s) { value_ *= s; }

  bool zero() const { return zero_; }
  double value(const std::string& where) const {
    if (!singular_.empty()) throw SingularityError(where + ": vanishing denominator " + singular_);
    return value_;
  }

 private:
  const QContext& ctx_;
  double value_ = 1.0;
  bool zero_ = false;
  std::string singular_;
};

inline Row l_or_empty(const Row& r, int level) { return level >= 2 ? l_coords(r, level) : Row{}; }

inline std::string where(const char* name, const Row& up, const Row& mid, const Row& low, int j) {
  return std::string(name) + "^" + std::to_string(j) + " at " + row_str(up) + " " + row_str(mid) +
         " " + row_str(low);
}

}  // namespace detail

// The coefficient functions below take the three rows a generator I_{k+1,k}
// looks at: `up` (level k+1), `mid` (level k, the row it shifts) and `low`
// (level k-1, empty when k = 2). `j` counts from 1.

/// A^j_{2p} (classical) or A~^j_{2p} (nonclassical); mid is at level 2p.
inline Cplx coeff_A(Kind kind, const Row& up, const Row& mid, const Row& low, int level, int j,
                    const QContext& ctx) {
  const int p = level / 2;
  const Row lu = l_coords(up, level + 1);
  const Row lm = l_coords(mid, level);
  const Row ll = detail::l_or_empty(low, level - 1);
  const HalfInt l = lm[j - 1];
  detail::BracketProduct f(ctx);
  for (int i = 0; i < p; ++i) {
    f.num(lu[i] + l);
    f.num(lu[i] - l - 1);
  }
  for (int i = 0; i + 1 < p; ++i) {
    f.num(ll[i] + l);
    f.num(ll[i] - l - 1);
  }
  if (f.zero()) return 0.0;
  for (int i = 0; i < p; ++i) {
    if (i == j - 1) continue;
    f.den(lm[i] + l, "l_i+l_j");
    f.den(lm[i] - l, "l_i-l_j");
    f.den(lm[i] + l + 1, "l_i+l_j+1");
    f.den(lm[i] - l - 1, "l_i-l_j-1");
  }
  // [l][l+1]/([2l][2l+2]) = 1/((q^l+q^-l)(q^{l+1}+q^{-l-1})), finite at l = 0, -1.
  double pref;
  if (kind == Kind::classical) {
    pref = 1.0 / (q_sum(l, ctx) * q_sum(l + 1, ctx));
  } else {
    const double d = q_diff(l, ctx) * q_diff(l + 1, ctx);
    if (d == 0.0)
      throw SingularityError(detail::where("A~", up, mid, low, j) +
                             ": vanishing (q^l-q^-l)(q^{l+1}-q^{-l-1})");
    pref = 1.0 / d;
  }
  const double arg = f.value(detail::where("A", up, mid, low, j)) * pref;
  return std::sqrt(Cplx(arg, 0.0));
}

/// B^j_{2p-1} (classical) or B~^j_{2p-1} (nonclassical); mid is at level 2p-1.
inline Cplx coeff_B(Kind kind, const Row& up, const Row& mid, const Row& low, int level, int j,
                    const QContext& ctx) {
  const int p = (level + 1) / 2;
  const Row lu = l_coords(up, level + 1);
  const Row lm = l_coords(mid, level);
  const Row ll = detail::l_or_empty(low, level - 1);
  const HalfInt l = lm[j - 1];
  detail::BracketProduct f(ctx);
  for (int i = 0; i < p; ++i) {
    f.num(lu[i] + l);
    f.num(lu[i] - l);
  }
  for (int i = 0; i + 1 < p; ++i) {
    f.num(ll[i] + l);
    f.num(ll[i] - l);
  }
  if (f.zero()) return 0.0;
  for (int i = 0; i + 1 < p; ++i) {
    if (i == j - 1) continue;
    f.den(lm[i] + l, "l_i+l_j");
    f.den(lm[i] - l, "l_i-l_j");
    f.den(lm[i] + l - 1, "l_i+l_j-1");
    f.den(lm[i] - l - 1, "l_i-l_j-1");
  }
  const auto here = detail::where("B", up, mid, low, j);
  const Cplx hat = std::sqrt(Cplx(f.value(here), 0.0));
  detail::BracketProduct g(ctx);
  g.den(2 * l + 1, "2l+1");
  g.den(2 * l - 1, "2l-1");
  const Cplx root = std::sqrt(Cplx(g.value(here), 0.0));
  double lead;
  if (kind == Kind::classical) {
    if (l.twice() == 0) throw SingularityError(here + ": vanishing denominator [l_j] = [0]");
    lead = q_bracket(l, ctx);
  } else {
    lead = q_bracket_plus(l, ctx);
  }
  return hat * root / lead;
}

/// C_{2p-1} (classical) or C~_{2p-1} (nonclassical); mid is at level 2p-1.
inline Cplx coeff_C(Kind kind, const Row& up, const Row& mid, const Row& low, int level,
                    const QContext& ctx) {
  const int p = (level + 1) / 2;
  const Row lu = l_coords(up, level + 1);
  const Row lm = l_coords(mid, level);
  const Row ll = detail::l_or_empty(low, level - 1);
  detail::BracketProduct f(ctx);
  if (kind == Kind::classical) {
    for (int i = 0; i < p; ++i) f.num(lu[i]);
    for (int i = 0; i + 1 < p; ++i) f.num(ll[i]);
    if (f.zero()) return 0.0;
    for (int i = 0; i + 1 < p; ++i) {
      f.den(lm[i], "l_i");
      f.den(lm[i] - 1, "l_i-1");
    }
  } else {
    for (int i = 0; i < p; ++i) f.num_plus(lu[i]);
    for (int i = 0; i + 1 < p; ++i) f.num_plus(ll[i]);
    for (int i = 0; i + 1 < p; ++i) {
      f.den_plus(lm[i]);
      f.den_plus(lm[i] - 1);
    }
  }
  return f.value(detail::where("C", up, mid, low, 0));
}

/// D_{2p} of the nonclassical I_{2p+1,2p}; mid is at level 2p.
inline Cplx coeff_D(const Row& up, const Row& mid, const Row& low, int level,
                    const QContext& ctx) {
  const int p = level / 2;
  const Row lu = l_coords(up, level + 1);
  const Row lm = l_coords(mid, level);
  const Row ll = detail::l_or_empty(low, level - 1);
  const HalfInt h = HalfInt::half();
  detail::BracketProduct f(ctx);
  for (int i = 0; i < p; ++i) f.num(lu[i] - h);
  for (int i = 0; i + 1 < p; ++i) f.num(ll[i] - h);
  if (f.zero()) return 0.0;
  for (int i = 0; i + 1 < p; ++i) {
    f.den(lm[i] + h, "l_i+1/2");
    f.den(lm[i] - h, "l_i-1/2");
  }
  return f.value(detail::where("D", up, mid, low, 0));
}

namespace detail {

inline std::tuple<Row, Row, Row> rows_around(const GTPattern& xi, int level) {
  if (level < 2 || level >= xi.n()) throw ValidationError("coefficient level out of range");
  Row low = level >= 3 ? xi.at_level(level - 1) : Row{};
  return {xi.at_level(level + 1), xi.at_level(level), low};
}

}  // namespace detail

/// Classical matrix-element coefficient at tableau xi. For A, `level` is 2p
/// (the row I_{2p+1,2p} shifts); for B and C it is 2p-1.
inline Cplx coeff_classical(const GTPattern& xi, int j, int level, CoeffKind which,
                            const QContext& ctx) {
  auto [up, mid, low] = detail::rows_around(xi, level);
  switch (which) {
    case CoeffKind::A:
      return coeff_A(Kind::classical, up, mid, low, level, j, ctx);
    case CoeffKind::B:
      return coeff_B(Kind::classical, up, mid, low, level, j, ctx);
    case CoeffKind::C:
      return coeff_C(Kind::classical, up, mid, low, level, ctx);
    default:
      throw ValidationError("classical coefficients are A, B or C");
  }
}

/// Nonclassical counterpart: A~, B~, C~ and D.
inline Cplx coeff_nonclassical(const GTPattern& xi, int j, int level, CoeffKind which,
                               const QContext& ctx) {
  auto [up, mid, low] = detail::rows_around(xi, level);
  switch (which) {
    case CoeffKind::A:
      return coeff_A(Kind::nonclassical, up, mid, low, level, j, ctx);
    case CoeffKind::B:
      return coeff_B(Kind::nonclassical, up, mid, low, level, j, ctx);
    case CoeffKind::C:
      return coeff_C(Kind::nonclassical, up, mid, low, level, ctx);
    case CoeffKind::D:
      return coeff_D(up, mid, low, level, ctx);
  }
  return 0.0;
}

/// Image of the middle row under I_{k+1,k}: shifted row and its coefficient.
struct RowTerm {
  Row mid;
  Cplx coeff;
};

/// Action of I_{k+1,k} (k >= 2) on the rows (up, mid, low) of a tableau.
/// `eps_next` is eps_{k+1} (ignored for classical). Shifts leaving the lattice
/// are evaluated and must vanish; they are never returned.
inline std::vector<RowTerm> apply_rows(Kind kind, int eps_next, int k, const Row& up,
                                       const Row& mid, const Row& low, const QContext& ctx) {
  std::vector<RowTerm> out;
  auto in_lattice = [&](const Row& m) {
    return interlaces(up, k + 1, m, kind) && interlaces(m, k, low, kind);
  };
  auto push = [&](Row m, auto&& eval) {
    if (in_lattice(m)) {
      Cplx c = eval(m);
      if (c != Cplx(0.0)) out.push_back({std::move(m), c});
      return;
    }
    Cplx c;
    try {
      c = eval(m);
    } catch (const SingularityError& e) {
      throw ConsistencyError(std::string("off-lattice coefficient does not vanish: ") + e.what());
    }
    if (std::abs(c) > ctx.tol_abs)
      throw ConsistencyError("off-lattice shift to " + row_str(m) + " at level " +
                             std::to_string(k) + " has coefficient " + std::to_string(std::abs(c)));
  };

  if (k % 2 == 0) {
    const int p = k / 2;
    const bool half_bottom = kind == Kind::nonclassical && mid[p - 1] == HalfInt::half();
    for (int j = 1; j <= p; ++j) {
      Row plus = mid;
      plus[j - 1] += 1;
      push(plus, [&](const Row&) { return coeff_A(kind, up, mid, low, k, j, ctx); });
      if (half_bottom && j == p) continue;
      Row minus = mid;
      minus[j - 1] -= 1;
      push(minus, [&](const Row& m) { return -coeff_A(kind, up, m, low, k, j, ctx); });
    }
    if (half_bottom) {
      const double s = eps_next / (q_power(HalfInt::half(), ctx) - q_power(-HalfInt::half(), ctx));
      Cplx c = s * coeff_D(up, mid, low, k, ctx);
      if (c != Cplx(0.0)) out.push_back({mid, c});
    }
  } else {
    const int p = (k + 1) / 2;
    for (int j = 1; j < p; ++j) {
      Row plus = mid;
      plus[j - 1] += 1;
      push(plus, [&](const Row&) { return coeff_B(kind, up, mid, low, k, j, ctx); });
      Row minus = mid;
      minus[j - 1] -= 1;
      push(minus, [&](const Row& m) { return -coeff_B(kind, up, m, low, k, j, ctx); });
    }
    Cplx c = coeff_C(kind, up, mid, low, k, ctx);
    c = kind == Kind::classical ? Cplx(0.0, 1.0) * c : Cplx(eps_next) * c;
    if (c != Cplx(0.0)) out.push_back({mid, c});
  }
  return out;
}

/// T(I_{k+1,k}) |xi> as a list of (tableau, coefficient).
inline std::vector<std::pair<GTPattern, Cplx>> apply_generator(const IrrepLabel& label, int k,
                                                              const GTPattern& xi,
                                                              const QContext& ctx) {
  if (k < 1 || k >= label.n) throw ValidationError("generator index out of range");
  std::vector<std::pair<GTPattern, Cplx>> out;
  if (k == 1) {
    const HalfInt m = xi.m12();
    Cplx c = label.kind == Kind::classical ? Cplx(0.0, q_bracket(m, ctx))
                                           : Cplx(label.eps_at(2) * q_bracket_plus(m, ctx));
    if (c != Cplx(0.0)) out.emplace_back(xi, c);
    return out;
  }
  auto [up, mid, low] = detail::rows_around(xi, k);
  for (auto& t : apply_rows(label.kind, label.eps_at(k + 1), k, up, mid, low, ctx)) {
    GTPattern img = xi;
    img.at_level(k) = std::move(t.mid);
    out.emplace_back(std::move(img), t.coeff);
  }
  return out;
}

/// Identifies I_{upper,lower} (sign 0) or the composite I^{+-}_{upper,lower}.
struct GenId {
  int upper = 2;
  int lower = 1;
  int sign = 0;

  static GenId simple(int k) { return {k + 1, k, 0}; }
  std::string str() const {
    std::string s = "I";
    if (sign > 0) s += "+";
    if (sign < 0) s += "-";
    return s + "(" + std::to_string(upper) + "," + std::to_string(lower) + ")";
  }
  friend bool operator==(const GenId&, const GenId&) = default;
};

struct GeneratorMatrix {
  std::optional<IrrepLabel> label;
  GenId gen;
  SparseMat mat;

  std::size_t dim() const { return static_cast<std::size_t>(mat.rows()); }
};

inline SparseMat from_triplets(Eigen::Index rows, Eigen::Index cols,
                               const std::vector<Triplet>& t) {
  SparseMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

inline SparseMat identity(Eigen::Index dim) {
  SparseMat m(dim, dim);
  m.setIdentity();
  return m;
}

inline double max_abs(const SparseMat& m) {
  double s = 0.0;
  for (int c = 0; c < m.outerSize(); ++c)
    for (SparseMat::InnerIterator it(m, c); it; ++it) s = std::max(s, std::abs(it.value()));
  return s;
}

/// T(I_{k+1,k}) on an enumerated basis.
inline GeneratorMatrix build_generator(const BasisIndex& basis, int k, const QContext& ctx) {
  const auto& label = basis.label();
  if (k < 1 || k >= label.n)
    throw ValidationError("generator I_{" + std::to_string(k + 1) + "," + std::to_string(k) +
                          "} does not exist in so_" + std::to_string(label.n));
  std::vector<Triplet> t;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    for (auto& [img, c] : apply_generator(label, k, basis[col], ctx)) {
      auto row = basis.find(img);
      if (!row)
        throw ConsistencyError("generator maps " + basis[col].str() + " outside the basis");
      t.emplace_back(static_cast<int>(*row), static_cast<int>(col), c);
    }
  }
  const auto d = static_cast<Eigen::Index>(basis.size());
  return {label, GenId::simple(k), from_triplets(d, d, t)};
}

inline GeneratorMatrix build_generator(const IrrepLabel& label, int k, const QContext& ctx) {
  return build_generator(enumerate_patterns(label), k, ctx);
}

/// All generators I_{21}, ..., I_{n,n-1}; element i is I_{i+2,i+1}.
inline std::vector<GeneratorMatrix> build_representation(const BasisIndex& basis,
                                                         const QContext& ctx) {
  std::vector<GeneratorMatrix> out;
  for (int k = 1; k < basis.label().n; ++k) out.push_back(build_generator(basis, k, ctx));
  return out;
}

inline std::vector<GeneratorMatrix> build_representation(const IrrepLabel& label,
                                                         const QContext& ctx) {
  return build_representation(enumerate_patterns(label), ctx);
}

/// [X,Y]_{q^{s}} = q^{s/2} X Y - q^{-s/2} Y X for s = +-1; s = 0 is the plain commutator.
inline SparseMat q_commutator(const SparseMat& x, const SparseMat& y, int sign,
                              const QContext& ctx) {
  const double a = q_power(HalfInt::from_twice(sign), ctx);
  const double b = q_power(HalfInt::from_twice(-sign), ctx);
  SparseMat xy = x * y;
  SparseMat yx = y * x;
  return SparseMat(Cplx(a) * xy - Cplx(b) * yx);
}

/// I^{+-}_{k,l} from generators gens[i] = I_{i+2,i+1}, by
/// I^{+-}_{k,l} = [I_{l+1,l}, I^{+-}_{k,l+1}]_{q^{+-1}}.
inline SparseMat composite_from(const std::vector<SparseMat>& gens, int k, int l, int sign,
                                const QContext& ctx) {
  const int n = static_cast<int>(gens.size()) + 1;
  if (!(k <= n && k > l && l >= 1) || (sign != 1 && sign != -1))
    throw ValidationError("composite generator I^{+-}_{" + std::to_string(k) + "," +
                          std::to_string(l) + "} needs n >= k > l >= 1");
  SparseMat cur = gens[k - 2];
  for (int m = k - 2; m >= l; --m) cur = q_commutator(gens[m - 1], cur, sign, ctx);
  return cur;
}

inline GeneratorMatrix composite_generator(const std::vector<GeneratorMatrix>& rep, int k, int l,
                                           int sign, const QContext& ctx) {
  std::vector<SparseMat> gens;
  for (const auto& g : rep) gens.push_back(g.mat);
  GeneratorMatrix out{rep.empty() ? std::nullopt : rep.front().label, GenId{k, l, sign},
                      composite_from(gens, k, l, sign, ctx)};
  if (k == l + 1) out.gen = GenId::simple(l);
  return out;
}

inline GeneratorMatrix composite_generator(const IrrepLabel& label, int k, int l, int sign,
                                           const QContext& ctx) {
  if (!(label.n >= k && k > l && l >= 1))
    throw ValidationError("composite generator indices out of range");
  return composite_generator(build_representation(label, ctx), k, l, sign, ctx);
}

struct RelationResult {
  std::string family;  // "serre_upper", "serre_lower" or "commute"
  int i = 0;           // upper index of the first generator I_{i,i-1}
  int j = 0;           // upper index of the second generator I_{j,j-1}
  double residual = 0.0;
  double scale = 0.0;
  bool pass = false;
};

struct RelationReport {
  std::vector<RelationResult> results;

  bool pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& r : results) m = std::max(m, r.residual);
    return m;
  }
  /// max residual / (1 + scale): the figure bounded by the relation tolerance.
  double max_relative() const {
    double m = 0.0;
    for (const auto& r : results) m = std::max(m, r.residual / (1.0 + r.scale));
    return m;
  }
};

namespace detail {

inline RelationResult relation(std::string family, int i, int j, const std::vector<SparseMat>& terms,
                               const std::vector<Cplx>& coeffs, const QContext& ctx) {
  SparseMat sum(terms[0].rows(), terms[0].cols());
  double scale = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    sum += coeffs[t] * terms[t];
    scale = std::max(scale, std::abs(coeffs[t]) * terms[t].norm());
  }
  RelationResult r{std::move(family), i, j, sum.norm(), scale, false};
  r.pass = ctx.within(r.residual, scale);
  return r;
}

}  // namespace detail

/// Residuals of the defining relations for mats[i] = T(I_{i+2,i+1}).
inline RelationReport check_relations(const std::vector<SparseMat>& mats, const QContext& ctx) {
  for (const auto& m : mats)
    if (m.rows() != mats.front().rows() || m.cols() != m.rows())
      throw DimensionError("check_relations: generator matrices must be square of equal size");
  RelationReport report;
  const int n = static_cast<int>(mats.size()) + 1;
  const Cplx two = q_bracket(2, ctx);
  auto gen = [&](int j) -> const SparseMat& { return mats[j - 2]; };
  for (int j = 3; j <= n; ++j) {
    const SparseMat& a = gen(j);
    const SparseMat& b = gen(j - 1);
    SparseMat aa = a * a, bb = b * b;
    SparseMat aab = aa * b, baa = b * aa, aba = a * b * a;
    report.results.push_back(
        detail::relation("serre_upper", j, j - 1, {aab, baa, aba, b}, {1.0, 1.0, -two, 1.0}, ctx));
    SparseMat bba = bb * a, abb = a * bb, bab = b * a * b;
    report.results.push_back(
        detail::relation("serre_lower", j, j - 1, {bba, abb, bab, a}, {1.0, 1.0, -two, 1.0}, ctx));
  }
  for (int i = 2; i <= n; ++i)
    for (int j = i + 2; j <= n; ++j) {
      SparseMat ij = gen(i) * gen(j), ji = gen(j) * gen(i);
      report.results.push_back(detail::relation("commute", i, j, {ij, ji}, {1.0, -1.0}, ctx));
    }
  return report;
}

inline RelationReport check_relations(const std::vector<GeneratorMatrix>& mats,
                                      const QContext& ctx) {
  std::vector<SparseMat> m;
  for (const auto& g : mats) {
    if (g.gen.sign != 0) throw DimensionError("check_relations expects simple generators");
    m.push_back(g.mat);
  }
  for (std::size_t i = 0; i < mats.size(); ++i)
    if (mats[i].gen != GenId::simple(static_cast<int>(i) + 1))
      throw DimensionError("check_relations expects generators ordered I_21, I_32, ...");
  return check_relations(m, ctx);
}

}  // namespace qso
