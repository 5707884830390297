#pragma once

// Vector operators of U'_q(so_n), the canonical one carried by an so_{n+1}
// irrep, inverse ("primed") CGCs, and extraction of reduced matrix elements
// with a numerical test of the Wigner-Eckart factorization.

#include <map>
#include <string>
#include <vector>

#include "qso/cgc.hpp"

namespace qso {

/// One irreducible so_n block of the ambient space.
struct SpaceBlock {
  IrrepLabel label;
  int s = 1;  // copy number among blocks with the same label
  std::size_t offset = 0;
  std::size_t dim = 0;
};

struct VectorOperator {
  int n = 2;
  std::size_t dim = 0;
  std::vector<SpaceBlock> blocks;
  std::vector<SparseMat> ambient;     // T(I_{j,j-1}), element j-2
  std::vector<SparseMat> components;  // V_k, element k-1
};

/// Restricts T_{m_{n+1}} to so_n: blocks are read off the second tableau row,
/// V_k = T(I^+_{n+1,k}) for k < n and V_n = T(I_{n+1,n}).
inline VectorOperator canonical_vector_operator(const IrrepLabel& aux, const QContext& ctx) {
  if (aux.n < 3) throw ValidationError("canonical vector operator needs an so_{n+1} label, n >= 2");
  const int n = aux.n - 1;
  const auto basis = enumerate_patterns(aux);
  const auto gens = build_representation(basis, ctx);
  VectorOperator v{n, basis.size(), {}, {}, {}};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Row& second = basis[i].at_level(n);
    if (v.blocks.empty() || v.blocks.back().label.weight != second)
      v.blocks.push_back({aux.restricted(n, second), 1, i, 0});
    ++v.blocks.back().dim;
  }
  for (int j = 2; j <= n; ++j) v.ambient.push_back(gens[j - 2].mat);
  for (int k = 1; k < n; ++k)
    v.components.push_back(composite_generator(gens, n + 1, k, +1, ctx).mat);
  v.components.push_back(gens[n - 1].mat);
  return v;
}

/// Block-diagonal sum; copy numbers s count repeated labels in order.
inline VectorOperator direct_sum(const VectorOperator& a, const VectorOperator& b) {
  if (a.n != b.n) throw DimensionError("direct_sum: operands act for different so_n");
  VectorOperator out{a.n, a.dim + b.dim, a.blocks, {}, {}};
  for (auto blk : b.blocks) {
    blk.offset += a.dim;
    out.blocks.push_back(blk);
  }
  std::map<std::string, int> seen;
  for (auto& blk : out.blocks) blk.s = ++seen[blk.label.str()];
  auto stack = [&](const SparseMat& x, const SparseMat& y) {
    std::vector<Triplet> t;
    for (int c = 0; c < x.outerSize(); ++c)
      for (SparseMat::InnerIterator it(x, c); it; ++it)
        t.emplace_back(static_cast<int>(it.row()), c, it.value());
    const auto off = static_cast<int>(a.dim);
    for (int c = 0; c < y.outerSize(); ++c)
      for (SparseMat::InnerIterator it(y, c); it; ++it)
        t.emplace_back(off + static_cast<int>(it.row()), off + c, it.value());
    const auto d = static_cast<Eigen::Index>(out.dim);
    return from_triplets(d, d, t);
  };
  for (std::size_t i = 0; i < a.ambient.size(); ++i)
    out.ambient.push_back(stack(a.ambient[i], b.ambient[i]));
  for (std::size_t i = 0; i < a.components.size(); ++i)
    out.components.push_back(stack(a.components[i], b.components[i]));
  return out;
}

/// Multiplies every component by c.
inline VectorOperator scaled(VectorOperator v, Cplx c) {
  for (auto& m : v.components) m = SparseMat(c * m);
  return v;
}

/// Residuals of [V_{j-1}, T_j]_q = V_j, [T_j, V_j]_q = V_{j-1} and of the far
/// commutators [T_j, V_k] = 0, with [X,Y]_q = q^{1/2} X Y - q^{-1/2} Y X.
inline RelationReport check_vector_operator(const VectorOperator& v, const QContext& ctx) {
  const int n = v.n;
  if (static_cast<int>(v.ambient.size()) != n - 1 || static_cast<int>(v.components.size()) != n)
    throw DimensionError("vector operator needs n - 1 ambient generators and n components");
  const auto d = static_cast<Eigen::Index>(v.dim);
  for (const auto* group : {&v.ambient, &v.components})
    for (const auto& m : *group)
      if (m.rows() != d || m.cols() != d) throw DimensionError("vector operator shape mismatch");
  RelationReport rep;
  auto record = [&](std::string family, int i, int j, const SparseMat& lhs, const SparseMat& rhs,
                    double scale) {
    RelationResult r{std::move(family), i, j, SparseMat(lhs - rhs).norm(), scale, false};
    r.pass = ctx.within(r.residual, scale);
    rep.results.push_back(r);
  };
  const double a = q_power(HalfInt::half(), ctx);
  const double b = q_power(-HalfInt::half(), ctx);
  for (int j = 2; j <= n; ++j) {
    const SparseMat& T = v.ambient[j - 2];
    const SparseMat& Vl = v.components[j - 2];
    const SparseMat& Vj = v.components[j - 1];
    SparseMat p1 = Vl * T, p2 = T * Vl;
    record("raise", j, j, q_commutator(Vl, T, +1, ctx), Vj,
           std::max({a * p1.norm(), b * p2.norm(), Vj.norm()}));
    SparseMat p3 = T * Vj, p4 = Vj * T;
    record("lower", j, j - 1, q_commutator(T, Vj, +1, ctx), Vl,
           std::max({a * p3.norm(), b * p4.norm(), Vl.norm()}));
    for (int k = 1; k <= n; ++k) {
      if (k == j || k == j - 1) continue;
      const SparseMat& Vk = v.components[k - 1];
      SparseMat tv = T * Vk, vt = Vk * T;
      record("commute", j, k, tv, vt, std::max(tv.norm(), vt.norm()));
    }
  }
  return rep;
}

/// Blocks <target | I^+_{n+1,k} | source> R' for k = 1..n (element k): the
/// primed inverse CGCs between two sectors, indexed [target, source].
struct PrimedBlock {
  std::vector<DenseMat> coeff;
  Row aux;
  RowRatio ratio;
};

inline PrimedBlock primed_block(const BasisIndex& tgt, const BasisIndex& src,
                                const std::vector<DenseMat>& tgt_gens,
                                const std::vector<DenseMat>& src_gens, const Row& aux,
                                const QContext& ctx) {
  const Kind kind = src.label().kind;
  const int n = src.label().n;
  const Row& ws = src.label().weight;
  const Row& wt = tgt.label().weight;
  PrimedBlock out{{}, aux, row_ratio(kind, n, aux, wt, ws, ws, wt, ctx)};
  auto blocks = composite_blocks(kind, aux, tgt, src, tgt_gens, src_gens, +1, 1, ctx);
  out.coeff.resize(static_cast<std::size_t>(n + 1));
  for (int k = 1; k <= n; ++k) out.coeff[k] = out.ratio.ratio * blocks[k];
  return out;
}

/// ((m'_n, xi') | k, (m_n, xi))': the inverse coefficient entering the
/// Wigner-Eckart factorization. Zero when m'_n is not in S(m_n).
inline Cplx primed_inverse_cgc(int k, const GTPattern& target, const GTPattern& source,
                               const IrrepLabel& label, const QContext& ctx,
                               const std::optional<Row>& aux = std::nullopt) {
  const int n = label.n;
  if (n < 2 || k < 1 || k > n) throw ValidationError("primed_inverse_cgc: k out of range");
  if (source.n() != n || target.n() != n || source.rows[0] != label.weight)
    throw ValidationError("source pattern does not belong to " + label.str());
  if (!is_valid_pattern(source, label.kind) || !is_valid_pattern(target, label.kind))
    throw ValidationError("invalid pattern");
  const Row& wt = target.rows[0];
  if (!is_dominant(wt, n, label.kind) || !detail::in_branching(wt, label.weight, n, label.kind))
    return 0.0;
  if (n == 2) throw ValidationError("primed inverse CGCs need n >= 3");
  const Row m_aux = aux ? *aux : find_aux(label.kind, n, label.weight, wt, ctx, true).primary;
  const auto src = enumerate_patterns(label);
  const auto tgt = enumerate_patterns(target_label(label, wt));
  const auto sg = dense_generators(build_representation(src, ctx));
  const auto tg = dense_generators(build_representation(tgt, ctx));
  auto pb = primed_block(tgt, src, tg, sg, m_aux, ctx);
  return pb.coeff[k](static_cast<Eigen::Index>(tgt.index_of(target)),
                     static_cast<Eigen::Index>(src.index_of(source)));
}

struct ReducedPair {
  IrrepLabel target;
  int s_target = 1;
  IrrepLabel source;
  int s_source = 1;
  Cplx value;            // least-squares reduced element
  Cplx first_ratio;      // ratio at the first contributing matrix element
  double residual = 0.0; // max |<V> - value * CGC'| / max |<V>|
  Row aux;
};

struct ForbiddenPair {
  IrrepLabel target;
  int s_target = 1;
  IrrepLabel source;
  int s_source = 1;
  double max_raw = 0.0;  // largest |<target|V_k|source>|
};

struct ReducedElements {
  std::vector<ReducedPair> pairs;
  std::vector<ForbiddenPair> forbidden;

  double max_residual() const {
    double m = 0.0;
    for (const auto& p : pairs) m = std::max(m, p.residual);
    return m;
  }
  double max_forbidden() const {
    double m = 0.0;
    for (const auto& f : forbidden) m = std::max(m, f.max_raw);
    return m;
  }
};

namespace detail {

inline bool same_sector(const IrrepLabel& a, const IrrepLabel& b) {
  return a.n == b.n && a.kind == b.kind && a.eps == b.eps;
}

}  // namespace detail

/// Fits <m', xi'; s'| V_k |m, xi; s> = CGC' x (m', s' || V || m, s)' for every
/// admissible ordered block pair. Auxiliary weights different from
/// `avoid_aux` are preferred. With `strict`, a residual above `ratio_tol`
/// raises ConsistencyError.
inline ReducedElements reduced_matrix_elements(const VectorOperator& v, const QContext& ctx,
                                               const std::optional<Row>& avoid_aux = std::nullopt,
                                               bool strict = true, double ratio_tol = 1e-8) {
  const int n = v.n;
  if (n < 3) throw ValidationError("reduced matrix elements need n >= 3");
  std::vector<DenseMat> dense_v;
  for (const auto& c : v.components) dense_v.emplace_back(DenseMat(c));
  std::map<std::string, std::pair<BasisIndex, std::vector<DenseMat>>> cache;
  auto rep_of = [&](const IrrepLabel& l) -> const std::pair<BasisIndex, std::vector<DenseMat>>& {
    auto it = cache.find(l.str());
    if (it == cache.end()) {
      auto b = enumerate_patterns(l);
      auto g = dense_generators(build_representation(b, ctx));
      it = cache.emplace(l.str(), std::make_pair(std::move(b), std::move(g))).first;
    }
    return it->second;
  };
  auto block_of = [&](const DenseMat& m, const SpaceBlock& r, const SpaceBlock& c) {
    return m.block(static_cast<Eigen::Index>(r.offset), static_cast<Eigen::Index>(c.offset),
                   static_cast<Eigen::Index>(r.dim), static_cast<Eigen::Index>(c.dim));
  };

  ReducedElements out;
  for (const auto& tb : v.blocks) {
    for (const auto& sb : v.blocks) {
      const bool admissible =
          detail::same_sector(tb.label, sb.label) &&
          detail::in_branching(tb.label.weight, sb.label.weight, n, sb.label.kind);
      if (!admissible) {
        double raw = 0.0;
        for (const auto& m : dense_v) raw = std::max(raw, block_of(m, tb, sb).cwiseAbs().maxCoeff());
        out.forbidden.push_back({tb.label, tb.s, sb.label, sb.s, raw});
        continue;
      }
      const auto& [tbasis, tgens] = rep_of(tb.label);
      const auto& [sbasis, sgens] = rep_of(sb.label);
      const Row* avoid = avoid_aux ? &*avoid_aux : nullptr;
      const AuxChoice aux =
          find_aux(sb.label.kind, n, sb.label.weight, tb.label.weight, ctx, true, avoid);
      auto pb = primed_block(tbasis, sbasis, tgens, sgens, aux.primary, ctx);
      Cplx num = 0.0;
      double den = 0.0, peak_x = 0.0, peak_c = 0.0;
      for (int k = 1; k <= n; ++k) {
        const DenseMat x = block_of(dense_v[k - 1], tb, sb);
        const DenseMat& c = pb.coeff[k];
        num += (c.conjugate().cwiseProduct(x)).sum();
        den += c.squaredNorm();
        peak_x = std::max(peak_x, x.cwiseAbs().maxCoeff());
        peak_c = std::max(peak_c, c.cwiseAbs().maxCoeff());
      }
      ReducedPair p{tb.label, tb.s, sb.label, sb.s, den > 0.0 ? num / den : Cplx(0.0), 0.0, 0.0,
                    aux.primary};
      double dev = 0.0;
      bool have_first = false;
      for (int k = 1; k <= n; ++k) {
        const DenseMat x = block_of(dense_v[k - 1], tb, sb);
        const DenseMat& c = pb.coeff[k];
        dev = std::max(dev, (x - p.value * c).cwiseAbs().maxCoeff());
        if (have_first) continue;
        for (Eigen::Index j = 0; j < c.cols() && !have_first; ++j)
          for (Eigen::Index i = 0; i < c.rows() && !have_first; ++i)
            if (std::abs(c(i, j)) > 1e-8 * peak_c) {
              p.first_ratio = x(i, j) / c(i, j);
              have_first = true;
            }
      }
      p.residual = peak_x > 0.0 ? dev / peak_x : dev;
      if (strict && p.residual > ratio_tol)
        throw ConsistencyError("Wigner-Eckart factorization fails for " + tb.label.str() +
                               " <- " + sb.label.str() + ": residual " +
                               std::to_string(p.residual));
      out.pairs.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace qso
