#pragma once

// The vector representation T_1, the tensor product T_1 (x) T induced by the
// coideal embedding into U_q(sl_n), and a check of that embedding on the
// n-dimensional U_q(sl_n) module.

#include <string>
#include <vector>

#include "qso/reps.hpp"

namespace qso {

/// Pairs (k, xi), k = 1..n, with the vector index outermost:
/// index(k, xi) = (k - 1) * dim(T) + index(xi).
struct TensorBasis {
  int n = 2;
  std::size_t inner_dim = 0;

  std::size_t size() const { return static_cast<std::size_t>(n) * inner_dim; }
  std::size_t index(int k, std::size_t inner) const {
    return static_cast<std::size_t>(k - 1) * inner_dim + inner;
  }
  int slot(std::size_t idx) const { return static_cast<int>(idx / inner_dim) + 1; }
  std::size_t inner(std::size_t idx) const { return idx % inner_dim; }
};

/// T_1(I_{j,j-1}) v_k = -q^{1/2} delta_{k,j-1} v_j + q^{-1/2} delta_{k,j} v_{j-1}.
inline std::vector<GeneratorMatrix> vector_rep(int n, const QContext& ctx) {
  if (n < 2) throw ValidationError("vector_rep needs n >= 2");
  const double up = q_power(HalfInt::half(), ctx);
  const double down = q_power(-HalfInt::half(), ctx);
  std::vector<GeneratorMatrix> out;
  for (int j = 2; j <= n; ++j) {
    std::vector<Triplet> t{{j - 1, j - 2, -up}, {j - 2, j - 1, down}};
    out.push_back({std::nullopt, GenId::simple(j - 1), from_triplets(n, n, t)});
  }
  return out;
}

/// T_1 (x) T from the generator matrices of T (element i is I_{i+2,i+1}).
inline std::vector<GeneratorMatrix> tensor_rep(const std::vector<GeneratorMatrix>& t_mats,
                                               const QContext& ctx) {
  if (t_mats.empty()) throw DimensionError("tensor_rep needs at least one generator");
  const int n = static_cast<int>(t_mats.size()) + 1;
  const auto d = t_mats.front().mat.rows();
  for (std::size_t i = 0; i < t_mats.size(); ++i) {
    const auto& m = t_mats[i].mat;
    if (m.rows() != d || m.cols() != d)
      throw DimensionError("tensor_rep: generator matrices must be square of equal size");
    if (t_mats[i].gen != GenId::simple(static_cast<int>(i) + 1))
      throw DimensionError("tensor_rep expects generators ordered I_21, I_32, ...");
  }
  const double q = ctx.q;
  const double up = q_power(HalfInt::half(), ctx);
  const double down = q_power(-HalfInt::half(), ctx);
  std::vector<GeneratorMatrix> out;
  for (int j = 2; j <= n; ++j) {
    const SparseMat& T = t_mats[j - 2].mat;
    std::vector<Triplet> trip;
    for (int k = 1; k <= n; ++k) {
      const double c = k == j - 1 ? q : (k == j ? 1.0 / q : 1.0);
      const auto off = static_cast<int>((k - 1) * d);
      for (int col = 0; col < T.outerSize(); ++col)
        for (SparseMat::InnerIterator it(T, col); it; ++it)
          trip.emplace_back(off + static_cast<int>(it.row()), off + col, c * it.value());
    }
    const auto lo = static_cast<int>((j - 2) * d);  // block of v_{j-1}
    const auto hi = static_cast<int>((j - 1) * d);  // block of v_j
    for (int a = 0; a < d; ++a) {
      trip.emplace_back(hi + a, lo + a, -up);
      trip.emplace_back(lo + a, hi + a, down);
    }
    out.push_back({std::nullopt, GenId::simple(j - 1), from_triplets(n * d, n * d, trip)});
  }
  return out;
}

/// e_i, f_i, k_i, k_i^{-1} (i = 1..n-1) on the vector module of U_q(sl_n).
struct SlnGenerators {
  int n = 2;
  std::vector<SparseMat> e, f, k, k_inv;
};

inline SlnGenerators sl_vector_generators(int n, const QContext& ctx) {
  if (n < 2) throw ValidationError("sl_vector_generators needs n >= 2");
  SlnGenerators g{n, {}, {}, {}, {}};
  const double up = q_power(HalfInt::half(), ctx);
  const double down = q_power(-HalfInt::half(), ctx);
  for (int i = 1; i < n; ++i) {
    // indices are 0-based: v_i -> i-1
    g.e.push_back(from_triplets(n, n, {{i - 1, i, -down}}));
    g.f.push_back(from_triplets(n, n, {{i, i - 1, -up}}));
    std::vector<Triplet> kt, kit;
    for (int v = 1; v <= n; ++v) {
      const int ex = (v == i ? 1 : 0) - (v == i + 1 ? 1 : 0);
      kt.emplace_back(v - 1, v - 1, q_power(ex, ctx));
      kit.emplace_back(v - 1, v - 1, q_power(-ex, ctx));
    }
    g.k.push_back(from_triplets(n, n, kt));
    g.k_inv.push_back(from_triplets(n, n, kit));
  }
  return g;
}

struct EmbeddingReport {
  RelationReport relations;       // relations of the embedded generators
  double sl_relation_residual = 0.0;   // k k^{-1} = 1 and [e,f] = (k - k^{-1})/(q - q^{-1})
  double formula_residual = 0.0;  // embedded generators vs their closed-form action
  double vector_rep_residual = 0.0;  // conjugated embedded generators vs T_1
  std::string conjugator;         // "identity" or "diag((-1)^k)"
  double tol = 0.0;

  bool pass() const {
    return relations.pass() && sl_relation_residual <= tol && formula_residual <= tol &&
           vector_rep_residual <= tol;
  }
};

/// Forms I~_{i+1,i} = f_i - q^{-1} k_i e_i and checks it against the relations,
/// against the closed-form action -q^{1/2} delta_{i,k} v_{k+1} + q^{-1/2}
/// delta_{i+1,k} v_{k-1}, and against T_1 up to a diagonal sign conjugation.
inline EmbeddingReport embedding_check(int n, const QContext& ctx, double tol = 1e-12) {
  const SlnGenerators g = sl_vector_generators(n, ctx);
  const double up = q_power(HalfInt::half(), ctx);
  const double down = q_power(-HalfInt::half(), ctx);
  EmbeddingReport rep;
  rep.tol = tol;

  const SparseMat id = identity(n);
  for (int i = 0; i < n - 1; ++i) {
    SparseMat kk = g.k[i] * g.k_inv[i];
    rep.sl_relation_residual = std::max(rep.sl_relation_residual, SparseMat(kk - id).norm());
    SparseMat ef = g.e[i] * g.f[i], fe = g.f[i] * g.e[i];
    SparseMat rhs = (g.k[i] - g.k_inv[i]) * Cplx(1.0 / (ctx.q - 1.0 / ctx.q));
    rep.sl_relation_residual = std::max(rep.sl_relation_residual, SparseMat(ef - fe - rhs).norm());
  }

  std::vector<SparseMat> emb;
  for (int i = 0; i < n - 1; ++i) {
    SparseMat ke = g.k[i] * g.e[i];
    emb.push_back(SparseMat(g.f[i] - Cplx(1.0 / ctx.q) * ke));
  }
  rep.relations = check_relations(emb, ctx);

  for (int i = 1; i < n; ++i) {
    SparseMat formula = from_triplets(n, n, {{i, i - 1, -up}, {i - 1, i, down}});
    rep.formula_residual = std::max(rep.formula_residual, SparseMat(emb[i - 1] - formula).norm());
  }

  const auto t1 = vector_rep(n, ctx);
  std::vector<Triplet> st;
  for (int v = 0; v < n; ++v) st.emplace_back(v, v, (v + 1) % 2 == 0 ? 1.0 : -1.0);
  const SparseMat sign = from_triplets(n, n, st);
  auto residual_with = [&](const SparseMat& s) {
    double r = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      SparseMat conj = s * emb[i] * s;
      r = std::max(r, SparseMat(conj - t1[i].mat).norm());
    }
    return r;
  };
  const double r_id = residual_with(id);
  const double r_sign = residual_with(sign);
  if (r_id <= r_sign) {
    rep.vector_rep_residual = r_id;
    rep.conjugator = "identity";
  } else {
    rep.vector_rep_residual = r_sign;
    rep.conjugator = "diag((-1)^k)";
  }
  return rep;
}

}  // namespace qso
