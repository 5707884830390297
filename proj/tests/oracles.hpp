#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's enumeration, coefficient or CGC code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "qso/gtbasis.hpp"

namespace oracle {

using Cplx = std::complex<double>;
using Dense = Eigen::MatrixXcd;
using DRow = std::vector<int>;  // doubled entries
using DPattern = std::vector<DRow>;

/// [n] for integer n >= 0 as the finite sum q^{n-1} + q^{n-3} + ... + q^{1-n}.
inline double qint(int n, double q) {
  double s = 0.0;
  for (int k = n - 1; k >= 1 - n; k -= 2) s += std::pow(q, k);
  return s;
}

/// Non-increasing check on a chain of doubled values.
inline bool chain_ok(const std::vector<int>& c) {
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] > c[i - 1]) return false;
  return true;
}

/// Betweenness of `lo` (level L-1) under `up` (level L), written out as a chain.
inline bool between(const DRow& up, int L, const DRow& lo, bool nonclassical) {
  std::vector<int> chain;
  const int p = L / 2;
  if (L % 2 == 1) {
    for (int i = 0; i < p; ++i) {
      chain.push_back(up[i]);
      chain.push_back(lo[i]);
    }
    chain.push_back(nonclassical ? 1 : -up[p - 1]);
  } else {
    for (int i = 0; i + 1 < p; ++i) {
      chain.push_back(up[i]);
      chain.push_back(lo[i]);
    }
    chain.push_back(nonclassical ? up[p - 1] : std::abs(up[p - 1]));
  }
  return chain_ok(chain);
}

/// Every tableau under `top` found by scanning a box of candidate rows.
inline std::vector<DPattern> brute_force_patterns(int n, const DRow& top, bool nonclassical) {
  const int bound = std::abs(top[0]);
  const int parity = ((top[0] % 2) + 2) % 2;
  std::vector<DPattern> out;
  std::function<void(DPattern&, int)> rec = [&](DPattern& cur, int level) {
    if (level == 1) {
      out.push_back(cur);
      return;
    }
    const int len = level / 2;
    DRow row(len, -bound);
    while (true) {
      bool ok = true;
      for (int v : row) ok = ok && (((v % 2) + 2) % 2) == parity;
      if (ok && between(cur.back(), level + 1, row, nonclassical)) {
        cur.push_back(row);
        rec(cur, level - 1);
        cur.pop_back();
      }
      int i = 0;
      while (i < len && row[i] == bound) row[i++] = -bound;
      if (i == len) break;
      ++row[i];
    }
  };
  DPattern start{top};
  rec(start, n - 1);
  for (auto& p : out)
    while (!p.empty() && p.back().empty()) p.pop_back();
  return out;
}

/// Doubled-integer view of a library tableau (empty level-1 row dropped).
inline DPattern to_doubled(const qso::GTPattern& p) {
  DPattern out;
  for (const auto& r : p.rows) {
    if (r.empty()) continue;
    DRow d;
    for (auto v : r) d.push_back(v.twice());
    out.push_back(d);
  }
  return out;
}

// l-coordinates of a row at `level` from doubled entries.
inline std::vector<double> lcoord(const DRow& r, int level) {
  const int p = level / 2;
  std::vector<double> l;
  for (int j = 1; j <= static_cast<int>(r.size()); ++j) {
    const double m = r[j - 1] / 2.0;
    l.push_back(level % 2 == 1 ? m + p - j + 1 : m + p - j);
  }
  return l;
}

/// Classical Gel'fand-Tsetlin matrix of I_{k+1,k} at q = 1 (plain numbers in
/// place of q-numbers), in the order given by `basis`.
inline Dense gt_matrix_q1(int n, const std::vector<DPattern>& basis, int k) {
  std::map<DPattern, int> index;
  for (int i = 0; i < static_cast<int>(basis.size()); ++i) index[basis[i]] = i;
  const int d = static_cast<int>(basis.size());
  Dense M = Dense::Zero(d, d);
  // row at level L sits at position n - L of the pattern
  auto row_at = [&](const DPattern& p, int L) -> DRow {
    const int pos = n - L;
    return pos < static_cast<int>(p.size()) ? p[pos] : DRow{};
  };
  auto add = [&](const DPattern& target, int col, Cplx v) {
    auto it = index.find(target);
    if (it != index.end()) M(it->second, col) += v;
  };
  for (int col = 0; col < d; ++col) {
    const DPattern& xi = basis[col];
    if (k == 1) {
      M(col, col) = Cplx(0.0, row_at(xi, 2)[0] / 2.0);
      continue;
    }
    const DRow up = row_at(xi, k + 1), mid = row_at(xi, k), low = row_at(xi, k - 1);
    const auto L = lcoord(up, k + 1);
    const auto lam = lcoord(low, k - 1);
    if (k % 2 == 0) {
      const int p = k / 2;
      auto A = [&](const DRow& m, int j) -> Cplx {
        const auto l = lcoord(m, k);
        const double lj = l[j];
        double num = 1.0, den = 1.0;
        for (int i = 0; i < p; ++i) num *= (L[i] + lj) * (L[i] - lj - 1);
        for (int i = 0; i < p - 1; ++i) num *= (lam[i] + lj) * (lam[i] - lj - 1);
        if (num == 0.0) return 0.0;
        for (int i = 0; i < p; ++i)
          if (i != j) den *= (l[i] * l[i] - lj * lj) * (l[i] * l[i] - (lj + 1) * (lj + 1));
        return 0.5 * std::sqrt(Cplx(num / den, 0.0));
      };
      for (int j = 0; j < p; ++j) {
        DPattern plus = xi, minus = xi;
        plus[n - k][j] += 2;
        minus[n - k][j] -= 2;
        if (index.count(plus)) add(plus, col, A(mid, j));
        if (index.count(minus)) add(minus, col, -A(minus[n - k], j));
      }
    } else {
      const int p = (k + 1) / 2;
      auto B = [&](const DRow& m, int j) -> Cplx {
        const auto l = lcoord(m, k);
        const double lj = l[j];
        double num = 1.0, den = (4 * lj * lj - 1) * lj * lj;
        for (int i = 0; i < p; ++i) num *= (L[i] + lj) * (L[i] - lj);
        for (int i = 0; i < p - 1; ++i) num *= (lam[i] + lj) * (lam[i] - lj);
        if (num == 0.0) return 0.0;
        for (int i = 0; i < p - 1; ++i)
          if (i != j) den *= (l[i] * l[i] - lj * lj) * ((l[i] - 1) * (l[i] - 1) - lj * lj);
        return std::sqrt(Cplx(num / den, 0.0));
      };
      for (int j = 0; j < p - 1; ++j) {
        DPattern plus = xi, minus = xi;
        plus[n - k][j] += 2;
        minus[n - k][j] -= 2;
        if (index.count(plus)) add(plus, col, B(mid, j));
        if (index.count(minus)) add(minus, col, -B(minus[n - k], j));
      }
      const auto l = lcoord(mid, k);
      double c = 1.0;
      for (int i = 0; i < p; ++i) c *= L[i];
      for (int i = 0; i < p - 1; ++i) c *= lam[i];
      if (c != 0.0)
        for (int i = 0; i < p - 1; ++i) c /= l[i] * (l[i] - 1);
      M(col, col) += Cplx(0.0, c);
    }
  }
  return M;
}

/// Dimension of {X : A_k X = X B_k for all k} and the distance of P/||P||
/// from that space.
struct NullSpace {
  int nullity = 0;
  double distance = 0.0;
};

inline NullSpace intertwiner_space(const std::vector<Dense>& A, const std::vector<Dense>& B,
                                   const Dense& P) {
  const auto N = A.front().rows(), d = B.front().rows();
  Dense sys = Dense::Zero(static_cast<Eigen::Index>(A.size()) * N * d, N * d);
  for (std::size_t k = 0; k < A.size(); ++k) {
    // vec(A X - X B) = (I (x) A - B^T (x) I) vec(X), column-major vec
    const auto off = static_cast<Eigen::Index>(k) * N * d;
    for (Eigen::Index c = 0; c < d; ++c) sys.block(off + c * N, c * N, N, N) += A[k];
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        if (B[k](r, c) != Cplx(0.0))
          sys.block(off + c * N, r * N, N, N) -= B[k](r, c) * Dense::Identity(N, N);
  }
  Eigen::BDCSVD<Dense> svd(sys, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-9 * top) ++rank;
  NullSpace out;
  out.nullity = static_cast<int>(N * d) - rank;
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(P.data(), N * d);
  v /= v.norm();
  const Dense V = svd.matrixV().rightCols(out.nullity);
  out.distance = (v - V * (V.adjoint() * v)).norm();
  return out;
}

/// Eigenvalues sorted by (real, imag) for multiset comparison.
inline std::vector<Cplx> sorted_eigenvalues(const Dense& M) {
  Eigen::ComplexEigenSolver<Dense> es(M, false);
  std::vector<Cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](Cplx a, Cplx b) {
    const double ra = std::round(a.real() * 1e6), rb = std::round(b.real() * 1e6);
    return ra != rb ? ra < rb : a.imag() < b.imag();
  });
  return ev;
}

}  // namespace oracle
