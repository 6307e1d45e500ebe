// Dense exact linear algebra on top of Eigen: Kronecker products, tensor
// factor permutations, reduced row echelon form, right-solves against jointly
// epimorphic families, and canonical quotients. These free functions are the
// engine behind every colimit in the library.
#pragma once

#include <opd/errors.hpp>
#include <opd/rational.hpp>

#include <map>
#include <numeric>
#include <vector>

namespace opd {

template <class S>
using DenseMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class DA, class DB>
DenseMat<typename DA::Scalar> kron(const Eigen::MatrixBase<DA>& ae,
                                   const Eigen::MatrixBase<DB>& be) {
  using S = typename DA::Scalar;
  const DenseMat<S> a = ae.derived(), b = be.derived();
  DenseMat<S> k = DenseMat<S>::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j1 = 0; j1 < a.cols(); ++j1)
    for (Index i1 = 0; i1 < a.rows(); ++i1) {
      const S& av = a(i1, j1);
      if (av == 0) continue;
      for (Index j2 = 0; j2 < b.cols(); ++j2)
        for (Index i2 = 0; i2 < b.rows(); ++i2) {
          const S& bv = b(i2, j2);
          if (bv == 0) continue;
          k(i1 * b.rows() + i2, j1 * b.cols() + j2) = av * bv;
        }
    }
  return k;
}

template <class S>
DenseMat<S> kron_chain(const std::vector<DenseMat<S>>& fs) {
  DenseMat<S> acc = DenseMat<S>::Identity(1, 1);
  for (const auto& f : fs) acc = kron(acc, f);
  return acc;
}

// Product that skips zero entries; structure matrices here are mostly zeros
// and exact-rational multiplies are expensive, so this beats the generic
// dense product by a wide margin.
template <class S>
DenseMat<S> matmul(const DenseMat<S>& a, const DenseMat<S>& b) {
  if (a.cols() != b.rows()) throw DomainMismatch("matmul: inner dimensions disagree");
  DenseMat<S> r = DenseMat<S>::Zero(a.rows(), b.cols());
  for (Index k = 0; k < a.cols(); ++k)
    for (Index i = 0; i < a.rows(); ++i) {
      const S& x = a(i, k);
      if (x == 0) continue;
      for (Index j = 0; j < b.cols(); ++j) {
        const S& y = b(k, j);
        if (y == 0) continue;
        r(i, j) += x * y;
      }
    }
  return r;
}

// Index table of a tensor-factor permutation. Basis vectors of the product
// are indexed in mixed radix with the leftmost factor most significant.
// dst_pos[f] is the position the source factor f moves to; entry src of the
// result is the destination index of source basis vector src.
inline std::vector<Index> tensor_perm_index(const std::vector<Index>& dims,
                                            const std::vector<int>& dst_pos) {
  const int r = int(dims.size());
  Index total = 1;
  for (Index d : dims) total *= d;
  std::vector<Index> dst_dims((std::size_t)r, 0);
  for (int f = 0; f < r; ++f) dst_dims[(std::size_t)dst_pos[(std::size_t)f]] = dims[(std::size_t)f];
  // stride of each destination slot in the destination mixed radix
  std::vector<Index> dst_stride((std::size_t)r, 1);
  for (int p = r - 2; p >= 0; --p)
    dst_stride[(std::size_t)p] = dst_stride[(std::size_t)p + 1] * dst_dims[(std::size_t)p + 1];
  std::vector<Index> out((std::size_t)total, 0);
  std::vector<Index> digit((std::size_t)r, 0);
  for (Index src = 0; src < total; ++src) {
    Index rem = src, dst = 0;
    for (int f = r - 1; f >= 0; --f) {
      digit[(std::size_t)f] = rem % dims[(std::size_t)f];
      rem /= dims[(std::size_t)f];
    }
    for (int f = 0; f < r; ++f)
      dst += digit[(std::size_t)f] * dst_stride[(std::size_t)dst_pos[(std::size_t)f]];
    out[(std::size_t)src] = dst;
  }
  return out;
}

// The same permutation as a matrix mapping the source-ordered basis to the
// destination-ordered basis.
template <class S>
DenseMat<S> tensor_perm(const std::vector<Index>& dims, const std::vector<int>& dst_pos) {
  std::vector<Index> table = tensor_perm_index(dims, dst_pos);
  const Index total = Index(table.size());
  DenseMat<S> m = DenseMat<S>::Zero(total, total);
  for (Index src = 0; src < total; ++src) m(table[(std::size_t)src], src) = 1;
  return m;
}

// A (x) B -> B (x) A
template <class S>
DenseMat<S> swap_perm(Index da, Index db) {
  return tensor_perm<S>({da, db}, {1, 0});
}

template <class S>
struct Rref {
  DenseMat<S> r;                // reduced row echelon form
  std::vector<Index> pivots;    // pivot column per pivot row
  Index rank() const { return Index(pivots.size()); }
};

// Gauss-Jordan with skip-zero inner loops; exact arithmetic, first nonzero
// pivot in each column (deterministic).
template <class S>
Rref<S> rref(const DenseMat<S>& m_in) {
  using RowMajor = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor m = m_in;
  const Index rows = m.rows(), cols = m.cols();
  std::vector<Index> pivots;
  Index row = 0;
  std::vector<Index> nz;
  nz.reserve((std::size_t)cols);
  for (Index col = 0; col < cols && row < rows; ++col) {
    Index piv = row;
    while (piv < rows && m(piv, col) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != row) m.row(piv).swap(m.row(row));
    if (m(row, col) != 1) {
      const S d = m(row, col);
      for (Index j = col; j < cols; ++j)
        if (m(row, j) != 0) m(row, j) /= d;
    }
    nz.clear();
    for (Index j = col; j < cols; ++j)
      if (m(row, j) != 0) nz.push_back(j);
    for (Index r2 = 0; r2 < rows; ++r2) {
      if (r2 == row || m(r2, col) == 0) continue;
      const S f = m(r2, col);
      for (Index j : nz) m(r2, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  Rref<S> out;
  out.r = m;
  out.pivots = std::move(pivots);
  return out;
}

template <class S>
Index rank(const DenseMat<S>& m) {
  return rref(m).rank();
}

// Solve M . K = L for M, where the columns of K are required to span the whole
// source of M (a jointly epimorphic family). `consistent` is false when no M
// exists, `unique` is false when the family does not span.
template <class S>
struct SolveRight {
  DenseMat<S> m;
  bool consistent = true;
  bool unique = true;
};

template <class S>
SolveRight<S> solve_right(const DenseMat<S>& k, const DenseMat<S>& l) {
  if (k.cols() != l.cols())
    throw DomainMismatch("solve_right: K and L must have equally many columns");
  const Index dx = k.rows(), dz = l.rows(), n = k.cols();
  DenseMat<S> g(n, dx + dz);
  g.leftCols(dx) = k.transpose();
  g.rightCols(dz) = l.transpose();
  Rref<S> r = rref(g);
  SolveRight<S> out;
  out.m = DenseMat<S>::Zero(dz, dx);
  Index k_pivots = 0;
  for (Index i = 0; i < r.rank(); ++i) {
    const Index p = r.pivots[(std::size_t)i];
    if (p < dx) {
      out.m.col(p) = r.r.row(i).segment(dx, dz).transpose();
      ++k_pivots;
    } else {
      out.consistent = false;
    }
  }
  out.unique = (k_pivots == dx);
  return out;
}

// Canonical presentation of ambient / span(columns of rel): proj kills the
// subspace, sect splits proj, proj * sect = identity on the quotient.
template <class S>
struct Quotient {
  DenseMat<S> proj;  // ambient -> quotient
  DenseMat<S> sect;  // quotient -> ambient, a chosen section
  Index dim() const { return proj.rows(); }
};

template <class S>
Quotient<S> quotient_by(Index ambient, const DenseMat<S>& rel) {
  if (rel.rows() != ambient && rel.size() != 0)
    throw DomainMismatch("quotient_by: relation columns live in the wrong space");
  Rref<S> b = rel.size() == 0 ? Rref<S>{DenseMat<S>::Zero(0, ambient), {}}
                              : rref(DenseMat<S>(rel.transpose()));
  std::vector<bool> is_pivot((std::size_t)ambient, false);
  for (Index p : b.pivots) is_pivot[(std::size_t)p] = true;
  std::vector<Index> free_cols;
  for (Index c = 0; c < ambient; ++c)
    if (!is_pivot[(std::size_t)c]) free_cols.push_back(c);
  const Index q = Index(free_cols.size());
  Quotient<S> out;
  out.proj = DenseMat<S>::Zero(q, ambient);
  out.sect = DenseMat<S>::Zero(ambient, q);
  for (Index j = 0; j < q; ++j) {
    out.proj(j, free_cols[(std::size_t)j]) = 1;
    out.sect(free_cols[(std::size_t)j], j) = 1;
    for (Index i = 0; i < b.rank(); ++i)
      out.proj(j, b.pivots[(std::size_t)i]) = -b.r(i, free_cols[(std::size_t)j]);
  }
  return out;
}

// Basis of the kernel of M, one column per free variable.
template <class S>
DenseMat<S> kernel(const DenseMat<S>& m) {
  Rref<S> r = rref(m);
  const Index cols = m.cols();
  std::vector<bool> is_pivot((std::size_t)cols, false);
  for (Index p : r.pivots) is_pivot[(std::size_t)p] = true;
  std::vector<Index> free_cols;
  for (Index c = 0; c < cols; ++c)
    if (!is_pivot[(std::size_t)c]) free_cols.push_back(c);
  DenseMat<S> k = DenseMat<S>::Zero(cols, Index(free_cols.size()));
  for (Index j = 0; j < Index(free_cols.size()); ++j) {
    k(free_cols[(std::size_t)j], j) = 1;
    for (Index i = 0; i < r.rank(); ++i)
      k(r.pivots[(std::size_t)i], j) = -r.r(i, free_cols[(std::size_t)j]);
  }
  return k;
}

template <class S>
DenseMat<S> hstack(const std::vector<DenseMat<S>>& parts) {
  Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    rows = std::max(rows, p.rows());
    cols += p.cols();
  }
  DenseMat<S> m = DenseMat<S>::Zero(rows, cols);
  Index at = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows && p.cols() > 0)
      throw DomainMismatch("hstack: inconsistent row counts");
    m.block(0, at, p.rows(), p.cols()) = p;
    at += p.cols();
  }
  return m;
}

template <class S>
DenseMat<S> vstack(const std::vector<DenseMat<S>>& parts) {
  Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    cols = std::max(cols, p.cols());
    rows += p.rows();
  }
  DenseMat<S> m = DenseMat<S>::Zero(rows, cols);
  Index at = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols && p.rows() > 0)
      throw DomainMismatch("vstack: inconsistent column counts");
    m.block(at, 0, p.rows(), p.cols()) = p;
    at += p.rows();
  }
  return m;
}

template <class S>
DenseMat<S> block_diag(const std::vector<DenseMat<S>>& parts) {
  Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    rows += p.rows();
    cols += p.cols();
  }
  DenseMat<S> m = DenseMat<S>::Zero(rows, cols);
  Index ra = 0, ca = 0;
  for (const auto& p : parts) {
    m.block(ra, ca, p.rows(), p.cols()) = p;
    ra += p.rows();
    ca += p.cols();
  }
  return m;
}

// Column-map sparse matrices for the large structure checks: endomorphism
// operads have composition matrices with at most one nonzero per column, so
// the axiom identities compare cheaply in this form while their dense
// Kronecker expansions would not even fit in memory.
template <class S>
struct SparseMat {
  Index rows = 0, cols = 0;
  std::vector<std::map<Index, S>> col;  // only nonzero entries are stored

  static SparseMat zero(Index r, Index c) { return {r, c, std::vector<std::map<Index, S>>((std::size_t)c)}; }
  static SparseMat ident(Index n) {
    SparseMat m = zero(n, n);
    for (Index j = 0; j < n; ++j) m.col[(std::size_t)j][j] = 1;
    return m;
  }
  static SparseMat from_dense(const DenseMat<S>& d) {
    SparseMat m = zero(d.rows(), d.cols());
    for (Index j = 0; j < d.cols(); ++j)
      for (Index i = 0; i < d.rows(); ++i)
        if (d(i, j) != 0) m.col[(std::size_t)j][i] = d(i, j);
    return m;
  }
};

template <class S>
SparseMat<S> sp_kron(const SparseMat<S>& a, const SparseMat<S>& b) {
  SparseMat<S> k = SparseMat<S>::zero(a.rows * b.rows, a.cols * b.cols);
  for (Index ja = 0; ja < a.cols; ++ja)
    for (const auto& [ia, av] : a.col[(std::size_t)ja])
      for (Index jb = 0; jb < b.cols; ++jb)
        for (const auto& [ib, bv] : b.col[(std::size_t)jb])
          k.col[(std::size_t)(ja * b.cols + jb)][ia * b.rows + ib] = av * bv;
  return k;
}

template <class S>
SparseMat<S> sp_matmul(const SparseMat<S>& a, const SparseMat<S>& b) {
  if (a.cols != b.rows) throw DomainMismatch("sp_matmul: inner dimensions disagree");
  SparseMat<S> r = SparseMat<S>::zero(a.rows, b.cols);
  for (Index j = 0; j < b.cols; ++j) {
    auto& out = r.col[(std::size_t)j];
    for (const auto& [k, bv] : b.col[(std::size_t)j])
      for (const auto& [i, av] : a.col[(std::size_t)k]) {
        S& x = out[i];
        x += av * bv;
        if (x == 0) out.erase(i);
      }
  }
  return r;
}

template <class S>
bool sp_eq(const SparseMat<S>& a, const SparseMat<S>& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (Index j = 0; j < a.cols; ++j)
    if (a.col[(std::size_t)j] != b.col[(std::size_t)j]) return false;
  return true;
}

}  // namespace opd
