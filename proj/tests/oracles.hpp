// Independent reference implementations used only by the test suite.
// Everything here is deliberately written from scratch (plain loops over
// std::vector, no Eigen, no library headers) so that library results can be
// checked against genuinely separate code paths.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Q = mpq_class;
using QMat = std::vector<std::vector<Q>>;  // row-major, rows = target

inline QMat qmat(std::size_t rows, std::size_t cols) {
  return QMat(rows, std::vector<Q>(cols, Q(0)));
}

// plain triple-loop product
inline QMat matmul(const QMat& a, const QMat& b) {
  std::size_t n = a.size(), m = n ? a[0].size() : 0, p = b.empty() ? 0 : b[0].size();
  QMat c = qmat(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < p; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Kronecker product by the index formula, left factor major:
// K[(i1*rb+i2)][(j1*cb+j2)] = A[i1][j1] * B[i2][j2]
inline QMat kron(const QMat& a, const QMat& b) {
  std::size_t ra = a.size(), ca = ra ? a[0].size() : 0;
  std::size_t rb = b.size(), cb = rb ? b[0].size() : 0;
  QMat k = qmat(ra * rb, ca * cb);
  for (std::size_t i1 = 0; i1 < ra; ++i1)
    for (std::size_t i2 = 0; i2 < rb; ++i2)
      for (std::size_t j1 = 0; j1 < ca; ++j1)
        for (std::size_t j2 = 0; j2 < cb; ++j2)
          k[i1 * rb + i2][j1 * cb + j2] = a[i1][j1] * b[i2][j2];
  return k;
}

// index of the basis vector e_i (x) e_j of A (x) B, dims (da, db)
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t db) { return i * db + j; }

// swap permutation A (x) B -> B (x) A as a 0/1 matrix, checked by index arithmetic
inline QMat swap_matrix(std::size_t da, std::size_t db) {
  QMat s = qmat(da * db, da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) s[pair_index(j, i, da)][pair_index(i, j, db)] = 1;
  return s;
}

// rank by straightforward Gaussian elimination (no pivoting tricks)
inline std::size_t rank(QMat m) {
  std::size_t rows = m.size(), cols = rows ? m[0].size() : 0, r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[r], m[piv]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Q f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return r;
}

// solve A x = b if possible (A rows x cols, b rows); returns first solution found
inline std::optional<std::vector<Q>> solve(QMat a, std::vector<Q> b) {
  std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  std::vector<long> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[r], a[piv]);
    std::swap(b[r], b[piv]);
    Q d = a[r][c];
    for (std::size_t j = 0; j < cols; ++j) a[r][j] /= d;
    b[r] /= d;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Q f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    pivot_col.push_back((long)c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  std::vector<Q> x(cols, Q(0));
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[(std::size_t)pivot_col[i]] = b[i];
  return x;
}

// Catalan numbers by the recursion c(0)=1, c(n) = sum c(i) c(n-1-i)
inline mpz_class catalan(int n) {
  std::vector<mpz_class> c(std::size_t(n) + 1);
  c[0] = 1;
  for (int k = 1; k <= n; ++k) {
    mpz_class s = 0;
    for (int i = 0; i < k; ++i) s += c[(std::size_t)i] * c[std::size_t(k - 1 - i)];
    c[(std::size_t)k] = s;
  }
  return c[(std::size_t)n];
}

// Number of rooted planar trees with the given number of leaves, all inner
// vertex arities drawn from `support`, and at most `max_inner` inner vertices.
// Counted by direct recursion on the root arity.
inline long count_trees(int leaves, const std::set<int>& support, int max_inner) {
  if (max_inner < 0 || leaves < 0) return 0;
  static std::map<std::tuple<std::set<int>, int, int>, long> memo;
  auto key = std::make_tuple(support, leaves, max_inner);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  long total = (leaves == 1) ? 1 : 0;  // the bare leaf
  if (max_inner >= 1) {
    for (int k : support) {
      if (k == 0) {
        if (leaves == 0) total += 1;
        continue;
      }
      // compositions of `leaves` into k parts, each a smaller tree, with the
      // remaining inner-vertex budget shared among the parts
      std::function<long(int, int, int)> go = [&](int idx, int left, int inner_left) -> long {
        if (idx == k) return (left == 0) ? 1 : 0;
        long acc = 0;
        for (int take = 0; take <= left; ++take) {
          for (int w = 0; w <= inner_left; ++w) {
            // trees with `take` leaves and exactly w inner vertices
            long with_w = count_trees(take, support, w) -
                          (w > 0 ? count_trees(take, support, w - 1) : 0);
            if (with_w == 0) continue;
            acc += with_w * go(idx + 1, left - take, inner_left - w);
          }
        }
        return acc;
      };
      total += go(0, leaves, max_inner - 1);
    }
  }
  memo[key] = total;
  return total;
}

// Number of directed paths of a given length in a small quiver.
struct Quiver {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;  // (from, to)
};

inline long path_count(const Quiver& q, int from, int to, int length) {
  if (length == 0) return from == to ? 1 : 0;
  long acc = 0;
  for (auto [a, b] : q.edges)
    if (a == from) acc += path_count(q, b, to, length - 1);
  return acc;
}

// Deterministic pseudo-random rationals for property fixtures.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  int uniform(int lo, int hi) { return lo + int(next() % std::uint64_t(hi - lo + 1)); }
  Q rat(int span = 5) {
    int num = uniform(-span, span);
    int den = uniform(1, span);
    Q q(num, den);
    q.canonicalize();
    return q;
  }
};

}  // namespace oracle
