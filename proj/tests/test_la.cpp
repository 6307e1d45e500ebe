#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <opd/la.hpp>

#include "oracles.hpp"

using namespace opd;

namespace {

Mat from_oracle(const oracle::QMat& q) {
  Mat m = Mat::Zero(Index(q.size()), q.empty() ? 0 : Index(q[0].size()));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q[i].size(); ++j) m(Index(i), Index(j)) = q[i][j];
  return m;
}

oracle::QMat to_oracle(const Mat& m) {
  oracle::QMat q = oracle::qmat((std::size_t)m.rows(), (std::size_t)m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) q[(std::size_t)i][(std::size_t)j] = m(i, j);
  return q;
}

Mat random_mat(oracle::Rng& rng, Index rows, Index cols, int span = 4) {
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.rat(span);
  return m;
}

}  // namespace

TEST_CASE("matrix product agrees with the triple-loop oracle") {
  oracle::Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Index a = rng.uniform(0, 5), b = rng.uniform(0, 5), c = rng.uniform(0, 5);
    Mat m = random_mat(rng, a, b), n = random_mat(rng, b, c);
    Mat viaeigen = m * n;
    Mat viaoracle = from_oracle(oracle::matmul(to_oracle(m), to_oracle(n)));
    CHECK(viaeigen == viaoracle);
  }
}

TEST_CASE("kron agrees with the index-formula oracle") {
  oracle::Rng rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    Mat a = random_mat(rng, rng.uniform(1, 3), rng.uniform(1, 3));
    Mat b = random_mat(rng, rng.uniform(1, 3), rng.uniform(1, 3));
    CHECK(kron(a, b) == from_oracle(oracle::kron(to_oracle(a), to_oracle(b))));
  }
  // mixed-product property
  for (int rep = 0; rep < 6; ++rep) {
    Mat a = random_mat(rng, 2, 3), b = random_mat(rng, 3, 2);
    Mat c = random_mat(rng, 3, 2), d = random_mat(rng, 2, 3);
    CHECK(Mat(kron(a, c) * kron(b, d)) == kron(Mat(a * b), Mat(c * d)));
  }
}

TEST_CASE("swap_perm matches the oracle swap matrix") {
  for (Index da = 1; da <= 4; ++da)
    for (Index db = 1; db <= 4; ++db)
      CHECK(swap_perm<Rat>(da, db) ==
            from_oracle(oracle::swap_matrix((std::size_t)da, (std::size_t)db)));
}

TEST_CASE("tensor_perm composes and inverts correctly") {
  std::vector<Index> dims{2, 3, 2};
  // cycle factors 0->1->2->0
  std::vector<int> cyc{1, 2, 0}, inv{2, 0, 1};
  Mat p = tensor_perm<Rat>(dims, cyc);
  std::vector<Index> dims_after{2, 2, 3};  // destination dims in order
  Mat q = tensor_perm<Rat>(dims_after, inv);
  CHECK(Mat(q * p) == Mat::Identity(12, 12));
  // identity permutation
  CHECK(tensor_perm<Rat>(dims, {0, 1, 2}) == Mat::Identity(12, 12));
  // swap as a special case
  CHECK(tensor_perm<Rat>({3, 4}, {1, 0}) == swap_perm<Rat>(3, 4));
  // permuting elementary tensors moves coordinates as expected
  std::vector<Index> table = tensor_perm_index({2, 3}, {1, 0});
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) CHECK(table[(std::size_t)(i * 3 + j)] == j * 2 + i);
}

TEST_CASE("rank agrees with the Gaussian elimination oracle") {
  oracle::Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    Index r = rng.uniform(0, 6), c = rng.uniform(0, 6);
    // build low-rank products half the time
    Mat m;
    if (rep % 2 == 0 && r > 0 && c > 0) {
      Index k = rng.uniform(0, std::min(r, c));
      m = random_mat(rng, r, k) * random_mat(rng, k, c);
    } else {
      m = random_mat(rng, r, c);
    }
    CHECK((std::size_t)rank(m) == oracle::rank(to_oracle(m)));
  }
}

TEST_CASE("rref is idempotent and row-equivalent") {
  oracle::Rng rng(14);
  for (int rep = 0; rep < 15; ++rep) {
    Mat m = random_mat(rng, rng.uniform(1, 5), rng.uniform(1, 5));
    Rref<Rat> r1 = rref(m);
    Rref<Rat> r2 = rref(r1.r);
    CHECK(r1.r == r2.r);
    CHECK(rank(m) == Index(r1.pivots.size()));
    // pivot columns have unit vectors
    for (Index i = 0; i < r1.rank(); ++i) {
      for (Index row = 0; row < r1.r.rows(); ++row)
        CHECK(r1.r(row, r1.pivots[(std::size_t)i]) == (row == i ? Rat(1) : Rat(0)));
    }
  }
}

TEST_CASE("solve_right reproduces known factorizations") {
  oracle::Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Index dx = rng.uniform(1, 4), dz = rng.uniform(1, 4), n = dx + rng.uniform(0, 3);
    // K with full row rank (jointly epic family)
    Mat k;
    do {
      k = random_mat(rng, dx, n);
    } while (rank(k) < dx);
    Mat m_true = random_mat(rng, dz, dx);
    Mat l = m_true * k;
    SolveRight<Rat> s = solve_right(k, l);
    CHECK(s.consistent);
    CHECK(s.unique);
    CHECK(s.m == m_true);
  }
}

TEST_CASE("solve_right flags inconsistent and underdetermined systems") {
  Mat k(2, 1);
  k << 1, 0;  // family spans only the first coordinate
  Mat l(1, 1);
  l << 1;
  SolveRight<Rat> s = solve_right(k, l);
  CHECK(s.consistent);
  CHECK_FALSE(s.unique);

  Mat k2(1, 2);
  k2 << 1, 1;
  Mat l2(1, 2);
  l2 << 1, 2;  // same K-column twice with different images
  SolveRight<Rat> s2 = solve_right(k2, l2);
  CHECK_FALSE(s2.consistent);
}

TEST_CASE("quotient_by produces a projection with the right kernel") {
  oracle::Rng rng(16);
  for (int rep = 0; rep < 20; ++rep) {
    const Index ambient = rng.uniform(1, 6);
    const Index nrel = rng.uniform(0, 6);
    Mat rel = random_mat(rng, ambient, nrel);
    Quotient<Rat> q = quotient_by<Rat>(ambient, rel);
    CHECK(q.dim() == ambient - rank(rel));
    if (nrel > 0) CHECK(Mat(q.proj * rel) == Mat::Zero(q.dim(), nrel));
    CHECK(Mat(q.proj * q.sect) == Mat::Identity(q.dim(), q.dim()));
    // proj is onto: rank = quotient dimension
    CHECK(rank(q.proj) == q.dim());
  }
}

TEST_CASE("kernel columns span the null space") {
  oracle::Rng rng(17);
  for (int rep = 0; rep < 15; ++rep) {
    Mat m = random_mat(rng, rng.uniform(1, 4), rng.uniform(1, 5));
    Mat k = kernel(m);
    CHECK(Mat(m * k) == Mat::Zero(m.rows(), k.cols()));
    CHECK(k.cols() == m.cols() - rank(m));
    if (k.cols() > 0) CHECK(rank(k) == k.cols());
  }
}

TEST_CASE("stacking helpers keep blocks in place") {
  Mat a(2, 1), b(2, 2);
  a << 1, 2;
  b << 3, 4, 5, 6;
  Mat h = hstack<Rat>({a, b});
  CHECK(h.rows() == 2);
  CHECK(h.cols() == 3);
  CHECK(h(0, 0) == 1);
  CHECK(h(1, 2) == 6);
  Mat v = vstack<Rat>({a.transpose(), b});
  CHECK(v.rows() == 3);
  CHECK(v(0, 1) == 2);
  CHECK(v(2, 0) == 5);
  Mat d = block_diag<Rat>({a, b});
  CHECK(d.rows() == 4);
  CHECK(d.cols() == 3);
  CHECK(d(0, 0) == 1);
  CHECK(d(2, 1) == 3);
  CHECK(d(0, 1) == 0);
}
