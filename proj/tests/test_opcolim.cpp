#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <opd/opcolim.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace opd;

namespace {

// a single free generator in arity `a` with dimension d, pushed out of U = 0
PushoutProblem free_cell_problem(int a, Index d, const Operad& o) {
  PushoutProblem pb;
  pb.v.comp[a] = space(d);
  pb.o = o;
  return pb;
}

}  // namespace

TEST_CASE("a free cell over the unit operad builds the free operad") {
  PushoutProblem pb = free_cell_problem(2, 1, fixture::unit_operad(5));
  PushoutResult res = build_pushout(pb, 5);
  CHECK(res.exact);
  CHECK(res.certified);
  Sequence v;
  v.comp[2] = space(1);
  FreeOperadData fv = free_operad(v, 5);
  for (int n = 0; n <= 5; ++n) {
    CHECK(res.p.at(n).dim == fv.op.at(n).dim);
    CHECK(res.stabilized_at.at(n) <= std::max(0, n - 1));
  }
  CHECK(res.operad_total);
  CheckReport rep = check_operad(res.p, 5);
  for (const auto& x : rep.violations) MESSAGE(x);
  CHECK(rep.pass());
  // the canonical map out of V hits the generating corolla
  CHECK(res.gbar_prime.at(2).entries.cwiseAbs().sum() > 0);
  CheckReport fmap = check_operad_map(res.f_prime, 5);
  CHECK(fmap.pass());
}

TEST_CASE("adjoining a free cell to a free operad enlarges its generators") {
  // W has two binary generators, U picks the first, V is one fresh generator;
  // the push-out is free on the three-dimensional join in arity 2
  Sequence w;
  w.comp[2] = space(2);
  FreeOperadData fw = free_operad(w, 4);
  PushoutProblem pb;
  pb.u.comp[2] = space(1);
  pb.v.comp[2] = space(1);
  Mat fm(1, 1);
  fm(0, 0) = 1;
  pb.f[2] = lin(pb.u.at(2), pb.v.at(2), fm);
  Mat gm(2, 1);
  gm(0, 0) = 1;
  gm(1, 0) = 0;
  pb.gbar[2] = compose(free_unit(w, fw).at(2), lin(pb.u.at(2), w.at(2), gm));
  pb.o = fw.op;
  PushoutResult res = build_pushout(pb, 4);

  Sequence x;
  x.comp[2] = space(2);  // dim V + dim W - dim U
  FreeOperadData fx = free_operad(x, 4);
  for (int n = 0; n <= 4; ++n) CHECK(res.p.at(n).dim == fx.op.at(n).dim);
  CHECK(res.certified);
  CHECK(res.operad_total);
  CheckReport rep = check_operad(res.p, 4);
  for (const auto& x2 : rep.violations) MESSAGE(x2);
  CHECK(rep.pass());
  CheckReport fmap = check_operad_map(res.f_prime, 4);
  for (const auto& x2 : fmap.violations) MESSAGE(x2);
  CHECK(fmap.pass());
}

TEST_CASE("composition maps respect the stage filtration") {
  Sequence w;
  w.comp[2] = space(2);
  FreeOperadData fw = free_operad(w, 4);
  PushoutProblem pb;
  pb.u.comp[2] = space(1);
  pb.v.comp[2] = space(1);
  pb.f[2] = lin(pb.u.at(2), pb.v.at(2), Mat::Identity(1, 1));
  Mat gm(2, 1);
  gm(0, 0) = 0;
  gm(1, 0) = 1;
  pb.gbar[2] = compose(free_unit(w, fw).at(2), lin(pb.u.at(2), w.at(2), gm));
  pb.o = fw.op;
  PushoutResult res = build_pushout(pb, 4);
  int checked = 0;
  for (const auto& [key, c] : res.comps) {
    auto [m, i, n, s, t] = std::tuple{key[0], key[1], key[2], key[3], key[4]};
    const auto& stm = res.stages.at(m);
    const auto& stn = res.stages.at(n);
    const auto& stt = res.stages.at(m + n - 1);
    if (s >= 1) {
      const LinMap& prev = res.comps.at({m, i, n, s - 1, t});
      Mat lhs = matmul(c.entries,
                       kron(stm[(std::size_t)s].phi.entries,
                            Mat(Mat::Identity(stn[(std::size_t)t].obj.dim,
                                              stn[(std::size_t)t].obj.dim))));
      Mat rhs = matmul(stt[(std::size_t)(s + t)].phi.entries, prev.entries);
      CHECK(lhs == rhs);
      ++checked;
    }
    if (t >= 1) {
      const LinMap& prev = res.comps.at({m, i, n, s, t - 1});
      Mat lhs = matmul(c.entries,
                       kron(Mat(Mat::Identity(stm[(std::size_t)s].obj.dim,
                                              stm[(std::size_t)s].obj.dim)),
                            stn[(std::size_t)t].phi.entries));
      Mat rhs = matmul(stt[(std::size_t)(s + t)].phi.entries, prev.entries);
      CHECK(lhs == rhs);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("an isomorphic cell leaves the operad unchanged") {
  PushoutProblem pb;
  pb.u.comp[2] = space(1);
  pb.v.comp[2] = space(1);
  pb.f[2] = lin(pb.u.at(2), pb.v.at(2), Mat::Identity(1, 1));
  Mat gm(1, 1);
  gm(0, 0) = 1;
  pb.gbar[2] = lin(pb.u.at(2), space(1), gm);
  pb.o = fixture::reduced_ass_operad(4);
  PushoutResult res = build_pushout(pb, 4);
  CHECK(res.certified);
  for (int n = 0; n <= 4; ++n) {
    CHECK(res.p.at(n).dim == pb.o.at(n).dim);
    const auto& st = res.stages.at(n);
    for (std::size_t t = 1; t < st.size(); ++t)
      CHECK(rank(st[t].phi.entries) == st[t].obj.dim);  // every stage map is iso
  }
  CheckReport rep = check_operad(res.p, 4);
  CHECK(rep.pass());
  // f_prime is an isomorphism in every arity
  for (int n = 0; n <= 4; ++n) CHECK(rank(res.f_prime.at(n).entries) == res.p.at(n).dim);
}

TEST_CASE("the induced map hits a known evaluation on the free push-out") {
  PushoutProblem pb = free_cell_problem(2, 1, fixture::unit_operad(4));
  PushoutResult res = build_pushout(pb, 4);
  // cocone into the associative operad: units to units, the generator to a
  // chosen multiple c of the binary multiplication
  Operad ass = ass_operad(4);
  OperadMap f2;
  f2.source = pb.o;
  f2.target = ass;
  f2.comp[1] = lin(pb.o.at(1), ass.at(1), Mat::Identity(1, 1));
  Rat c(3, 7);
  std::map<int, LinMap> g2;
  Mat gm(1, 1);
  gm(0, 0) = c;
  g2[2] = lin(pb.v.at(2), ass.at(2), gm);
  OperadMap h = induced_morphism(res, f2, g2);
  // a tree with k inner vertices evaluates to c^k times the basis operation
  Sequence v;
  v.comp[2] = space(1);
  FreeOperadData fv = free_operad(v, 4);
  for (int n = 1; n <= 4; ++n) {
    Rat ck = 1;
    for (int k = 1; k < n; ++k) ck *= c;
    Mat expect = Mat::Constant(1, fv.op.at(n).dim, ck);
    CHECK(h.at(n).entries == expect);
  }
}

TEST_CASE("randomized cocones factor uniquely through the push-out") {
  PushoutProblem pb = free_cell_problem(2, 1, fixture::unit_operad(3));
  PushoutResult res = build_pushout(pb, 3);
  std::vector<PushoutCocone> samples;
  oracle::Rng rng(2026);
  for (int q = 0; q < 5; ++q) {
    PushoutCocone sc;
    sc.f2.source = pb.o;
    sc.f2.target = fixture::weighted_line_operad(3, 100 + (std::uint64_t)q);
    sc.f2.comp[1] = lin(pb.o.at(1), sc.f2.target.at(1), Mat::Identity(1, 1));
    sc.gbar2[2] = fixture::random_lin(rng, pb.v.at(2), sc.f2.target.at(2));
    samples.push_back(std::move(sc));
  }
  CheckReport rep = verify_universal(res, samples);
  for (const auto& x : rep.violations) MESSAGE(x);
  CHECK(rep.pass());
}

TEST_CASE("a mismatched cocone square is rejected") {
  PushoutProblem pb;
  pb.u.comp[2] = space(1);
  pb.v.comp[2] = space(1);
  pb.f[2] = lin(pb.u.at(2), pb.v.at(2), Mat::Identity(1, 1));
  Mat gm(1, 1);
  gm(0, 0) = 1;
  pb.gbar[2] = lin(pb.u.at(2), space(1), gm);
  pb.o = fixture::reduced_ass_operad(3);
  PushoutResult res = build_pushout(pb, 3);
  OperadMap f2;
  f2.source = pb.o;
  f2.target = fixture::reduced_ass_operad(3);
  for (int n = 0; n <= 3; ++n)
    f2.comp[n] = lin(pb.o.at(n), f2.target.at(n), Mat::Identity(pb.o.at(n).dim, pb.o.at(n).dim));
  std::map<int, LinMap> g2;
  Mat bad(1, 1);
  bad(0, 0) = 2;  // the square needs gbar2(2) . f(2) = f2(2) . gbar(2) = 1
  g2[2] = lin(pb.v.at(2), f2.target.at(2), bad);
  CHECK_THROWS_AS(induced_morphism(res, f2, g2), IncompatibleCocone);
}

TEST_CASE("cells in arity one require a stage bound") {
  PushoutProblem pb = free_cell_problem(1, 1, fixture::unit_operad(2));
  CHECK_THROWS_AS(build_pushout(pb, 2), TruncationRequired);
  PushoutResult res = build_pushout(pb, 1, 3);
  CHECK_FALSE(res.exact);
  CHECK_FALSE(res.certified);
  // one new chain per stage: dimensions grow linearly and never settle
  Sequence v;
  v.comp[1] = space(1);
  FreeOperadData fv = free_operad(v, 1, 3);
  CHECK(res.p.at(1).dim == fv.op.at(1).dim);
  CHECK(res.p.at(1).dim == 4);
  CHECK_FALSE(res.operad_total);
  CHECK_THROWS_AS(induced_morphism(res, res.f_prime, res.gbar_prime), TruncationRequired);
}

TEST_CASE("arity-zero cells settle inside a truncated run") {
  PushoutProblem pb = free_cell_problem(0, 1, fixture::unit_operad(2));
  PushoutResult res = build_pushout(pb, 2, 2);
  CHECK_FALSE(res.certified);
  CHECK(res.operad_total);  // the observed stages settle within the bound
  CHECK(res.p.at(0).dim == 1);
  CHECK(res.p.at(1).dim == 1);
  CHECK(res.p.at(2).dim == 0);
  CHECK(res.stabilized_at.at(0) == 1);
  CheckReport rep = check_operad(res.p, 2);
  for (const auto& x : rep.violations) MESSAGE(x);
  CHECK(rep.pass());
}

TEST_CASE("the push-out square closes and the stages are spanned") {
  Sequence w;
  w.comp[2] = space(1);
  w.comp[3] = space(1);
  FreeOperadData fw = free_operad(w, 4);
  PushoutProblem pb;
  pb.u.comp[2] = space(1);
  pb.v.comp[2] = space(2);
  Mat fm(2, 1);
  fm(0, 0) = 1;
  fm(1, 0) = 0;
  pb.f[2] = lin(pb.u.at(2), pb.v.at(2), fm);
  pb.gbar[2] = free_unit(w, fw).at(2);
  pb.o = fw.op;
  PushoutResult res = build_pushout(pb, 4);
  // join dimensions: V(2) + W(2) - U(2) = 2, plus the ternary generator
  Sequence x;
  x.comp[2] = space(2);
  x.comp[3] = space(1);
  FreeOperadData fx = free_operad(x, 4);
  for (int n = 0; n <= 4; ++n) CHECK(res.p.at(n).dim == fx.op.at(n).dim);
  CheckReport rep = verify_universal(res, {});
  for (const auto& x2 : rep.violations) MESSAGE(x2);
  CHECK(rep.pass());
}
