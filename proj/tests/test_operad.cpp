#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <opd/operad.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace opd;

TEST_CASE("the associative operad satisfies every relation") {
  Operad ass = ass_operad(5);
  CheckReport rep = check_operad(ass, 5);
  for (const auto& v : rep.violations) MESSAGE(v);
  CHECK(rep.pass());
}

TEST_CASE("the weighted one-line operad satisfies every relation") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Operad o = fixture::weighted_line_operad(5, seed);
    CheckReport rep = check_operad(o, 5);
    for (const auto& v : rep.violations) MESSAGE(v);
    CHECK(rep.pass());
  }
}

TEST_CASE("a planted defect is reported with its arities and slots") {
  Operad o = ass_operad(4);
  o.circ[{2, 1, 2}].entries(0, 0) = 2;  // breaks the exchange relations
  CheckReport rep = check_operad(o, 4);
  CHECK_FALSE(rep.pass());
  bool mentions = false;
  for (const auto& v : rep.violations)
    if (v.find("(2,2,") != std::string::npos || v.find("2,2)") != std::string::npos ||
        v.find("slot") != std::string::npos)
      mentions = true;
  CHECK(mentions);

  Operad u = ass_operad(3);
  u.circ[{1, 1, 2}].entries(0, 0) = 5;  // breaks the left unit relation
  CHECK_FALSE(check_operad(u, 3).pass());
}

TEST_CASE("check_operad validates the requested bound") {
  Operad o = ass_operad(3);
  CHECK_THROWS_AS(check_operad(o, 4), ArityMismatch);
}

TEST_CASE("simultaneous composition built from partial compositions") {
  Operad o = fixture::weighted_line_operad(5, 7);
  // inserting only units is the identity
  for (int n = 1; n <= 3; ++n) {
    std::vector<int> ones((std::size_t)n, 1);
    LinMap mu = mu_from_circ(o, n, ones);
    // precomposing with units in every inner slot gives the identity on O(n)
    std::vector<Mat> chain{Mat::Identity(1, 1)};
    for (int i = 0; i < n; ++i) chain.push_back(o.unit.entries);
    Mat ins = kron_chain(chain);
    CHECK(Mat(mu.entries * ins) == Mat::Identity(1, 1));
  }
  // overflow at an intermediate arity is flagged
  CHECK_THROWS_AS(mu_from_circ(o, 3, {4, 1, 1}), ArityMismatch);
}

TEST_CASE("partial compositions can be recovered from the simultaneous family") {
  Operad o = fixture::weighted_line_operad(5, 8);
  auto mu = [&](int n, const std::vector<int>& ps) { return mu_from_circ(o, n, ps); };
  std::map<Key3, LinMap> circ2 = circ_from_mu(o.seq, o.unit, mu, 5);
  for (const auto& [key, m] : o.circ) {
    auto it = circ2.find(key);
    REQUIRE(it != circ2.end());
    CHECK(m.entries == it->second.entries);
  }
}

TEST_CASE("tree evaluation collects decorations in path order") {
  Operad o = ass_operad(3);
  Tree t = parse_tree("(*((***)()*))");
  std::vector<Space> fs = tree_factors(o.seq, t);
  REQUIRE(fs.size() == 4);  // valences 2,3,3,0 in path order
  CHECK(eval_tree(o, t).dim == 1);
  // with a free operad's components the factor dimensions vary per arity
  Sequence v;
  v.comp[2] = space(1);
  FreeOperadData f = free_operad(v, 4);
  Tree bin = parse_tree("((**)*)");
  CHECK(eval_tree(f.op, bin).dim == f.op.at(2).dim * f.op.at(2).dim);
}

TEST_CASE("edge contraction of evaluations is functorial") {
  // the nested pair below passes through a merged vertex of arity 6
  Operad o = fixture::weighted_line_operad(6, 9);
  Tree t = parse_tree("(*((***)()*))");
  // two disjoint edges contracted in either order give the same composite
  EdgeRef e1{{2, 1}}, e2{{2, 2}};
  std::map<VertexAddr, VertexAddr> m1, m2;
  Tree t1 = contract_with_map(t, e1, &m1);
  Tree t2 = contract_with_map(t, e2, &m2);
  LinMap path1 = compose(eval_contraction(o, t1, EdgeRef{m1.at(e2.upper)}),
                         eval_contraction(o, t, e1));
  LinMap path2 = compose(eval_contraction(o, t2, EdgeRef{m2.at(e1.upper)}),
                         eval_contraction(o, t, e2));
  CHECK(map_eq(path1, path2));
  // a nested pair (parent edge and child edge) also commutes
  EdgeRef p{{2}};
  std::map<VertexAddr, VertexAddr> mp, mc;
  Tree tp = contract_with_map(t, p, &mp);
  Tree tc = contract_with_map(t, e1, &mc);
  LinMap q1 = compose(eval_contraction(o, tp, EdgeRef{mp.at(e1.upper)}),
                      eval_contraction(o, t, p));
  LinMap q2 = compose(eval_contraction(o, tc, EdgeRef{mc.at(p.upper)}),
                      eval_contraction(o, t, e1));
  CHECK(map_eq(q1, q2));
}

TEST_CASE("full contraction agrees with simultaneous composition on two-level trees") {
  Operad o = fixture::weighted_line_operad(6, 10);
  for (const std::vector<int>& ps :
       std::vector<std::vector<int>>{{2, 2}, {0, 3}, {1, 2, 3}, {2, 0, 1}}) {
    const int n = int(ps.size());
    std::vector<Tree> subs;
    for (int p : ps) subs.push_back(corolla(p));
    Tree t = graft(corolla(n), subs);
    LinMap full = eval_full_contraction(o, t);
    LinMap mu = mu_from_circ(o, n, ps);
    CHECK(map_eq(full, mu));
  }
}

TEST_CASE("full contraction finds a legal order when the first one overflows") {
  // top arity 3 with children (arity 2, arity 0, arity 0): contracting the
  // arity-2 child first would need arity 4, but the arity-0 children shrink
  // the top vertex enough to stay within bound 3
  Operad o = fixture::weighted_line_operad(3, 11);
  Tree t = parse_tree("((**)()())");
  LinMap got = eval_full_contraction(o, t);
  CHECK(got.source.dim == 1);
  CHECK(same_space(got.target, o.at(2)));
  // the scalar matches composing by hand in a legal order
  LinMap step1 = eval_contraction(o, t, EdgeRef{{2}});
  Tree t1 = contract(t, EdgeRef{{2}});
  LinMap step2 = eval_contraction(o, t1, EdgeRef{{2}});
  Tree t2 = contract(t1, EdgeRef{{2}});
  LinMap step3 = eval_contraction(o, t2, EdgeRef{{1}});
  CHECK(map_eq(got, compose(step3, compose(step2, step1))));
  // a genuinely impossible shape still reports the overflow
  Operad tight = fixture::weighted_line_operad(2, 12);
  CHECK_THROWS_AS(eval_full_contraction(tight, parse_tree("((*)((*)(*)))")), ArityMismatch);
}

TEST_CASE("unit tree contracts to the operad unit") {
  Operad o = fixture::weighted_line_operad(3, 13);
  LinMap u = eval_full_contraction(o, tree_leaf());
  CHECK(map_eq(u, o.unit));
  LinMap c = eval_full_contraction(o, corolla(2));
  CHECK(map_eq(c, identity(o.at(2))));
}

TEST_CASE("free operad on one binary generator has Catalan dimensions") {
  Sequence v;
  v.comp[2] = space(1);
  FreeOperadData f = free_operad(v, 6);
  CHECK(f.exact);
  std::vector<Index> want{0, 1, 1, 2, 5, 14, 42};
  for (int n = 1; n <= 6; ++n) CHECK(f.op.at(n).dim == want[(std::size_t)n]);
  CHECK(f.op.at(0).dim == 0);
  CheckReport rep = check_operad(f.op, 4);
  for (const auto& s : rep.violations) MESSAGE(s);
  CHECK(rep.pass());
}

TEST_CASE("free operad with multi-dimensional generators multiplies decorations") {
  Sequence v;
  v.comp[2] = space(2);
  v.comp[3] = space(1);
  FreeOperadData f = free_operad(v, 4);
  // arity 3: C3 (1) + two binary shapes (2*2 each) = 9
  CHECK(f.op.at(3).dim == 1 + 4 + 4);
  CheckReport rep = check_operad(f.op, 4);
  CHECK(rep.pass());
}

TEST_CASE("weight-truncated free operad matches bounded enumeration and stays lawful") {
  Sequence v;
  v.comp[0] = space(1);
  v.comp[2] = space(1);
  CHECK_THROWS_AS(free_operad(v, 3), TruncationRequired);
  FreeOperadData f = free_operad(v, 3, 4);
  CHECK_FALSE(f.exact);
  for (int n = 0; n <= 3; ++n)
    CHECK(long(f.op.at(n).dim) == oracle::count_trees(n, {0, 2}, 4));
  CheckReport rep = check_operad(f.op, 3);
  for (const auto& s : rep.violations) MESSAGE(s);
  CHECK(rep.pass());
}

TEST_CASE("free-operad composition lands on the grafted summand") {
  Sequence v;
  v.comp[2] = space(1);
  FreeOperadData f = free_operad(v, 4);
  // compose the binary corolla with itself in slot 1: the image must be the
  // basis vector of the summand ((**)*)
  LinMap c = f.op.circ_at(2, 1, 2);
  Mat x = Mat::Zero(1, 1);
  x(0, 0) = 1;
  Mat img = c.entries * kron(x, x);
  const auto& ss = f.summands.at(3);
  Index hit = -1;
  for (const auto& s : ss)
    if (encode(s.tree) == "((**)*)") hit = s.offset;
  REQUIRE(hit >= 0);
  for (Index r = 0; r < img.rows(); ++r) CHECK(img(r, 0) == (r == hit ? Rat(1) : Rat(0)));
}

TEST_CASE("generator inclusion followed by the collapse map is the identity") {
  Operad o = fixture::weighted_line_operad(3, 14);
  OperadMap counit = free_counit(o, 3, 3);
  FreeOperadData f = free_operad(o.seq, 3, 3);
  std::map<int, LinMap> unit_in = free_unit(o.seq, f);
  for (int n : o.seq.support()) {
    if (!unit_in.count(n)) continue;
    LinMap tri = compose(counit.at(n), unit_in.at(n));
    CHECK(map_eq(tri, identity(o.at(n))));
  }
}

TEST_CASE("the collapse map is a morphism of operads") {
  Operad o = fixture::weighted_line_operad(3, 15);
  OperadMap counit = free_counit(o, 3, 3);
  CheckReport rep = check_operad_map(counit, 3);
  for (const auto& s : rep.violations) MESSAGE(s);
  CHECK(rep.pass());
}

TEST_CASE("free functor on sequence morphisms composes summand-wise") {
  Sequence v, w;
  v.comp[2] = space(1);
  w.comp[2] = space(2);
  FreeOperadData fv = free_operad(v, 3);
  FreeOperadData fw = free_operad(w, 3);
  oracle::Rng rng(16);
  std::map<int, LinMap> g{{2, fixture::random_lin(rng, space(1), space(2))}};
  std::map<int, LinMap> fg = free_map(fv, fw, g);
  // on the two-vertex summand the block is g (x) g
  CHECK(fg.at(3).entries.rows() == fw.op.at(3).dim);
  CHECK(fg.at(3).entries.cols() == fv.op.at(3).dim);
  // the free map is an operad morphism
  OperadMap as_map;
  as_map.source = fv.op;
  as_map.target = fw.op;
  for (auto& [n, m] : fg) as_map.comp[n] = m;
  CHECK(check_operad_map(as_map, 3).pass());
}

TEST_CASE("collapse after the free functor on the generator inclusion is the identity") {
  Sequence v;
  v.comp[2] = space(1);
  FreeOperadData f1 = free_operad(v, 3);
  FreeOperadData f2;
  OperadMap eps = free_counit(f1.op, 3, 3, &f2);
  std::map<int, LinMap> eta = free_unit(v, f1);
  std::map<int, LinMap> feta = free_map(f1, f2, eta);
  for (int n = 0; n <= 3; ++n) {
    Mat tri = eps.at(n).entries * feta.at(n).entries;
    CHECK(tri == Mat::Identity(f1.op.at(n).dim, f1.op.at(n).dim));
  }
}

TEST_CASE("operad morphism checking notices broken squares") {
  Operad a = ass_operad(3);
  OperadMap id_map;
  id_map.source = a;
  id_map.target = a;
  for (int n = 0; n <= 3; ++n) id_map.comp[n] = identity(a.at(n));
  CHECK(check_operad_map(id_map, 3).pass());
  id_map.comp[2].entries(0, 0) = 3;  // scales arity 2 only: squares break
  CHECK_FALSE(check_operad_map(id_map, 3).pass());
}
