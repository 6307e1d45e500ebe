#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <opd/trees.hpp>

#include "oracles.hpp"

using namespace opd;

namespace {
// running example: top vertex of arity 2, second child of arity 3 whose
// children are (arity 3 with three leaves, arity 0, leaf)
const char* kExample = "(*((***)()*))";
}  // namespace

TEST_CASE("encode and parse are inverse") {
  for (const char* s : {"*", "()", "(*)", "(**)", kExample, "((()(*)(()))()(**))"}) {
    Tree t = parse_tree(s);
    CHECK(encode(t) == s);
    CHECK(parse_tree(encode(t)) == t);
  }
  CHECK_THROWS_AS(parse_tree("(*"), ParseError);
  CHECK_THROWS_AS(parse_tree("*)"), ParseError);
  CHECK_THROWS_AS(parse_tree("(x)"), ParseError);
  CHECK_THROWS_AS(parse_tree(""), ParseError);
}

TEST_CASE("leaf and inner-vertex counts") {
  Tree t = parse_tree(kExample);
  CHECK(n_leaves(t) == 5);
  CHECK(n_inner(t) == 4);
  CHECK(n_leaves(tree_leaf()) == 1);
  CHECK(n_inner(tree_leaf()) == 0);
  CHECK(n_leaves(corolla(0)) == 0);
  CHECK(n_inner(corolla(0)) == 1);
}

TEST_CASE("inner vertices come out in path order with correct valences and levels") {
  Tree t = parse_tree(kExample);
  std::vector<InnerVertex> iv = inner_vertices(t);
  REQUIRE(iv.size() == 4);
  // top vertex
  CHECK(iv[0].addr == VertexAddr{});
  CHECK(iv[0].arity == 2);
  CHECK(iv[0].level == 1);
  // its second child
  CHECK(iv[1].addr == VertexAddr{2});
  CHECK(iv[1].arity == 3);
  CHECK(iv[1].level == 2);
  // the deep arity-3 vertex precedes its arity-0 sibling
  CHECK(iv[2].addr == VertexAddr{2, 1});
  CHECK(iv[2].arity == 3);
  CHECK(iv[2].level == 3);
  CHECK(iv[3].addr == VertexAddr{2, 2});
  CHECK(iv[3].arity == 0);
  CHECK(iv[3].level == 3);
}

TEST_CASE("leaves come out left to right") {
  Tree t = parse_tree(kExample);
  std::vector<VertexAddr> ls = leaf_addrs(t);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == VertexAddr{1});
  CHECK(ls[1] == VertexAddr{2, 1, 1});
  CHECK(ls[2] == VertexAddr{2, 1, 2});
  CHECK(ls[3] == VertexAddr{2, 1, 3});
  CHECK(ls[4] == VertexAddr{2, 3});
}

TEST_CASE("the example tree arises by slot-composition of corollas") {
  // C3 with an arity-0 tree in slot 2, then C3 in slot 1, then into slot 2 of C2
  Tree inner3 = circ_i_tree(circ_i_tree(corolla(3), 2, corolla(0)), 1, corolla(3));
  Tree t = circ_i_tree(corolla(2), 2, inner3);
  CHECK(encode(t) == kExample);
}

TEST_CASE("grafting matches the worked example") {
  Tree t = parse_tree(kExample);
  Tree c1c0 = circ_i_tree(corolla(1), 1, corolla(0));
  Tree got = graft(t, {tree_leaf(), corolla(0), corolla(1), c1c0, corolla(2)});
  CHECK(encode(got) == "(*((()(*)(()))()(**)))");
  CHECK_THROWS_AS(graft(t, {tree_leaf()}), ArityMismatch);
}

TEST_CASE("grafting is associative and unital") {
  Tree t = parse_tree("(**)");
  Tree a = parse_tree("(*)"), b = parse_tree("(**)");
  // (t(a,b))(x1..x3) == t(a(x1), b(x2,x3))
  Tree x1 = corolla(0), x2 = corolla(2), x3 = tree_leaf();
  Tree lhs = graft(graft(t, {a, b}), {x1, x2, x3});
  Tree rhs = graft(t, {graft(a, {x1}), graft(b, {x2, x3})});
  CHECK(lhs == rhs);
  // units
  CHECK(graft(tree_leaf(), {t}) == t);
  CHECK(graft(t, {tree_leaf(), tree_leaf()}) == t);
}

TEST_CASE("contracting an inner edge merges valences at the right slot") {
  Tree t = parse_tree(kExample);
  std::map<VertexAddr, VertexAddr> am;
  Tree q = contract_with_map(t, EdgeRef{{2, 1}}, &am);
  CHECK(encode(q) == "(*(***()*))");
  // merged vertex sits at the lower vertex's place
  CHECK(am.at(VertexAddr{2}) == VertexAddr{2});
  CHECK(am.at(VertexAddr{2, 1}) == VertexAddr{2});
  // the arity-0 sibling shifts right by (3 - 1)
  CHECK(am.at(VertexAddr{2, 2}) == VertexAddr{2, 4});
  CHECK(am.at(VertexAddr{}) == VertexAddr{});
  // leaf count is preserved, inner count drops by one
  CHECK(n_leaves(q) == n_leaves(t));
  CHECK(n_inner(q) == n_inner(t) - 1);
}

TEST_CASE("contraction rejects root and leaf edges") {
  Tree t = parse_tree(kExample);
  CHECK_THROWS_AS(contract(t, EdgeRef{{}}), NotInnerEdge);
  CHECK_THROWS_AS(contract(t, EdgeRef{{1}}), NotInnerEdge);       // leaf edge
  CHECK_THROWS_AS(contract(t, EdgeRef{{2, 3}}), NotInnerEdge);    // leaf edge
  CHECK_THROWS_AS(contract(t, EdgeRef{{7}}), NotInnerEdge);       // dangling
  CHECK(is_inner_edge(t, EdgeRef{{2}}));
  CHECK(is_inner_edge(t, EdgeRef{{2, 2}}));
}

TEST_CASE("contracting a set of edges is order independent") {
  Tree t = parse_tree(kExample);
  EdgeRef e1{{2}}, e2{{2, 1}}, e3{{2, 2}};
  // all pairs, both one-at-a-time orders via the address map
  for (auto [a, b] : std::vector<std::pair<EdgeRef, EdgeRef>>{{e1, e2}, {e1, e3}, {e2, e3}}) {
    Tree both = contract_set(t, {a, b});
    std::map<VertexAddr, VertexAddr> m1;
    Tree t1 = contract_with_map(t, a, &m1);
    Tree t12 = contract(t1, EdgeRef{m1.at(b.upper)});
    std::map<VertexAddr, VertexAddr> m2;
    Tree t2 = contract_with_map(t, b, &m2);
    Tree t21 = contract(t2, EdgeRef{m2.at(a.upper)});
    CHECK(both == t12);
    CHECK(both == t21);
  }
  // contracting every inner edge yields the corolla on the leaf count
  Tree all = contract_set(t, {e1, e2, e3});
  CHECK(all == corolla(5));
}

TEST_CASE("random trees: contraction functoriality and count bookkeeping") {
  oracle::Rng rng(31);
  int done = 0;
  while (done < 60) {
    // random tree with arities in {0,1,2,3}, at most 6 inner vertices
    std::function<Tree(int, int&)> build = [&](int depth, int& budget) -> Tree {
      if (budget <= 0 || depth > 3 || rng.uniform(0, 2) == 0) return tree_leaf();
      --budget;
      int a = rng.uniform(0, 3);
      std::vector<Tree> kids;
      for (int i = 0; i < a; ++i) kids.push_back(build(depth + 1, budget));
      return tree_inner(std::move(kids));
    };
    int budget = 6;
    int dummy = budget;
    Tree t = build(0, dummy);
    if (t.is_leaf) continue;
    // collect inner edges
    std::vector<EdgeRef> inner;
    for (const auto& iv : inner_vertices(t))
      if (!iv.addr.empty()) inner.push_back(EdgeRef{iv.addr});
    if (inner.size() < 2) continue;
    ++done;
    const EdgeRef a = inner[(std::size_t)rng.uniform(0, int(inner.size()) - 1)];
    EdgeRef b = a;
    while (b == a) b = inner[(std::size_t)rng.uniform(0, int(inner.size()) - 1)];
    std::map<VertexAddr, VertexAddr> ma;
    Tree ta = contract_with_map(t, a, &ma);
    Tree tab = contract(ta, EdgeRef{ma.at(b.upper)});
    CHECK(tab == contract_set(t, {a, b}));
    CHECK(n_leaves(tab) == n_leaves(t));
    CHECK(n_inner(tab) == n_inner(t) - 2);
  }
}

TEST_CASE("star, link, extended star and the contracted-star leaf count") {
  Tree t = parse_tree(kExample);
  VertexAddr v{2, 1};  // the deep arity-3 vertex
  CHECK(star(t, v) == corolla(3));
  CHECK_THROWS_AS(star(t, VertexAddr{}), RootInStar);
  // this vertex has leaf children, so its link is not defined within the tree
  CHECK_THROWS_AS(link(t, v), NotInnerEdge);

  // build a tree where some vertex has only inner neighbours
  Tree big = parse_tree("(((*)(**))*)");
  VertexAddr u{1};  // arity 2, children of arities 1 and 2, parent arity 2
  std::vector<VertexAddr> lk = link(big, u);
  REQUIRE(lk.size() == 3);
  CHECK(lk[0] == VertexAddr{});
  CHECK(lk[1] == VertexAddr{1, 1});
  CHECK(lk[2] == VertexAddr{1, 2});
  Tree ext = extended_star(big, u);
  CHECK(encode(ext) == "(((*)(**))*)");
  // contracting the middle vertex's edges inside the extended star leaves a
  // corolla with r leaves, where r = (sum of link valences) - 1
  int r = r_of(big, u);
  CHECK(r == 2 + 1 + 2 - 1);
  std::set<EdgeRef> all;
  for (const auto& iv : inner_vertices(ext))
    if (!iv.addr.empty()) all.insert(EdgeRef{iv.addr});
  CHECK(contract_set(ext, all) == corolla(r));
  CHECK(n_leaves(ext) == r);
}

TEST_CASE("corolla decomposition reproduces the tree and prints compactly") {
  Tree t = parse_tree(kExample);
  GraftExpr e = decompose_into_corollas(t);
  CHECK(eval_graft_expr(e) == t);
  CHECK(graft_expr_str(e) == "C2(U,C3(C3,C0,U))");
  CHECK(graft_expr_str(decompose_into_corollas(tree_leaf())) == "U");
  CHECK(graft_expr_str(decompose_into_corollas(corolla(4))) == "C4");
  // round trip on random trees
  oracle::Rng rng(32);
  for (int rep = 0; rep < 40; ++rep) {
    std::function<Tree(int)> build = [&](int depth) -> Tree {
      if (depth > 3 || rng.uniform(0, 2) == 0) return tree_leaf();
      int a = rng.uniform(0, 3);
      std::vector<Tree> kids;
      for (int i = 0; i < a; ++i) kids.push_back(build(depth + 1));
      return tree_inner(std::move(kids));
    };
    Tree r = build(0);
    CHECK(eval_graft_expr(decompose_into_corollas(r)) == r);
  }
}

TEST_CASE("binary-tree enumeration matches the Catalan numbers") {
  for (int n = 1; n <= 8; ++n) {
    std::vector<Tree> ts = enumerate_trees(n, {2});
    CHECK(mpz_class(ts.size()) == oracle::catalan(n - 1));
    for (const auto& t : ts) {
      CHECK(n_leaves(t) == n);
      for (const auto& iv : inner_vertices(t)) CHECK(iv.arity == 2);
    }
  }
}

TEST_CASE("enumeration over mixed supports matches the counting oracle") {
  using S = std::set<int>;
  for (const S& supp : {S{2}, S{3}, S{2, 3}, S{2, 4}}) {
    for (int n = 1; n <= 6; ++n) {
      std::vector<Tree> ts = enumerate_trees(n, supp);
      CHECK(long(ts.size()) == oracle::count_trees(n, supp, std::max(0, n - 1)));
    }
  }
  // supports with 0 or 1 need an explicit bound
  CHECK_THROWS_AS(enumerate_trees(2, S{0, 2}), TruncationRequired);
  for (int w = 0; w <= 5; ++w) {
    for (int n = 0; n <= 4; ++n) {
      CHECK(long(enumerate_trees(n, S{0, 2}, w).size()) == oracle::count_trees(n, S{0, 2}, w));
      CHECK(long(enumerate_trees(n, S{0, 1, 2}, w).size()) ==
            oracle::count_trees(n, S{0, 1, 2}, w));
    }
  }
}

TEST_CASE("enumeration output is duplicate-free and canonically sorted") {
  std::vector<Tree> ts = enumerate_trees(5, {0, 2, 3}, 4);
  std::set<std::string> seen;
  int prev_inner = -1;
  std::string prev_code;
  for (const auto& t : ts) {
    std::string c = encode(t);
    CHECK(seen.insert(c).second);
    int in = n_inner(t);
    CHECK(in >= prev_inner);
    if (in == prev_inner) CHECK(prev_code < c);
    prev_inner = in;
    prev_code = c;
  }
}

TEST_CASE("even-level trees: leaves sit at even levels and even-vertex count is exact") {
  std::set<int> evens{0, 2, 3}, odds{1, 2};
  for (int n = 0; n <= 3; ++n)
    for (int t = 1; t <= 3; ++t) {
      std::vector<EvenTree> ts = enumerate_even_level_trees(n, t, evens, odds);
      std::set<std::string> seen;
      for (const auto& et : ts) {
        CHECK(seen.insert(encode(et.tree)).second);
        CHECK(n_leaves(et.tree) == n);
        CHECK(int(et.evens.size()) == t);
        // structural bookkeeping: odd count = 1 + sum of even arities,
        // sum of odd arities = t + n
        int sum_even = 0, sum_odd = 0;
        for (const auto& iv : et.evens) {
          CHECK(iv.level % 2 == 0);
          sum_even += iv.arity;
        }
        for (const auto& iv : et.odds) {
          CHECK(iv.level % 2 == 1);
          sum_odd += iv.arity;
        }
        CHECK(int(et.odds.size()) == 1 + sum_even);
        CHECK(sum_odd == t + n);
        // leaves at even levels (level of an address is its length plus one)
        for (const auto& la : leaf_addrs(et.tree)) CHECK(la.size() % 2 == 1);
        // arities in support
        for (const auto& iv : et.evens) CHECK(evens.count(iv.arity) == 1);
        for (const auto& iv : et.odds) CHECK(odds.count(iv.arity) == 1);
      }
    }
  // t=1: one even vertex of arity a with a odd children under an odd top of
  // arity b; count by hand for n=0: top C_b with the even vertex in one of b
  // slots... enumerate and cross-check a tiny case against a manual list
  std::vector<EvenTree> small = enumerate_even_level_trees(0, 1, {0}, {1});
  REQUIRE(small.size() == 1);
  CHECK(encode(small[0].tree) == "(())");
}

TEST_CASE("even-level enumeration is exhaustive on a hand-built member") {
  std::vector<EvenTree> ts = enumerate_even_level_trees(2, 2, {0, 2}, {1, 2});
  // top arity 2 over (even arity 2 over two odd arity-1 vertices, one of which
  // caps an even arity-0 vertex and the other a leaf) and a level-2 leaf
  bool found = false;
  for (const auto& et : ts)
    if (encode(et.tree) == "(((())(*))*)") found = true;
  CHECK(found);
  // leaves at odd levels never appear: ((**)*) has leaves at level 3 and 2
  for (const auto& et : ts) CHECK(encode(et.tree) != "((**)*)");
  CHECK(ts.size() > 0);
}

TEST_CASE("tree rendering is stable") {
  CHECK(render_tree(parse_tree("(*)")) == "o1\n`-*\n");
  CHECK(render_tree(tree_leaf()) == "*\n");
}
