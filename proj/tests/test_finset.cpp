#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <opd/finset.hpp>
#include <opd/operad.hpp>

using namespace opd;

TEST_CASE("finite set maps compose and validate") {
  FinSetObj a{{"p", "q"}}, b{{"x", "y", "z"}};
  FinSetMap f = finset_map(a, b, {"z", "x"});
  FinSetMap g = finset_map(b, b, {"y", "y", "y"});
  FinSetMap gf = finset_compose(g, f);
  CHECK(gf.images == std::vector<std::string>{"y", "y"});
  CHECK(finset_map_eq(finset_compose(f, finset_identity(a)), f));
  CHECK_THROWS_AS(finset_map(a, b, {"nope", "x"}), DomainMismatch);
  CHECK_THROWS_AS(finset_compose(f, g), DomainMismatch);
}

TEST_CASE("finite set products use the left-major ordering") {
  FinSetObj a{{"0", "1"}}, b{{"u", "v", "w"}};
  FinSetObj p = finset_product(a, b);
  CHECK(p.elements.size() == 6);
  CHECK(p.elements[0] == "(0,u)");
  CHECK(p.elements[3] == "(1,u)");
  FinSetMap sw = finset_symmetry(a, b);
  CHECK(sw.images[0 * 3 + 2] == "(w,0)");
  CHECK(sw.images[1 * 3 + 1] == "(v,1)");
}

TEST_CASE("finite set pushout glues along the common source") {
  FinSetObj u{{"s"}}, a{{"a1", "a2"}}, b{{"b1"}};
  FinSetMap f = finset_map(u, a, {"a1"});
  FinSetMap g = finset_map(u, b, {"b1"});
  FinSetPushout po = finset_pushout(f, g);
  // a1 ~ b1 glued; classes: {a1,b1}, {a2}
  CHECK(po.apex.elements.size() == 2);
  CHECK(po.inj_left.images[0] == po.inj_right.images[0]);
  CHECK(po.inj_left.images[1] != po.inj_left.images[0]);
  CHECK(po.inj_left.images[0] == "a1");  // least member name represents
}

TEST_CASE("finite set pushout with empty source is disjoint union") {
  FinSetObj a{{"x"}}, b{{"x", "y"}};
  FinSetMap f = finset_map(finset_initial(), a, {});
  FinSetMap g = finset_map(finset_initial(), b, {});
  FinSetPushout po = finset_pushout(f, g);
  CHECK(po.apex.elements.size() == 3);
  // name collision between the two copies of "x" must be disambiguated
  CHECK(po.inj_left.images[0] != po.inj_right.images[0]);
}

TEST_CASE("chained identifications collapse transitively") {
  // u has two points mapping to (a1,a2) on one side and to the same b point on the other
  FinSetObj u{{"s", "t"}}, a{{"a1", "a2"}}, b{{"b"}};
  FinSetMap f = finset_map(u, a, {"a1", "a2"});
  FinSetMap g = finset_map(u, b, {"b", "b"});
  FinSetPushout po = finset_pushout(f, g);
  CHECK(po.apex.elements.size() == 1);
}

TEST_CASE("the one-point associative operad in sets satisfies every relation") {
  FinSetOperad ass = ass_operad_finset(5);
  CheckReport rep = check_operad(ass, 5);
  for (const auto& v : rep.violations) MESSAGE(v);
  CHECK(rep.pass());
}

TEST_CASE("a planted defect in a set operad is reported") {
  FinSetOperad ass = ass_operad_finset(4);
  FinSetObj two = ass.at(2);
  CHECK(two.elements.size() == 1);
  // enlarge arity 2 to two elements and send a unit composite to the wrong one
  FinSetOperad broken = ass;
  broken.comp[2] = FinSetObj{{"e", "x"}};
  for (auto& [key, m] : broken.circ) {
    auto [mm, ii, nn] = key;
    (void)ii;
    m.source = finset_product(broken.at(mm), broken.at(nn));
    m.target = broken.at(mm + nn - 1);
    m.images.assign(m.source.elements.size(), m.target.elements[0]);
  }
  broken.circ[{2, 1, 1}].images[0] = "x";  // (e, unit) composed to x: unit law broken
  CheckReport rep = check_operad(broken, 3);
  CHECK_FALSE(rep.pass());
}
