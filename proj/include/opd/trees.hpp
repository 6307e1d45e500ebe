// Planted planar trees with leaves. A tree value is the node structure above
// the root edge: the top node is either the single leaf (the unit tree U) or
// an inner vertex with an ordered, possibly empty list of child subtrees. The
// root vertex and root edge below the top node are implicit.
//
// Text encoding: Leaf = "*", Inner = "(" + children + ")". Vertex addresses
// are 1-based child paths from the top node; levels count distance from the
// root (root = 0, top node = 1).
#pragma once

#include <opd/errors.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace opd {

struct Tree {
  bool is_leaf = true;
  std::vector<Tree> kids;
};

inline Tree tree_leaf() { return Tree{true, {}}; }
inline Tree tree_inner(std::vector<Tree> kids) { return Tree{false, std::move(kids)}; }
inline Tree corolla(int n) {
  return tree_inner(std::vector<Tree>((std::size_t)n, tree_leaf()));
}

inline std::string encode(const Tree& t) {
  if (t.is_leaf) return "*";
  std::string s = "(";
  for (const auto& k : t.kids) s += encode(k);
  return s + ")";
}

inline bool operator==(const Tree& a, const Tree& b) {
  if (a.is_leaf != b.is_leaf) return false;
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!(a.kids[i] == b.kids[i])) return false;
  return true;
}
inline bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }

inline Tree parse_tree(const std::string& s) {
  std::size_t pos = 0;
  std::function<Tree()> go = [&]() -> Tree {
    if (pos >= s.size()) throw ParseError("tree: unexpected end of input");
    if (s[pos] == '*') {
      ++pos;
      return tree_leaf();
    }
    if (s[pos] == '(') {
      ++pos;
      std::vector<Tree> kids;
      while (pos < s.size() && s[pos] != ')') kids.push_back(go());
      if (pos >= s.size()) throw ParseError("tree: missing ')'");
      ++pos;
      return tree_inner(std::move(kids));
    }
    throw ParseError(std::string("tree: unexpected character '") + s[pos] + "'");
  };
  Tree t = go();
  if (pos != s.size()) throw ParseError("tree: trailing characters");
  return t;
}

using VertexAddr = std::vector<int>;  // 1-based child steps from the top node

struct EdgeRef {
  VertexAddr upper;  // address of the endpoint farther from the root
};

inline bool operator<(const EdgeRef& a, const EdgeRef& b) { return a.upper < b.upper; }
inline bool operator==(const EdgeRef& a, const EdgeRef& b) { return a.upper == b.upper; }

struct InnerVertex {
  VertexAddr addr;
  int arity = 0;
  int level = 0;
};

inline int n_leaves(const Tree& t) {
  if (t.is_leaf) return 1;
  int n = 0;
  for (const auto& k : t.kids) n += n_leaves(k);
  return n;
}

inline int n_inner(const Tree& t) {
  if (t.is_leaf) return 0;
  int n = 1;
  for (const auto& k : t.kids) n += n_inner(k);
  return n;
}

inline const Tree& node_at(const Tree& t, const VertexAddr& addr) {
  const Tree* cur = &t;
  for (int step : addr) {
    if (cur->is_leaf || step < 1 || step > int(cur->kids.size()))
      throw DomainMismatch("node_at: address does not resolve");
    cur = &cur->kids[(std::size_t)step - 1];
  }
  return *cur;
}

namespace detail {
inline void walk_inner(const Tree& t, VertexAddr& addr, std::vector<InnerVertex>& out) {
  if (t.is_leaf) return;
  out.push_back({addr, int(t.kids.size()), int(addr.size()) + 1});
  for (int i = 1; i <= int(t.kids.size()); ++i) {
    addr.push_back(i);
    walk_inner(t.kids[(std::size_t)i - 1], addr, out);
    addr.pop_back();
  }
}
inline void walk_leaves(const Tree& t, VertexAddr& addr, std::vector<VertexAddr>& out) {
  if (t.is_leaf) {
    out.push_back(addr);
    return;
  }
  for (int i = 1; i <= int(t.kids.size()); ++i) {
    addr.push_back(i);
    walk_leaves(t.kids[(std::size_t)i - 1], addr, out);
    addr.pop_back();
  }
}
}  // namespace detail

// inner vertices in path order (depth-first preorder)
inline std::vector<InnerVertex> inner_vertices(const Tree& t) {
  std::vector<InnerVertex> out;
  VertexAddr addr;
  detail::walk_inner(t, addr, out);
  return out;
}

// leaf addresses in path order (left to right)
inline std::vector<VertexAddr> leaf_addrs(const Tree& t) {
  std::vector<VertexAddr> out;
  VertexAddr addr;
  detail::walk_leaves(t, addr, out);
  return out;
}

// ---- grafting -------------------------------------------------------------

namespace detail {
inline Tree graft_walk(const Tree& t, const std::vector<Tree>& subs, std::size_t& next) {
  if (t.is_leaf) return subs[next++];
  std::vector<Tree> kids;
  kids.reserve(t.kids.size());
  for (const auto& k : t.kids) kids.push_back(graft_walk(k, subs, next));
  return tree_inner(std::move(kids));
}
}  // namespace detail

inline Tree graft(const Tree& t, const std::vector<Tree>& subs) {
  if (int(subs.size()) != n_leaves(t))
    throw ArityMismatch("graft: expected " + std::to_string(n_leaves(t)) + " subtrees, got " +
                        std::to_string(subs.size()));
  std::size_t next = 0;
  return detail::graft_walk(t, subs, next);
}

inline Tree circ_i_tree(const Tree& t, int i, const Tree& s) {
  const int n = n_leaves(t);
  if (i < 1 || i > n)
    throw ArityMismatch("circ_i_tree: slot " + std::to_string(i) + " out of range 1.." +
                        std::to_string(n));
  std::vector<Tree> subs((std::size_t)n, tree_leaf());
  subs[(std::size_t)i - 1] = s;
  return graft(t, subs);
}

// ---- contraction ----------------------------------------------------------

inline bool is_inner_edge(const Tree& t, const EdgeRef& e) {
  if (e.upper.empty()) return false;  // root edge
  const Tree* cur = &t;
  for (int step : e.upper) {
    if (cur->is_leaf || step < 1 || step > int(cur->kids.size())) return false;
    cur = &cur->kids[(std::size_t)step - 1];
  }
  return !cur->is_leaf;
}

// contract one inner edge; also fills a map from old inner-vertex addresses to
// new ones (the two merged vertices both map to the merged vertex)
inline Tree contract_with_map(const Tree& t, const EdgeRef& e,
                              std::map<VertexAddr, VertexAddr>* addr_map) {
  if (!is_inner_edge(t, e)) throw NotInnerEdge("contract: edge is not inner");
  VertexAddr lower(e.upper.begin(), e.upper.end() - 1);
  const int k = e.upper.back();
  const Tree& w = node_at(t, e.upper);
  const int val_w = int(w.kids.size());
  // rebuild the tree
  std::function<Tree(const Tree&, std::size_t)> go = [&](const Tree& cur, std::size_t depth) {
    if (depth == lower.size()) {
      std::vector<Tree> kids;
      for (int c = 1; c <= int(cur.kids.size()); ++c) {
        if (c == k)
          for (const auto& wk : cur.kids[(std::size_t)c - 1].kids) kids.push_back(wk);
        else
          kids.push_back(cur.kids[(std::size_t)c - 1]);
      }
      return tree_inner(std::move(kids));
    }
    std::vector<Tree> kids = cur.kids;
    const int step = lower[depth];
    kids[(std::size_t)step - 1] = go(cur.kids[(std::size_t)step - 1], depth + 1);
    return tree_inner(std::move(kids));
  };
  Tree out = go(t, 0);
  if (addr_map) {
    addr_map->clear();
    for (const auto& iv : inner_vertices(t)) {
      const VertexAddr& a = iv.addr;
      VertexAddr na;
      bool below = a.size() >= e.upper.size() &&
                   std::equal(e.upper.begin(), e.upper.end(), a.begin());
      if (below) {
        if (a.size() == e.upper.size()) {
          na = lower;  // the upper vertex merges into the lower one
        } else {
          // lower ++ [k-1 + j] ++ rest for a = upper ++ [j] ++ rest
          na = lower;
          na.push_back(k - 1 + a[e.upper.size()]);
          na.insert(na.end(), a.begin() + long(e.upper.size()) + 1, a.end());
        }
      } else if (a.size() >= lower.size() + 1 &&
                 std::equal(lower.begin(), lower.end(), a.begin()) &&
                 a[lower.size()] > k) {
        na = a;
        na[lower.size()] += val_w - 1;  // siblings right of the contracted slot shift
      } else {
        na = a;
      }
      (*addr_map)[a] = na;
    }
  }
  return out;
}

inline Tree contract(const Tree& t, const EdgeRef& e) { return contract_with_map(t, e, nullptr); }

inline Tree contract_set_with_map(const Tree& t, const std::set<EdgeRef>& edges,
                                  std::map<VertexAddr, VertexAddr>* addr_map) {
  for (const auto& e : edges)
    if (!is_inner_edge(t, e)) throw NotInnerEdge("contract_set: edge is not inner");
  // contract deepest-first; the address map keeps the remaining edges current
  std::vector<EdgeRef> order(edges.begin(), edges.end());
  std::sort(order.begin(), order.end(), [](const EdgeRef& a, const EdgeRef& b) {
    if (a.upper.size() != b.upper.size()) return a.upper.size() > b.upper.size();
    return a.upper < b.upper;
  });
  Tree cur = t;
  std::map<VertexAddr, VertexAddr> total;
  for (const auto& iv : inner_vertices(t)) total[iv.addr] = iv.addr;
  for (const auto& e : order) {
    std::map<VertexAddr, VertexAddr> step;
    cur = contract_with_map(cur, EdgeRef{total.at(e.upper)}, &step);
    for (auto& [orig, now] : total) now = step.at(now);
  }
  if (addr_map) *addr_map = std::move(total);
  return cur;
}

inline Tree contract_set(const Tree& t, const std::set<EdgeRef>& edges) {
  return contract_set_with_map(t, edges, nullptr);
}

struct TreeMorphism {
  Tree domain;
  std::set<EdgeRef> contracted;
  Tree codomain() const { return contract_set(domain, contracted); }
};

// ---- stars ----------------------------------------------------------------

namespace detail {
inline void require_inner_off_root(const Tree& t, const VertexAddr& v, const char* who) {
  if (v.empty()) throw RootInStar(std::string(who) + ": star of the top vertex touches the root edge");
  if (node_at(t, v).is_leaf) throw DomainMismatch(std::string(who) + ": address is a leaf");
}
}  // namespace detail

// the star of v as a fragment: the corolla spanned by v and its edges
inline Tree star(const Tree& t, const VertexAddr& v) {
  detail::require_inner_off_root(t, v, "star");
  return corolla(int(node_at(t, v).kids.size()));
}

// addresses of the vertices adjacent to v (parent first, then children);
// requires all of them to be inner vertices
inline std::vector<VertexAddr> link(const Tree& t, const VertexAddr& v) {
  detail::require_inner_off_root(t, v, "link");
  std::vector<VertexAddr> out;
  out.push_back(VertexAddr(v.begin(), v.end() - 1));
  const Tree& node = node_at(t, v);
  for (int c = 1; c <= int(node.kids.size()); ++c) {
    if (node.kids[(std::size_t)c - 1].is_leaf)
      throw NotInnerEdge("link: a child edge of the vertex is a leaf edge");
    VertexAddr ca = v;
    ca.push_back(c);
    out.push_back(ca);
  }
  return out;
}

// The extended star of v: the fragment spanned by the stars of the vertices
// adjacent to v, as a planted tree. With parent arity b, v in slot k of the
// parent, v of arity a and child arities c_1..c_a this is
// C_b composed at slot k with C_a(C_{c_1},...,C_{c_a}).
inline Tree extended_star(const Tree& t, const VertexAddr& v) {
  std::vector<VertexAddr> lk = link(t, v);  // validates
  const Tree& node = node_at(t, v);
  const Tree& parent = node_at(t, VertexAddr(v.begin(), v.end() - 1));
  std::vector<Tree> v_kids;
  for (const auto& k : node.kids) v_kids.push_back(corolla(int(k.kids.size())));
  Tree middle = tree_inner(std::move(v_kids));
  return circ_i_tree(corolla(int(parent.kids.size())), v.back(), middle);
}

// (sum of valences over the link of v) - 1 = leaf count of the extended star
inline int r_of(const Tree& t, const VertexAddr& v) {
  std::vector<VertexAddr> lk = link(t, v);
  int sum = 0;
  for (const auto& w : lk) sum += int(node_at(t, w).kids.size());
  return sum - 1;
}

// ---- corolla decomposition ------------------------------------------------

struct GraftExpr {
  enum Kind { UnitU, Corolla, Graft } kind = UnitU;
  int arity = 0;                 // for Corolla
  std::vector<GraftExpr> parts;  // for Graft: parts[0] = base, rest = subtrees
};

inline Tree eval_graft_expr(const GraftExpr& e) {
  switch (e.kind) {
    case GraftExpr::UnitU:
      return tree_leaf();
    case GraftExpr::Corolla:
      return corolla(e.arity);
    case GraftExpr::Graft: {
      Tree base = eval_graft_expr(e.parts[0]);
      std::vector<Tree> subs;
      for (std::size_t i = 1; i < e.parts.size(); ++i) subs.push_back(eval_graft_expr(e.parts[i]));
      return graft(base, subs);
    }
  }
  throw Error("eval_graft_expr: unreachable");
}

inline GraftExpr decompose_into_corollas(const Tree& t) {
  if (t.is_leaf) return GraftExpr{GraftExpr::UnitU, 0, {}};
  GraftExpr e;
  e.kind = GraftExpr::Graft;
  GraftExpr base;
  base.kind = GraftExpr::Corolla;
  base.arity = int(t.kids.size());
  e.parts.push_back(base);
  for (const auto& k : t.kids) e.parts.push_back(decompose_into_corollas(k));
  return e;
}

inline std::string graft_expr_str(const GraftExpr& e) {
  switch (e.kind) {
    case GraftExpr::UnitU:
      return "U";
    case GraftExpr::Corolla:
      return "C" + std::to_string(e.arity);
    case GraftExpr::Graft: {
      bool all_unit = true;
      for (std::size_t i = 1; i < e.parts.size(); ++i)
        if (e.parts[i].kind != GraftExpr::UnitU) all_unit = false;
      if (all_unit) return graft_expr_str(e.parts[0]);
      std::string s = graft_expr_str(e.parts[0]) + "(";
      for (std::size_t i = 1; i < e.parts.size(); ++i) {
        if (i > 1) s += ",";
        s += graft_expr_str(e.parts[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

// ---- enumeration ----------------------------------------------------------

namespace detail {
// all trees with `leaves` leaves, inner arities in supp, at most `w` inner
// vertices; memoized on (leaves, w) for the duration of one enumeration
inline const std::vector<Tree>& enum_rec(int leaves, const std::set<int>& supp, int w,
                                         std::map<std::pair<int, int>, std::vector<Tree>>& memo) {
  if (w < 0) w = -1;
  auto key = std::make_pair(leaves, std::max(w, -1));
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::vector<Tree> out;
  if (w >= 0 && leaves == 1) out.push_back(tree_leaf());
  if (w >= 1) {
    for (int k : supp) {
      // compositions: choose children left to right
      std::vector<Tree> current;
      std::function<void(int, int, int)> pick = [&](int idx, int leaves_left, int w_left) {
        if (idx == k) {
          if (leaves_left == 0) out.push_back(tree_inner(current));
          return;
        }
        for (int nl = 0; nl <= leaves_left; ++nl) {
          // std::map node references stay valid while the memo grows
          const std::vector<Tree>& options = enum_rec(nl, supp, w_left, memo);
          for (const Tree& c : options) {
            const int wi = n_inner(c);
            current.push_back(c);
            pick(idx + 1, leaves_left - nl, w_left - wi);
            current.pop_back();
          }
        }
      };
      if (k == 0) {
        if (leaves == 0) out.push_back(corolla(0));
      } else {
        pick(0, leaves, w - 1);
      }
    }
  }
  return memo.emplace(key, std::move(out)).first->second;
}
}  // namespace detail

inline std::vector<Tree> enumerate_trees(int leaves, const std::set<int>& arity_support,
                                         std::optional<int> max_inner = std::nullopt) {
  int w;
  if (max_inner) {
    if (*max_inner < 0) throw DomainMismatch("enumerate_trees: max_inner must be >= 0");
    w = *max_inner;
  } else {
    if (arity_support.count(0) || arity_support.count(1))
      throw TruncationRequired(
          "enumerate_trees: arity 0 or 1 in the support allows unboundedly many inner "
          "vertices; pass max_inner");
    w = std::max(0, leaves - 1);  // arities >= 2: at most leaves-1 inner vertices
  }
  std::map<std::pair<int, int>, std::vector<Tree>> memo;
  std::vector<Tree> out = detail::enum_rec(leaves, arity_support, w, memo);
  std::sort(out.begin(), out.end(), [](const Tree& a, const Tree& b) {
    const int ia = n_inner(a), ib = n_inner(b);
    if (ia != ib) return ia < ib;
    return encode(a) < encode(b);
  });
  return out;
}

// tree with parity bookkeeping: leaves in even levels, annotated inner vertices
struct EvenTree {
  Tree tree;
  std::vector<InnerVertex> evens;  // inner vertices at even levels, path order
  std::vector<InnerVertex> odds;   // inner vertices at odd levels, path order
};

namespace detail {
// fragments topped by an odd-level vertex: `leaves` leaves (all at even
// depths), `evens` inner even-level vertices below
inline std::vector<Tree> gen_odd(int leaves, int evens, const std::set<int>& even_supp,
                                 const std::set<int>& odd_supp);

// fragments topped by an even-level inner vertex (counts itself in `evens`)
inline std::vector<Tree> gen_even(int leaves, int evens, const std::set<int>& even_supp,
                                  const std::set<int>& odd_supp) {
  std::vector<Tree> out;
  if (evens < 1) return out;
  for (int b : even_supp) {
    std::vector<Tree> current;
    std::function<void(int, int, int)> pick = [&](int idx, int nl, int ne) {
      if (idx == b) {
        if (nl == 0 && ne == 0) out.push_back(tree_inner(current));
        return;
      }
      for (int cl = 0; cl <= nl; ++cl)
        for (int ce = 0; ce <= ne; ++ce)
          for (const Tree& c : gen_odd(cl, ce, even_supp, odd_supp)) {
            current.push_back(c);
            pick(idx + 1, nl - cl, ne - ce);
            current.pop_back();
          }
    };
    if (b == 0) {
      if (leaves == 0 && evens == 1) out.push_back(corolla(0));
    } else {
      pick(0, leaves, evens - 1);
    }
  }
  return out;
}

inline std::vector<Tree> gen_odd(int leaves, int evens, const std::set<int>& even_supp,
                                 const std::set<int>& odd_supp) {
  std::vector<Tree> out;
  for (int a : odd_supp) {
    std::vector<Tree> current;
    std::function<void(int, int, int)> pick = [&](int idx, int nl, int ne) {
      if (idx == a) {
        if (nl == 0 && ne == 0) out.push_back(tree_inner(current));
        return;
      }
      // a leaf child (sits at an even level)
      if (nl >= 1) {
        current.push_back(tree_leaf());
        pick(idx + 1, nl - 1, ne);
        current.pop_back();
      }
      // an even-vertex child
      for (int cl = 0; cl <= nl; ++cl)
        for (int ce = 1; ce <= ne; ++ce)
          for (const Tree& c : gen_even(cl, ce, even_supp, odd_supp)) {
            current.push_back(c);
            pick(idx + 1, nl - cl, ne - ce);
            current.pop_back();
          }
    };
    if (a == 0) {
      if (leaves == 0 && evens == 0) out.push_back(corolla(0));
    } else {
      pick(0, leaves, evens);
    }
  }
  return out;
}
}  // namespace detail

inline EvenTree annotate_parities(const Tree& t) {
  EvenTree out;
  out.tree = t;
  for (const auto& iv : inner_vertices(t)) {
    if (iv.level % 2 == 0)
      out.evens.push_back(iv);
    else
      out.odds.push_back(iv);
  }
  return out;
}

inline std::vector<EvenTree> enumerate_even_level_trees(int n, int t,
                                                        const std::set<int>& even_support,
                                                        const std::set<int>& odd_support) {
  if (t < 1) throw DomainMismatch("enumerate_even_level_trees: t must be >= 1");
  std::vector<Tree> raw = detail::gen_odd(n, t, even_support, odd_support);
  std::sort(raw.begin(), raw.end(),
            [](const Tree& a, const Tree& b) { return encode(a) < encode(b); });
  std::vector<EvenTree> out;
  for (const auto& tr : raw) out.push_back(annotate_parities(tr));
  return out;
}

// ---- rendering ------------------------------------------------------------

// plain ASCII rendering; inner vertices print their arity, leaves print "*"
inline std::string render_tree(const Tree& t) {
  std::string out;
  std::function<void(const Tree&, const std::string&, bool, bool)> go =
      [&](const Tree& node, const std::string& prefix, bool last, bool top) {
        out += prefix;
        if (!top) out += last ? "`-" : "|-";
        if (node.is_leaf) {
          out += "*\n";
          return;
        }
        out += "o" + std::to_string(node.kids.size()) + "\n";
        for (std::size_t i = 0; i < node.kids.size(); ++i) {
          std::string next = prefix + (top ? "" : (last ? "  " : "| "));
          go(node.kids[i], next, i + 1 == node.kids.size(), false);
        }
      };
  go(t, "", true, true);
  return out;
}

}  // namespace opd
