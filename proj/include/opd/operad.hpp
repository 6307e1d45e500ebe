// Non-symmetric operads presented by partial compositions: a sequence of
// components O(n), a unit 1 -> O(1), and maps
//   circ(m,i,n) : O(m) (x) O(n) -> O(m+n-1),  1 <= i <= m,
// subject to two exchange relations and two unit relations. Also here: the
// simultaneous composition mu built from circ, evaluation of tree shapes and
// edge contractions, the tree-indexed free operad with its unit/counit, and
// the associative operad.
#pragma once

#include <opd/errors.hpp>
#include <opd/exactcat.hpp>
#include <opd/finset.hpp>
#include <opd/trees.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace opd {

struct Sequence {
  std::map<int, Space> comp;  // absent arity = zero object
  Space at(int n) const {
    auto it = comp.find(n);
    return it != comp.end() ? it->second : initial_space();
  }
  std::set<int> support() const {
    std::set<int> s;
    for (const auto& [n, sp] : comp)
      if (sp.dim > 0) s.insert(n);
    return s;
  }
};

using Key3 = std::tuple<int, int, int>;  // (m, i, n)

struct Operad {
  Sequence seq;
  LinMap unit;  // unit_space() -> seq(1)
  std::map<Key3, LinMap> circ;
  int max_arity = 0;

  Space at(int n) const { return seq.at(n); }

  // Total within max_arity: absent entries are zero maps. Out-of-range target
  // arity is an arity overflow.
  LinMap circ_at(int m, int i, int n) const {
    if (m < 0 || n < 0 || i < 1 || i > m)
      throw ArityMismatch("circ: slot " + std::to_string(i) + " invalid for arity " +
                          std::to_string(m));
    if (m > max_arity || n > max_arity || m + n - 1 > max_arity)
      throw ArityMismatch("circ: arity overflow at (" + std::to_string(m) + "," +
                          std::to_string(i) + "," + std::to_string(n) + "), max_arity " +
                          std::to_string(max_arity));
    auto it = circ.find({m, i, n});
    if (it != circ.end()) return it->second;
    return zero_map(tensor_obj(at(m), at(n)), at(m + n - 1));
  }
};

struct OperadMap {
  Operad source, target;
  std::map<int, LinMap> comp;
  LinMap at(int n) const {
    auto it = comp.find(n);
    if (it != comp.end()) return it->second;
    return zero_map(source.at(n), target.at(n));
  }
};

// ---- axiom checking -------------------------------------------------------

struct CheckReport {
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

// The relation checker is generic over a context so the same loops serve the
// vector-space and finite-set variants. The context supplies composition
// data and the ambient category operations.
template <class Ctx>
std::vector<std::string> check_operad_relations(const Ctx& c, int max_arity) {
  std::vector<std::string> bad;
  auto note = [&](const std::string& rel, int a, int b, int cc, int i, int j) {
    bad.push_back(rel + " fails at arities (" + std::to_string(a) + "," + std::to_string(b) +
                  "," + std::to_string(cc) + "), slots i=" + std::to_string(i) +
                  (j >= 0 ? ",j=" + std::to_string(j) : ""));
  };
  for (int a = 0; a <= max_arity; ++a)
    for (int b = 0; b <= max_arity; ++b) {
      if (a + b - 1 > max_arity || a + b - 1 < 0) continue;
      for (int cc = 0; cc <= max_arity; ++cc) {
        if (a + b + cc - 2 > max_arity || a + b + cc - 2 < 0) continue;
        // relation: inserting into two distinct slots of the same operation
        if (a + cc - 1 <= max_arity && a + cc - 1 >= 0)
          for (int i = 1; i <= a; ++i)
            for (int j = 1; j < i; ++j) {
              auto lhs = c.comp(c.circ(a + b - 1, j, cc), c.tens(c.circ(a, i, b), c.ident(cc)));
              auto rhs = c.comp(
                  c.circ(a + cc - 1, i + cc - 1, b),
                  c.comp(c.tens(c.circ(a, j, cc), c.ident(b)), c.tens(c.ident(a), c.sym(b, cc))));
              if (!c.eq(lhs, rhs)) note("disjoint-slot exchange", a, b, cc, i, j);
            }
        // relation: inserting into a slot of the inserted operation
        if (b + cc - 1 <= max_arity && b + cc - 1 >= 0)
          for (int i = 1; i <= a; ++i)
            for (int j = i; j < b + i; ++j) {
              auto lhs = c.comp(c.circ(a + b - 1, j, cc), c.tens(c.circ(a, i, b), c.ident(cc)));
              auto rhs =
                  c.comp(c.circ(a, i, b + cc - 1), c.tens(c.ident(a), c.circ(b, j - i + 1, cc)));
              if (!c.eq(lhs, rhs)) note("nested-slot exchange", a, b, cc, i, j);
            }
      }
    }
  for (int n = 0; n <= max_arity; ++n) {
    // left unit: compose the unit with any operation
    auto lhs = c.comp(c.circ(1, 1, n), c.tens(c.unit_map(), c.ident(n)));
    if (!c.eq(lhs, c.lunitor(n))) note("left unit", 1, n, -1, 1, -1);
    // right unit: insert the unit into any slot
    for (int i = 1; i <= n; ++i) {
      auto rhs = c.comp(c.circ(n, i, 1), c.tens(c.ident(n), c.unit_map()));
      if (!c.eq(rhs, c.runitor(n))) note("right unit", n, 1, -1, i, -1);
    }
  }
  return bad;
}

namespace detail {
struct VecOperadCtx {
  const Operad& o;
  LinMap circ(int m, int i, int n) const { return o.circ_at(m, i, n); }
  LinMap ident(int n) const { return identity(o.at(n)); }
  LinMap unit_map() const { return o.unit; }
  LinMap tens(const LinMap& f, const LinMap& g) const { return tensor_map(f, g); }
  LinMap comp(const LinMap& g, const LinMap& f) const { return compose(g, f); }
  LinMap sym(int m, int n) const { return symmetry(o.at(m), o.at(n)); }
  LinMap lunitor(int n) const {
    return lin(tensor_obj(unit_space(), o.at(n)), o.at(n), Mat::Identity(o.at(n).dim, o.at(n).dim));
  }
  LinMap runitor(int n) const {
    return lin(tensor_obj(o.at(n), unit_space()), o.at(n), Mat::Identity(o.at(n).dim, o.at(n).dim));
  }
  bool eq(const LinMap& f, const LinMap& g) const { return f.entries == g.entries; }
};

// Sparse twin of VecOperadCtx. Composition matrices of interesting operads
// (endomorphism operads above all) are overwhelmingly zero, and the relation
// checks tensor them with large identities; in sparse form those products
// stay proportional to the nonzero count instead of the full shape.
struct SparseOperadCtx {
  using M = SparseMat<Rat>;
  const Operad& o;
  mutable std::map<Key3, M> cache;
  M circ(int m, int i, int n) const {
    auto it = cache.find({m, i, n});
    if (it == cache.end())
      it = cache.emplace(Key3{m, i, n}, M::from_dense(o.circ_at(m, i, n).entries)).first;
    return it->second;
  }
  M ident(int n) const { return M::ident(o.at(n).dim); }
  M unit_map() const { return M::from_dense(o.unit.entries); }
  M tens(const M& f, const M& g) const { return sp_kron(f, g); }
  M comp(const M& g, const M& f) const { return sp_matmul(g, f); }
  M sym(int m, int n) const {
    const Index dm = o.at(m).dim, dn = o.at(n).dim;
    M s = M::zero(dm * dn, dm * dn);
    for (Index i = 0; i < dm; ++i)
      for (Index j = 0; j < dn; ++j) s.col[(std::size_t)(i * dn + j)][j * dm + i] = 1;
    return s;
  }
  M lunitor(int n) const { return M::ident(o.at(n).dim); }
  M runitor(int n) const { return M::ident(o.at(n).dim); }
  bool eq(const M& f, const M& g) const { return sp_eq(f, g); }
};
}  // namespace detail

inline CheckReport check_operad(const Operad& o, int max_arity) {
  if (max_arity > o.max_arity)
    throw ArityMismatch("check_operad: requested bound exceeds the operad's max_arity");
  if (o.unit.source.dim != 1 || o.unit.target.dim != o.at(1).dim)
    return CheckReport{{"unit has the wrong shape"}};
  return CheckReport{check_operad_relations(detail::SparseOperadCtx{o}, max_arity)};
}

// ---- simultaneous composition --------------------------------------------

// mu_{n; p_1..p_n} : O(n) (x) O(p_1) (x) ... (x) O(p_n) -> O(p_1+...+p_n),
// built by inserting the rightmost argument first.
inline LinMap mu_from_circ(const Operad& o, int n, const std::vector<int>& ps) {
  if (int(ps.size()) != n) throw ArityMismatch("mu_from_circ: need one inner arity per slot");
  std::vector<Space> factors{o.at(n)};
  for (int p : ps) factors.push_back(o.at(p));
  Space src = detail::tensor_all(factors, 0, int(factors.size()));
  Mat acc = Mat::Identity(src.dim, src.dim);
  int cur = n;  // arity of the partially composed head factor
  for (int i = n; i >= 1; --i) {
    // factors now: [O(cur), O(p_1), ..., O(p_i)]
    std::vector<Space> fs{o.at(cur)};
    for (int t = 1; t <= i; ++t) fs.push_back(o.at(ps[(std::size_t)t - 1]));
    // bring O(p_i) next to the head
    std::vector<int> dst((std::size_t)i + 1);
    dst[0] = 0;
    dst[(std::size_t)i] = 1;
    for (int t = 1; t < i; ++t) dst[(std::size_t)t] = t + 1;
    LinMap perm = factor_perm(fs, dst);
    const int p = ps[(std::size_t)i - 1];
    if (cur + p - 1 > o.max_arity)
      throw ArityMismatch("mu_from_circ: arity overflow at intermediate arity " +
                          std::to_string(cur + p - 1));
    LinMap step = o.circ_at(cur, i, p);
    Space rest = detail::tensor_all(fs, 1, i);  // O(p_1)..O(p_{i-1})
    acc = matmul(matmul(kron(step.entries, Mat(Mat::Identity(rest.dim, rest.dim))), perm.entries),
                 acc);
    cur = cur + p - 1;
  }
  return {src, o.at(cur), acc};
}

// Recover the partial compositions from a simultaneous-composition family by
// inserting units in all slots but one.
inline std::map<Key3, LinMap> circ_from_mu(
    const Sequence& seq, const LinMap& unit,
    const std::function<LinMap(int, const std::vector<int>&)>& mu, int max_arity) {
  std::map<Key3, LinMap> out;
  for (int m = 1; m <= max_arity; ++m)
    for (int n = 0; n <= max_arity; ++n) {
      if (m + n - 1 > max_arity) continue;
      for (int i = 1; i <= m; ++i) {
        std::vector<int> ps((std::size_t)m, 1);
        ps[(std::size_t)i - 1] = n;
        std::vector<Mat> chain{Mat::Identity(seq.at(m).dim, seq.at(m).dim)};
        for (int t = 1; t <= m; ++t) {
          if (t == i)
            chain.push_back(Mat::Identity(seq.at(n).dim, seq.at(n).dim));
          else
            chain.push_back(unit.entries);
        }
        Mat insert = kron_chain(chain);
        LinMap muv = mu(m, ps);
        out.emplace(Key3{m, i, n}, LinMap{tensor_obj(seq.at(m), seq.at(n)), muv.target,
                                          matmul(muv.entries, insert)});
      }
    }
  return out;
}

// ---- evaluation on trees --------------------------------------------------

// decoration factors of a tree shape: one component per inner vertex, path order
inline std::vector<Space> tree_factors(const Sequence& seq, const Tree& t) {
  std::vector<Space> fs;
  for (const auto& iv : inner_vertices(t)) fs.push_back(seq.at(iv.arity));
  return fs;
}

inline Space eval_tree(const Operad& o, const Tree& t) {
  Space acc = unit_space();
  for (const auto& f : tree_factors(o.seq, t)) acc = tensor_obj(acc, f);
  return acc;
}

// The contraction of one inner edge as a linear map between tree evaluations:
// permute the two merged decorations to the front, compose them with circ at
// the child slot, and permute the result back to the merged vertex's rank.
inline LinMap eval_contraction(const Operad& o, const Tree& t, const EdgeRef& e) {
  if (!is_inner_edge(t, e)) throw NotInnerEdge("eval_contraction: edge is not inner");
  const std::vector<InnerVertex> verts = inner_vertices(t);
  const VertexAddr lower(e.upper.begin(), e.upper.end() - 1);
  int p = -1, q = -1;
  for (int idx = 0; idx < int(verts.size()); ++idx) {
    if (verts[(std::size_t)idx].addr == lower) p = idx;
    if (verts[(std::size_t)idx].addr == e.upper) q = idx;
  }
  const int k = e.upper.back();  // child slot of the upper vertex at the lower one
  const int val_v = verts[(std::size_t)p].arity, val_w = verts[(std::size_t)q].arity;
  if (val_v + val_w - 1 > o.max_arity)
    throw ArityMismatch("eval_contraction: merged arity " + std::to_string(val_v + val_w - 1) +
                        " exceeds max_arity");
  std::vector<Space> fs = tree_factors(o.seq, t);
  // bring the two merged factors to the front, preserving the rest's order
  std::vector<int> dst(fs.size());
  int at = 2;
  for (int idx = 0; idx < int(fs.size()); ++idx) {
    if (idx == p)
      dst[(std::size_t)idx] = 0;
    else if (idx == q)
      dst[(std::size_t)idx] = 1;
    else
      dst[(std::size_t)idx] = at++;
  }
  LinMap pin = factor_perm(fs, dst);
  Space rest_sp = unit_space();
  for (int idx = 0; idx < int(fs.size()); ++idx)
    if (idx != p && idx != q) rest_sp = tensor_obj(rest_sp, fs[(std::size_t)idx]);
  LinMap step = o.circ_at(val_v, k, val_w);
  Mat mid = kron(step.entries, Mat(Mat::Identity(rest_sp.dim, rest_sp.dim)));
  // re-insert the merged factor at the lower vertex's rank among the survivors
  std::vector<Space> out_now{o.at(val_v + val_w - 1)};
  for (int idx = 0; idx < int(fs.size()); ++idx)
    if (idx != p && idx != q) out_now.push_back(fs[(std::size_t)idx]);
  std::vector<int> dst_out(out_now.size());
  dst_out[0] = p;  // the merged vertex keeps the lower vertex's path-order rank
  int pos = 1;
  for (int idx = 0; idx < int(fs.size()); ++idx) {
    if (idx == p || idx == q) continue;
    dst_out[(std::size_t)pos] = idx < q ? idx : idx - 1;
    ++pos;
  }
  LinMap pout = factor_perm(out_now, dst_out);
  Tree t_out = contract(t, e);
  return {eval_tree(o, t), eval_tree(o, t_out), matmul(matmul(pout.entries, mid), pin.entries)};
}

// Collapse all inner edges: the canonical map eval_tree(o,t) -> O(n_leaves),
// with the unit covering the case t = U. A single-edge step is only legal if
// the merged arity stays within max_arity; with arity-0 or arity-1 vertices
// some orders overflow while others do not, and all legal orders agree, so we
// search for a legal order (memoized per contracted shape) instead of fixing
// one. Only when no order stays within bounds do we report the overflow.
inline LinMap eval_full_contraction(const Operad& o, const Tree& t) {
  if (t.is_leaf) return o.unit;
  std::map<std::string, bool> dead;  // shapes with no legal order
  std::function<std::optional<LinMap>(const Tree&)> attempt =
      [&](const Tree& cur) -> std::optional<LinMap> {
    std::vector<InnerVertex> verts = inner_vertices(cur);
    if (verts.size() <= 1) return identity(eval_tree(o, cur));
    const std::string code = encode(cur);
    auto it = dead.find(code);
    if (it != dead.end()) return std::nullopt;
    for (std::size_t vi = 1; vi < verts.size(); ++vi) {
      const EdgeRef e{verts[vi].addr};
      const VertexAddr lower(e.upper.begin(), e.upper.end() - 1);
      const int merged =
          int(node_at(cur, lower).kids.size()) + int(node_at(cur, e.upper).kids.size()) - 1;
      if (merged > o.max_arity) continue;
      std::optional<LinMap> rest = attempt(contract(cur, e));
      if (rest) return compose(*rest, eval_contraction(o, cur, e));
    }
    dead[code] = true;
    return std::nullopt;
  };
  std::optional<LinMap> r = attempt(t);
  if (!r)
    throw ArityMismatch("eval_full_contraction: every contraction order exceeds max_arity " +
                        std::to_string(o.max_arity));
  return *r;
}

// ---- free operad ----------------------------------------------------------

struct FreeSummand {
  Tree tree;
  int weight = 0;  // number of inner vertices
  Index offset = 0;
  Index dim = 0;
};

struct FreeOperadData {
  Operad op;
  std::map<int, std::vector<FreeSummand>> summands;  // per arity, canonical order
  bool exact = true;                                 // complete vs weight-truncated
  std::optional<int> w_max;
};

inline FreeOperadData free_operad(const Sequence& v, int n_max,
                                  std::optional<int> w_max = std::nullopt) {
  std::set<int> supp = v.support();
  const bool reduced = !supp.count(0) && !supp.count(1);
  if (!reduced && !w_max)
    throw TruncationRequired(
        "free_operad: generators in arity 0 or 1 need a weight bound w_max");
  FreeOperadData out;
  out.w_max = w_max;
  out.exact = reduced && (!w_max || *w_max >= std::max(0, n_max - 1));
  Operad& op = out.op;
  op.max_arity = n_max;
  for (int n = 0; n <= n_max; ++n) {
    Index total = 0;
    std::vector<FreeSummand> ss;
    for (const Tree& t : enumerate_trees(n, supp, w_max)) {
      Index d = 1;
      for (const auto& iv : inner_vertices(t)) d *= v.at(iv.arity).dim;
      if (d == 0) continue;  // zero decorations prune the summand
      ss.push_back({t, n_inner(t), total, d});
      total += d;
    }
    if (total > 0) op.seq.comp[n] = space(total);
    out.summands[n] = std::move(ss);
  }
  // unit: the bare-leaf summand in arity 1
  {
    Mat u = Mat::Zero(op.at(1).dim, 1);
    for (const auto& s : out.summands[1])
      if (s.tree.is_leaf) u(s.offset, 0) = 1;
    op.unit = {unit_space(), op.at(1), u};
  }
  // circ: each summand pair maps onto the grafted summand by a factor shuffle
  for (int m = 1; m <= n_max; ++m)
    for (int n = 0; n <= n_max; ++n) {
      if (m + n - 1 > n_max) continue;
      const Index dim_m = op.at(m).dim, dim_n = op.at(n).dim;
      if (dim_m == 0 || dim_n == 0) continue;
      std::map<std::string, const FreeSummand*> target_by_code;
      for (const auto& s : out.summands[m + n - 1]) target_by_code[encode(s.tree)] = &s;
      for (int i = 1; i <= m; ++i) {
        Mat big = Mat::Zero(op.at(m + n - 1).dim, dim_m * dim_n);
        for (const auto& sm : out.summands[m])
          for (const auto& sn : out.summands[n]) {
            Tree g = circ_i_tree(sm.tree, i, sn.tree);
            auto hit = target_by_code.find(encode(g));
            if (hit == target_by_code.end()) continue;  // weight-truncated away
            const FreeSummand& tg = *hit->second;
            // positions of each source decoration inside the grafted tree
            std::map<VertexAddr, int> rank;
            {
              int r = 0;
              for (const auto& iv : inner_vertices(g)) rank[iv.addr] = r++;
            }
            const VertexAddr leaf_at = leaf_addrs(sm.tree)[(std::size_t)i - 1];
            std::vector<Index> dims;
            std::vector<int> dstpos;
            for (const auto& iv : inner_vertices(sm.tree)) {
              dims.push_back(v.at(iv.arity).dim);
              dstpos.push_back(rank.at(iv.addr));
            }
            for (const auto& iv : inner_vertices(sn.tree)) {
              VertexAddr a = leaf_at;
              a.insert(a.end(), iv.addr.begin(), iv.addr.end());
              dims.push_back(v.at(iv.arity).dim);
              dstpos.push_back(rank.at(a));
            }
            std::vector<Index> table = tensor_perm_index(dims, dstpos);
            for (Index x = 0; x < sm.dim; ++x)
              for (Index y = 0; y < sn.dim; ++y) {
                const Index dst_local = table[(std::size_t)(x * sn.dim + y)];
                big(tg.offset + dst_local, (sm.offset + x) * dim_n + (sn.offset + y)) = 1;
              }
          }
        op.circ.emplace(Key3{m, i, n},
                        LinMap{tensor_obj(op.at(m), op.at(n)), op.at(m + n - 1), big});
      }
    }
  return out;
}

// the generator inclusion V(n) -> F(V)(n) onto the corolla summand
inline std::map<int, LinMap> free_unit(const Sequence& v, const FreeOperadData& f) {
  std::map<int, LinMap> out;
  for (int n : v.support()) {
    if (!f.summands.count(n)) continue;
    Mat m = Mat::Zero(f.op.at(n).dim, v.at(n).dim);
    for (const auto& s : f.summands.at(n))
      if (!s.tree.is_leaf && s.weight == 1)
        m.block(s.offset, 0, s.dim, s.dim) = Mat::Identity(s.dim, s.dim);
    out[n] = {v.at(n), f.op.at(n), m};
  }
  return out;
}

// The free functor on a sequence morphism g (one total map per generator
// arity): each tree summand maps to the same tree summand of the target by the
// tensor of g at every inner vertex, in path order. Summands pruned away on
// the target side receive the zero block.
inline std::map<int, LinMap> free_map(const FreeOperadData& fv, const FreeOperadData& fw,
                                      const std::map<int, LinMap>& g) {
  std::map<int, LinMap> out;
  for (const auto& [n, ss] : fv.summands) {
    Mat m = Mat::Zero(fw.op.at(n).dim, fv.op.at(n).dim);
    std::map<std::string, const FreeSummand*> tgt;
    if (fw.summands.count(n))
      for (const auto& s : fw.summands.at(n)) tgt[encode(s.tree)] = &s;
    for (const auto& s : ss) {
      auto hit = tgt.find(encode(s.tree));
      if (hit == tgt.end()) continue;
      std::vector<Mat> parts;
      for (const auto& iv : inner_vertices(s.tree)) {
        auto git = g.find(iv.arity);
        if (git == g.end())
          throw DomainMismatch("free_map: no component for generator arity " +
                               std::to_string(iv.arity));
        parts.push_back(git->second.entries);
      }
      Mat block = kron_chain(parts);
      if (block.rows() != hit->second->dim || block.cols() != s.dim)
        throw DomainMismatch("free_map: component shapes do not match the summand layout");
      m.block(hit->second->offset, s.offset, block.rows(), block.cols()) = block;
    }
    out[n] = {fv.op.at(n), fw.op.at(n), m};
  }
  return out;
}

// Collapse each tree summand of F(O) through the operad structure of O. In
// weight-truncated mode the source operad handed back with the morphism is the
// truncation-compatible presentation: composites whose graft would exceed the
// weight bound are resolved through O's own composition into the single-vertex
// summand, so the collapse map satisfies the morphism squares identically.
// (The plain free operad instead zeroes those composites to keep its weight
// grading exact; the two share components.)
inline OperadMap free_counit(const Operad& o, int n_max, std::optional<int> w_max = std::nullopt,
                             FreeOperadData* data_out = nullptr) {
  FreeOperadData f = free_operad(o.seq, n_max, w_max);
  // evaluation of each summand's shape in O
  std::map<int, std::vector<LinMap>> evals;
  for (int n = 0; n <= n_max; ++n)
    for (const auto& s : f.summands.at(n)) evals[n].push_back(eval_full_contraction(o, s.tree));
  // resolve overweight composites through O
  for (int m = 1; m <= n_max; ++m)
    for (int n = 0; n <= n_max; ++n) {
      if (m + n - 1 > n_max) continue;
      const Index dim_m = f.op.at(m).dim, dim_n = f.op.at(n).dim;
      if (dim_m == 0 || dim_n == 0) continue;
      const FreeSummand* cor = nullptr;
      for (const auto& s : f.summands.at(m + n - 1))
        if (!s.tree.is_leaf && s.weight == 1) cor = &s;
      std::set<std::string> have;
      for (const auto& s : f.summands.at(m + n - 1)) have.insert(encode(s.tree));
      for (int i = 1; i <= m; ++i) {
        auto it = f.op.circ.find({m, i, n});
        if (it == f.op.circ.end()) continue;
        Mat& big = it->second.entries;
        for (std::size_t a = 0; a < f.summands.at(m).size(); ++a)
          for (std::size_t b = 0; b < f.summands.at(n).size(); ++b) {
            const FreeSummand& sm = f.summands.at(m)[a];
            const FreeSummand& sn = f.summands.at(n)[b];
            if (have.count(encode(circ_i_tree(sm.tree, i, sn.tree)))) continue;
            if (!cor) continue;  // O(m+n-1) pruned: the resolved block is zero
            Mat resolved = matmul(o.circ_at(m, i, n).entries,
                                  kron(evals.at(m)[a].entries, evals.at(n)[b].entries));
            for (Index x = 0; x < sm.dim; ++x)
              for (Index y = 0; y < sn.dim; ++y)
                for (Index r = 0; r < cor->dim; ++r)
                  big(cor->offset + r, (sm.offset + x) * dim_n + (sn.offset + y)) =
                      resolved(r, x * sn.dim + y);
          }
      }
    }
  OperadMap phi;
  phi.source = f.op;
  phi.target = o;
  for (int n = 0; n <= n_max; ++n) {
    Mat m = Mat::Zero(o.at(n).dim, f.op.at(n).dim);
    for (std::size_t idx = 0; idx < f.summands.at(n).size(); ++idx) {
      const FreeSummand& s = f.summands.at(n)[idx];
      m.block(0, s.offset, o.at(n).dim, s.dim) = evals.at(n)[idx].entries;
    }
    phi.comp[n] = {f.op.at(n), o.at(n), m};
  }
  if (data_out) *data_out = f;
  return phi;
}

// ---- the associative operad ----------------------------------------------

inline Operad ass_operad(int max_arity) {
  Operad o;
  o.max_arity = max_arity;
  for (int n = 0; n <= max_arity; ++n) o.seq.comp[n] = space(1);
  o.unit = {unit_space(), space(1), Mat::Identity(1, 1)};
  for (int m = 1; m <= max_arity; ++m)
    for (int n = 0; n <= max_arity; ++n) {
      if (m + n - 1 > max_arity) continue;
      for (int i = 1; i <= m; ++i)
        o.circ.emplace(Key3{m, i, n}, LinMap{space(1), space(1), Mat::Identity(1, 1)});
    }
  return o;
}

struct FinSetOperad {
  std::map<int, FinSetObj> comp;
  FinSetMap unit;
  std::map<Key3, FinSetMap> circ;
  int max_arity = 0;
  FinSetObj at(int n) const {
    auto it = comp.find(n);
    return it != comp.end() ? it->second : finset_initial();
  }
};

inline FinSetOperad ass_operad_finset(int max_arity) {
  FinSetOperad o;
  o.max_arity = max_arity;
  FinSetObj pt{{"e"}};
  for (int n = 0; n <= max_arity; ++n) o.comp[n] = pt;
  o.unit = {finset_unit(), pt, {"e"}};
  for (int m = 1; m <= max_arity; ++m)
    for (int n = 0; n <= max_arity; ++n) {
      if (m + n - 1 > max_arity) continue;
      for (int i = 1; i <= m; ++i)
        o.circ.emplace(Key3{m, i, n}, FinSetMap{finset_product(pt, pt), pt, {"e"}});
    }
  return o;
}

namespace detail {
// Positional view of a map between iterated products of component sets.
// Re-bracketing a product permutes nothing when positions are enumerated with
// the left factor major, so the relation checker works with indices and the
// nested pair names never have to line up.
struct FinSetIdxMap {
  int src = 0, tgt = 0;
  std::vector<int> images;
};

struct FinSetOperadCtx {
  const FinSetOperad& o;
  static FinSetIdxMap from(const FinSetMap& f) {
    FinSetIdxMap m{int(f.source.elements.size()), int(f.target.elements.size()), {}};
    for (const auto& e : f.images) {
      int k = finset_index(f.target, e);
      if (k < 0) throw DomainMismatch("finset operad: image outside the stated target");
      m.images.push_back(k);
    }
    return m;
  }
  FinSetIdxMap circ(int m, int i, int n) const {
    auto it = o.circ.find({m, i, n});
    FinSetObj src = finset_product(o.at(m), o.at(n));
    if (it == o.circ.end()) {
      if (!src.elements.empty())
        throw ArityMismatch("finset operad: missing composition with nonempty source");
      return {0, int(o.at(m + n - 1).elements.size()), {}};
    }
    if (!same_finset(it->second.source, src) ||
        !same_finset(it->second.target, o.at(m + n - 1)))
      throw DomainMismatch("finset operad: composition map has the wrong shape");
    return from(it->second);
  }
  FinSetIdxMap ident(int n) const {
    const int d = int(o.at(n).elements.size());
    FinSetIdxMap r{d, d, {}};
    for (int k = 0; k < d; ++k) r.images.push_back(k);
    return r;
  }
  FinSetIdxMap unit_map() const {
    if (o.unit.source.elements.size() != 1 || !same_finset(o.unit.target, o.at(1)))
      throw DomainMismatch("finset operad: unit must pick one element of the arity-1 set");
    return from(o.unit);
  }
  FinSetIdxMap tens(const FinSetIdxMap& f, const FinSetIdxMap& g) const {
    FinSetIdxMap r{f.src * g.src, f.tgt * g.tgt, {}};
    for (int i = 0; i < f.src; ++i)
      for (int j = 0; j < g.src; ++j) r.images.push_back(f.images[i] * g.tgt + g.images[j]);
    return r;
  }
  FinSetIdxMap comp(const FinSetIdxMap& g, const FinSetIdxMap& f) const {
    if (f.tgt != g.src) throw DomainMismatch("finset operad: composite shapes disagree");
    FinSetIdxMap r{f.src, g.tgt, {}};
    for (int x : f.images) r.images.push_back(g.images[x]);
    return r;
  }
  FinSetIdxMap sym(int m, int n) const {
    const int a = int(o.at(m).elements.size()), b = int(o.at(n).elements.size());
    FinSetIdxMap r{a * b, b * a, {}};
    for (int x = 0; x < a; ++x)
      for (int y = 0; y < b; ++y) r.images.push_back(y * a + x);
    return r;
  }
  FinSetIdxMap lunitor(int n) const { return ident(n); }
  FinSetIdxMap runitor(int n) const { return ident(n); }
  bool eq(const FinSetIdxMap& f, const FinSetIdxMap& g) const {
    return f.src == g.src && f.tgt == g.tgt && f.images == g.images;
  }
};
}  // namespace detail

inline CheckReport check_operad(const FinSetOperad& o, int max_arity) {
  if (max_arity > o.max_arity)
    throw ArityMismatch("check_operad: requested bound exceeds the operad's max_arity");
  return CheckReport{check_operad_relations(detail::FinSetOperadCtx{o}, max_arity)};
}

// ---- operad morphisms -----------------------------------------------------

inline CheckReport check_operad_map(const OperadMap& f, int max_arity) {
  CheckReport rep;
  const int bound = std::min({max_arity, f.source.max_arity, f.target.max_arity});
  if (!map_eq(compose(f.at(1), f.source.unit), f.target.unit))
    rep.violations.push_back("unit square fails");
  for (int m = 1; m <= bound; ++m)
    for (int n = 0; n <= bound; ++n) {
      if (m + n - 1 > bound) continue;
      for (int i = 1; i <= m; ++i) {
        LinMap lhs = compose(f.at(m + n - 1), f.source.circ_at(m, i, n));
        LinMap rhs = compose(f.target.circ_at(m, i, n), tensor_map(f.at(m), f.at(n)));
        if (lhs.entries != rhs.entries)
          rep.violations.push_back("composition square fails at (" + std::to_string(m) + "," +
                                   std::to_string(i) + "," + std::to_string(n) + ")");
      }
    }
  return rep;
}

}  // namespace opd
