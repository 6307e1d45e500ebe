#pragma once
//
// Push-outs of operads along free cell attachments.  The input is a span
//
//     V  <--f--  U  --gbar-->  O
//
// with f a morphism of arity-graded sequences and gbar a sequence morphism
// into the underlying sequence of an operad O.  The push-out P of
// F(V) <- F(U) -> O over the free operads on U and V is assembled arity by
// arity as a finite chain of cell attachments
//
//     O(n) = P_0(n) --phi_1--> P_1(n) --phi_2--> ... --> P_t(n) --> ...
//
// Stage t attaches one cell per planted planar tree with n leaves, all leaves
// at even levels and exactly t inner vertices at even levels.  The cell of a
// tree is the pushout-product source of the f's sitting at its even vertices,
// tensored with the O-components at its odd vertices; its attaching map is
// glued from the previous stage by contracting the extended star of one even
// vertex at a time.  Partial-composition maps between stages come out of a
// graded induction, and once the stage chain stabilises the colimit carries
// an operad structure together with the canonical maps out of O and V.
//
// When the cell arities all sit in degrees >= 2 and O has trivial arity-0
// part, the chain at arity n provably stops moving after stage n-1 and the
// colimit is computed exactly; otherwise a stage bound must be supplied and
// the result is reported up to that bound.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "opd/exactcat.hpp"
#include "opd/operad.hpp"
#include "opd/trees.hpp"

namespace opd {

// ---- problem statement ----------------------------------------------------

struct PushoutProblem {
  Sequence u, v;               // the cell sequences U and V
  std::map<int, LinMap> f;     // f(n) : U(n) -> V(n); absent arity = zero map
  std::map<int, LinMap> gbar;  // gbar(n) : U(n) -> O(n)
  Operad o;
};

// one attached cell: a tree shape together with its cell map and glue data
struct PushoutCell {
  EvenTree shape;
  PPSource pp;      // pushout-product source over the even vertices, path order
  Space odds;       // tensor of O(valence w) over the odd vertices, path order
  Space source;     // pp.object (x) odds
  Space target;     // [(x)_v V(valence v)] (x) odds
  LinMap cell;      // pp.odot (x) id : source -> target
  LinMap psi;       // attaching map, source -> P_{t-1}(n)
  LinMap psi_bar;   // glued map, target -> P_t(n)
};

struct PushoutStage {
  Space obj;                                    // P_t(n)
  LinMap phi;                                   // P_{t-1}(n) -> P_t(n)
  std::vector<PushoutCell> cells;
  std::map<std::string, std::size_t> by_shape;  // encode(tree) -> cell index
};

struct PushoutResult {
  PushoutProblem prob;
  int n_max = 0;
  bool exact = false;        // no stage bound needed: reduced cells, O(0) = 0
  std::optional<int> t_max;  // stage bound in truncated mode
  // stages[n][t] with t = 0 the base stage O(n)
  std::map<int, std::vector<PushoutStage>> stages;
  // composition maps between stages, keyed {m, i, n, s, t}:
  // P_s(m) (x) P_t(n) -> P_{s+t}(m+n-1)
  std::map<std::array<int, 5>, LinMap> comps;
  std::map<int, int> stabilized_at;  // last stage that attached a cell
  bool certified = false;    // stabilisation holds beyond the built stages
  bool operad_total = true;  // all composition maps of p were definable
  Operad p;
  OperadMap f_prime;                  // O -> P
  std::map<int, LinMap> gbar_prime;   // V(n) -> P(n)
};

// a candidate cocone under the push-out span
struct PushoutCocone {
  OperadMap f2;                   // O -> P'
  std::map<int, LinMap> gbar2;    // V(n) -> P'(n)
};

// ---- helpers --------------------------------------------------------------

inline LinMap stage_chain(const std::vector<PushoutStage>& st, int from, int to) {
  LinMap acc = identity(st[(std::size_t)from].obj);
  for (int t = from + 1; t <= to; ++t) acc = compose(st[(std::size_t)t].phi, acc);
  return acc;
}

namespace detail {

inline LinMap seq_at(const std::map<int, LinMap>& mor, const Sequence& src, const Sequence& tgt,
                     int n) {
  auto it = mor.find(n);
  if (it != mor.end()) return it->second;
  return zero_map(src.at(n), tgt.at(n));
}

inline void check_seq_morphism(const std::map<int, LinMap>& mor, const Sequence& src,
                               const Sequence& tgt, const char* who) {
  for (const auto& [n, m] : mor)
    if (m.entries.rows() != tgt.at(n).dim || m.entries.cols() != src.at(n).dim)
      throw DomainMismatch(std::string(who) + ": component at arity " + std::to_string(n) +
                           " does not match the stated sequences");
}

inline int list_rank(const std::vector<InnerVertex>& vs, const VertexAddr& a) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i].addr == a) return int(i);
  throw std::logic_error("internal: vertex address missing from its parity list");
}

inline Space product_space(const std::vector<Space>& fs) {
  Space acc = unit_space();
  for (const auto& s : fs) acc = tensor_obj(acc, s);
  return acc;
}

inline std::vector<Space> odd_factor_spaces(const Operad& o, const EvenTree& et) {
  std::vector<Space> out;
  for (const auto& w : et.odds) out.push_back(o.at(w.arity));
  return out;
}

// permutation from cell order (even vertices then odd vertices, each block in
// path order) to the interleaved path order of all inner vertices
inline LinMap to_path_order(const EvenTree& et, const std::vector<Space>& srcs) {
  std::map<VertexAddr, int> ranks;
  int i = 0;
  for (const auto& iv : inner_vertices(et.tree)) ranks[iv.addr] = i++;
  std::vector<int> dst;
  for (const auto& x : et.evens) dst.push_back(ranks.at(x.addr));
  for (const auto& w : et.odds) dst.push_back(ranks.at(w.addr));
  return factor_perm(srcs, dst);
}

// Attaching-map leg of the cell of `et` for its j-th even vertex: the corner
// with U in that slot is pushed into O along gbar; for a single even vertex
// the whole tree is then contracted in O, otherwise the extended star of the
// vertex is contracted and the result feeds the glued map, one stage down, of
// the tree with that star collapsed.
inline LinMap psi_leg(const PushoutProblem& pb, const std::vector<PushoutStage>& st, int t,
                      const EvenTree& et, std::size_t j) {
  const Operad& o = pb.o;
  const InnerVertex& uv = et.evens[j];
  const Space& prev = st[(std::size_t)t - 1].obj;

  std::vector<Space> corner;
  for (std::size_t i = 0; i < et.evens.size(); ++i)
    corner.push_back(i == j ? pb.u.at(et.evens[i].arity) : pb.v.at(et.evens[i].arity));
  std::vector<Space> odd_sp = odd_factor_spaces(o, et);
  corner.insert(corner.end(), odd_sp.begin(), odd_sp.end());
  Space src = product_space(corner);
  if (src.dim == 0 || prev.dim == 0) return zero_map(src, prev);

  // push the U-factor into O
  LinMap g = seq_at(pb.gbar, pb.u, o.seq, uv.arity);
  Index pre = 1, post = 1;
  for (std::size_t i = 0; i < j; ++i) pre *= corner[i].dim;
  for (std::size_t i = j + 1; i < corner.size(); ++i) post *= corner[i].dim;
  Mat ga = kron(kron(Mat(Mat::Identity(pre, pre)), g.entries),
                Mat(Mat::Identity(post, post)));
  std::vector<Space> cur = corner;
  cur[j] = o.at(uv.arity);
  LinMap push = lin(src, product_space(cur), ga);

  if (t == 1) {
    LinMap perm = to_path_order(et, cur);
    LinMap ev = eval_full_contraction(o, et.tree);
    return compose(ev, compose(perm, push));
  }

  // factors off the star stay put; parent, vertex, children move to the back
  const VertexAddr& ua = uv.addr;
  std::vector<VertexAddr> lk = link(et.tree, ua);  // parent first, then children
  const int r = r_of(et.tree, ua);
  if (o.at(r).dim == 0) return zero_map(src, prev);
  const std::size_t ne = et.evens.size(), no = et.odds.size();
  std::set<VertexAddr> lkset(lk.begin(), lk.end());
  std::vector<int> dst(cur.size(), -1);
  int at = 0;
  Index front = 1;
  for (std::size_t i = 0; i < ne; ++i)
    if (i != j) {
      dst[i] = at++;
      front *= cur[i].dim;
    }
  for (std::size_t q = 0; q < no; ++q)
    if (!lkset.count(et.odds[q].addr)) {
      dst[ne + q] = at++;
      front *= cur[ne + q].dim;
    }
  dst[ne + (std::size_t)list_rank(et.odds, lk[0])] = at++;
  dst[j] = at++;
  for (std::size_t c = 1; c < lk.size(); ++c)
    dst[ne + (std::size_t)list_rank(et.odds, lk[c])] = at++;
  LinMap p1 = factor_perm(cur, dst);

  LinMap star_ev = eval_full_contraction(o, extended_star(et.tree, ua));
  Mat step = kron(Mat(Mat::Identity(front, front)), star_ev.entries);
  Space after = space(front * o.at(r).dim);
  LinMap contract_star = lin(p1.target, after, step);

  // collapse the star and land in the cell order of the contracted tree
  std::set<EdgeRef> edges;
  edges.insert(EdgeRef{ua});
  for (int c = 1; c <= uv.arity; ++c) {
    VertexAddr ca = ua;
    ca.push_back(c);
    edges.insert(EdgeRef{ca});
  }
  std::map<VertexAddr, VertexAddr> cmap;
  Tree ct = contract_set_with_map(et.tree, edges, &cmap);
  EvenTree cet = annotate_parities(ct);
  const int ce = int(cet.evens.size());
  std::vector<Space> mids;
  std::vector<int> dst2;
  for (std::size_t i = 0; i < ne; ++i)
    if (i != j) {
      mids.push_back(cur[i]);
      dst2.push_back(list_rank(cet.evens, cmap.at(et.evens[i].addr)));
    }
  for (std::size_t q = 0; q < no; ++q)
    if (!lkset.count(et.odds[q].addr)) {
      mids.push_back(cur[ne + q]);
      dst2.push_back(ce + list_rank(cet.odds, cmap.at(et.odds[q].addr)));
    }
  mids.push_back(o.at(r));
  dst2.push_back(ce + list_rank(cet.odds, cmap.at(ua)));
  LinMap p2 = factor_perm(mids, dst2);

  const PushoutStage& ps = st[(std::size_t)t - 1];
  auto hit = ps.by_shape.find(encode(ct));
  if (hit == ps.by_shape.end()) return zero_map(src, prev);  // pruned: all zero
  const LinMap& glued = ps.cells[hit->second].psi_bar;
  return compose(glued, compose(p2, compose(contract_star, compose(p1, push))));
}

// glue the per-vertex legs into the attaching map on the whole cell source
inline LinMap glue_psi(const PushoutProblem& pb, const std::vector<PushoutStage>& st, int t,
                       const EvenTree& et, const PPSource& pp, const Space& odd_sp) {
  const Space& prev = st[(std::size_t)t - 1].obj;
  Space src = tensor_obj(pp.object, odd_sp);
  std::vector<LinMap> legs;
  for (std::size_t j = 0; j < et.evens.size(); ++j) legs.push_back(psi_leg(pb, st, t, et, j));
  if (legs.size() == 1) return legs[0];  // one corner, and its kappa is the identity

  // legs must agree on double corners before they can glue
  Mat iodd = Mat::Identity(odd_sp.dim, odd_sp.dim);
  for (std::size_t i = 0; i < legs.size(); ++i)
    for (std::size_t j = i + 1; j < legs.size(); ++j) {
      Mat mi = Mat::Identity(1, 1), mj = Mat::Identity(1, 1);
      for (std::size_t q = 0; q < legs.size(); ++q) {
        const LinMap& fq = pp.maps[q];
        Mat iu = Mat::Identity(fq.source.dim, fq.source.dim);
        Mat iv = Mat::Identity(fq.target.dim, fq.target.dim);
        mi = kron(mi, q == i ? iu : (q == j ? fq.entries : iv));
        mj = kron(mj, q == j ? iu : (q == i ? fq.entries : iv));
      }
      mi = kron(mi, iodd);
      mj = kron(mj, iodd);
      if (matmul(legs[i].entries, mi) != matmul(legs[j].entries, mj))
        throw NonCompatibleCube("attaching map of the tree " + encode(et.tree) +
                                ": legs of the even vertices at positions " + std::to_string(i) +
                                " and " + std::to_string(j) + " disagree on their double corner");
    }

  std::vector<Mat> ks, ls;
  for (std::size_t j = 0; j < legs.size(); ++j) {
    ks.push_back(kron(pp.kappas[j].entries, iodd));
    ls.push_back(legs[j].entries);
  }
  SolveRight<Rat> sol = solve_right(hstack<Rat>(ks), hstack<Rat>(ls));
  if (!sol.consistent)
    throw NonCompatibleCube("attaching map of the tree " + encode(et.tree) +
                            ": compatible legs admit no common extension");
  if (!sol.unique)
    throw NonCompatibleCube("attaching map of the tree " + encode(et.tree) +
                            ": cell corners fail to be jointly epic");
  return lin(src, prev, sol.m);
}

inline PushoutStage build_stage(const PushoutProblem& pb, const std::vector<PushoutStage>& st,
                                int n, int t, const std::set<int>& even_supp,
                                const std::set<int>& odd_supp) {
  const PushoutStage& prev = st.back();
  PushoutStage out;
  for (const EvenTree& et : enumerate_even_level_trees(n, t, even_supp, odd_supp)) {
    std::vector<Space> odd_fs = odd_factor_spaces(pb.o, et);
    Space odd_sp = product_space(odd_fs);
    if (odd_sp.dim == 0) continue;
    // drop cells whose source and target are both zero
    Index vdim = 1;
    for (const auto& x : et.evens) vdim *= pb.v.at(x.arity).dim;
    bool live_corner = false;
    for (std::size_t j = 0; j < et.evens.size() && !live_corner; ++j) {
      Index c = 1;
      for (std::size_t i = 0; i < et.evens.size(); ++i)
        c *= (i == j ? pb.u.at(et.evens[i].arity).dim : pb.v.at(et.evens[i].arity).dim);
      live_corner = c > 0;
    }
    if (vdim == 0 && !live_corner) continue;

    std::vector<LinMap> fs;
    for (const auto& x : et.evens) fs.push_back(seq_at(pb.f, pb.u, pb.v, x.arity));
    PushoutCell cell;
    cell.shape = et;
    cell.pp = pp_source(fs);
    cell.odds = odd_sp;
    cell.source = tensor_obj(cell.pp.object, odd_sp);
    cell.target = tensor_obj(space(vdim), odd_sp);
    cell.cell = tensor_map(cell.pp.odot, identity(odd_sp));
    cell.psi = glue_psi(pb, st, t, et, cell.pp, odd_sp);
    out.cells.push_back(std::move(cell));
  }

  if (out.cells.empty()) {
    out.obj = prev.obj;
    out.phi = identity(prev.obj);
    return out;
  }
  std::vector<Mat> cellmats, psimats;
  Index adim = 0, bdim = 0;
  for (const auto& c : out.cells) {
    cellmats.push_back(c.cell.entries);
    psimats.push_back(c.psi.entries);
    adim += c.source.dim;
    bdim += c.target.dim;
  }
  LinMap f_all = lin(space(adim), space(bdim), block_diag<Rat>(cellmats));
  LinMap g_all = lin(space(adim), prev.obj, hstack<Rat>(psimats));
  PushoutData po = pushout(f_all, g_all);
  out.obj = po.apex;
  out.phi = lin(prev.obj, po.apex, po.inj_right.entries);
  Index off = 0;
  for (auto& c : out.cells) {
    c.psi_bar = lin(c.target, po.apex, po.inj_left.entries.middleCols(off, c.target.dim));
    off += c.target.dim;
  }
  for (std::size_t i = 0; i < out.cells.size(); ++i)
    out.by_shape[encode(out.cells[i].shape.tree)] = i;
  return out;
}

// a stage-0 stand-in cell: the corolla with m leaves one level down, whose
// glued map is the identity of O(m)
inline PushoutCell standin_cell(const Operad& o, int m) {
  PushoutCell c;
  c.shape = annotate_parities(corolla(m));
  c.odds = o.at(m);
  c.source = initial_space();
  c.target = o.at(m);
  c.psi_bar = identity(o.at(m));
  return c;
}

// The composite cell leg of a pair of glued maps: graft the second tree into
// leaf i of the first, compose the two odd vertices flanking the new edge in
// O, and feed the glued map of the contracted tree at the combined stage.
inline LinMap d_map(const PushoutProblem& pb, int i, const PushoutCell& cs,
                    const PushoutCell& ct2, const PushoutStage& tstage) {
  const Operad& o = pb.o;
  const Tree& bt = cs.shape.tree;
  const Tree& tp = ct2.shape.tree;
  Space src = tensor_obj(cs.target, ct2.target);
  if (src.dim == 0) return zero_map(src, tstage.obj);
  VertexAddr la = leaf_addrs(bt)[(std::size_t)i - 1];
  VertexAddr ua(la.begin(), la.end() - 1);
  const int k = la.back();
  const int au = int(node_at(bt, ua).kids.size());
  const int ap = int(tp.kids.size());
  if (au + ap - 1 > o.max_arity || o.at(au + ap - 1).dim == 0)
    return zero_map(src, tstage.obj);

  Tree grafted = circ_i_tree(bt, i, tp);
  std::map<VertexAddr, VertexAddr> cmap;
  Tree ct = contract_with_map(grafted, EdgeRef{la}, &cmap);
  EvenTree cet = annotate_parities(ct);
  auto hit = tstage.by_shape.find(encode(ct));
  if (hit == tstage.by_shape.end()) return zero_map(src, tstage.obj);
  const PushoutCell& target_cell = tstage.cells[hit->second];

  // source factors in paired cell order; the two vertices being composed in O
  // move to the front
  const auto& eT = cs.shape.evens;
  const auto& oT = cs.shape.odds;
  const auto& eP = ct2.shape.evens;
  const auto& oP = ct2.shape.odds;
  const std::size_t s_e = eT.size(), s_o = oT.size(), t_e = eP.size(), t_o = oP.size();
  const int qu = list_rank(oT, ua);
  std::vector<Space> fs;
  for (const auto& x : eT) fs.push_back(pb.v.at(x.arity));
  for (const auto& w : oT) fs.push_back(o.at(w.arity));
  for (const auto& x : eP) fs.push_back(pb.v.at(x.arity));
  for (const auto& w : oP) fs.push_back(o.at(w.arity));
  std::vector<int> dst1(fs.size());
  int at = 2;
  for (std::size_t q = 0; q < s_e; ++q) dst1[q] = at++;
  for (std::size_t q = 0; q < t_e; ++q) dst1[s_e + s_o + q] = at++;
  for (std::size_t q = 0; q < s_o; ++q)
    if (int(q) != qu) dst1[s_e + q] = at++;
  for (std::size_t q = 1; q < t_o; ++q) dst1[s_e + s_o + t_e + q] = at++;
  dst1[s_e + (std::size_t)qu] = 0;
  dst1[s_e + s_o + t_e] = 1;
  LinMap p1 = factor_perm(fs, dst1);

  LinMap ck = o.circ_at(au, k, ap);
  Index rest = 1;
  for (std::size_t q = 0; q < fs.size(); ++q)
    if (dst1[q] >= 2) rest *= fs[q].dim;
  Mat step = kron(ck.entries, Mat(Mat::Identity(rest, rest)));
  LinMap compose_pair = lin(p1.target, space(o.at(au + ap - 1).dim * rest), step);

  // realign into the cell order of the contracted tree
  const int ce = int(cet.evens.size());
  auto inner_addr = [&](const VertexAddr& a, bool from_second) {
    if (!from_second) return cmap.at(a);
    VertexAddr ga = la;
    ga.insert(ga.end(), a.begin(), a.end());
    return cmap.at(ga);
  };
  std::vector<Space> mids{o.at(au + ap - 1)};
  std::vector<int> dst2{ce + list_rank(cet.odds, cmap.at(ua))};
  for (const auto& x : eT) {
    mids.push_back(pb.v.at(x.arity));
    dst2.push_back(list_rank(cet.evens, inner_addr(x.addr, false)));
  }
  for (const auto& x : eP) {
    mids.push_back(pb.v.at(x.arity));
    dst2.push_back(list_rank(cet.evens, inner_addr(x.addr, true)));
  }
  for (std::size_t q = 0; q < s_o; ++q)
    if (int(q) != qu) {
      mids.push_back(o.at(oT[q].arity));
      dst2.push_back(ce + list_rank(cet.odds, inner_addr(oT[q].addr, false)));
    }
  for (std::size_t q = 1; q < t_o; ++q) {
    mids.push_back(o.at(oP[q].arity));
    dst2.push_back(ce + list_rank(cet.odds, inner_addr(oP[q].addr, true)));
  }
  LinMap p2 = factor_perm(mids, dst2);
  return compose(target_cell.psi_bar, compose(p2, compose(compose_pair, p1)));
}

}  // namespace detail

// ---- the push-out ---------------------------------------------------------

inline PushoutResult build_pushout(const PushoutProblem& prob, int n_max,
                                   std::optional<int> t_max = std::nullopt) {
  if (n_max < 1) throw DomainMismatch("build_pushout: the arity bound must be at least 1");
  if (t_max && *t_max < 1)
    throw DomainMismatch("build_pushout: the stage bound must be at least 1");
  if (prob.o.max_arity < n_max)
    throw ArityMismatch("build_pushout: the ambient operad is truncated below the arity bound");
  detail::check_seq_morphism(prob.f, prob.u, prob.v, "build_pushout: f");
  detail::check_seq_morphism(prob.gbar, prob.u, prob.o.seq, "build_pushout: gbar");

  std::set<int> even_supp;
  for (int a : prob.u.support()) even_supp.insert(a);
  for (int a : prob.v.support()) even_supp.insert(a);
  std::set<int> odd_supp;
  for (int a : prob.o.seq.support())
    if (a <= prob.o.max_arity) odd_supp.insert(a);

  const bool reduced =
      prob.o.at(0).dim == 0 &&
      std::all_of(even_supp.begin(), even_supp.end(), [](int a) { return a >= 2; });
  if (!t_max && !reduced)
    throw TruncationRequired(
        "build_pushout: cells in arities 0 or 1, or a nonzero arity-0 component of the "
        "base operad, keep attaching cells at every stage; pass a stage bound");

  PushoutResult res;
  res.prob = prob;
  res.n_max = n_max;
  res.exact = !t_max;
  res.t_max = t_max;

  // stage chains; in exact mode arity n needs stages up to n so that every
  // composition map has its target stage materialised
  for (int n = 0; n <= n_max; ++n) {
    std::vector<PushoutStage> st;
    PushoutStage base;
    base.obj = prob.o.at(n);
    base.phi = identity(base.obj);
    st.push_back(std::move(base));
    const int top = res.exact ? std::max(0, n) : *t_max;
    for (int t = 1; t <= top; ++t)
      st.push_back(detail::build_stage(prob, st, n, t, even_supp, odd_supp));
    int observed = int(st.size()) - 1;
    while (observed >= 1 && st[(std::size_t)observed].cells.empty()) --observed;
    if (res.exact && observed > std::max(0, n - 1))
      throw std::logic_error("internal: a stage beyond the certified stabilisation bound "
                             "attached cells");
    res.stabilized_at[n] = observed;
    res.stages[n] = std::move(st);
  }
  res.certified = reduced && (res.exact || *t_max >= n_max - 1);

  // composition maps by graded induction on the stage pair
  std::map<int, PushoutCell> standins;
  auto cells_of = [&](int arity, int q) {
    std::vector<const PushoutCell*> out;
    if (q == 0) {
      if (prob.o.at(arity).dim > 0) {
        auto it = standins.find(arity);
        if (it == standins.end())
          it = standins.emplace(arity, detail::standin_cell(prob.o, arity)).first;
        out.push_back(&it->second);
      }
      return out;
    }
    for (const auto& c : res.stages.at(arity)[(std::size_t)q].cells) out.push_back(&c);
    return out;
  };
  for (int m = 1; m <= n_max; ++m)
    for (int n = 0; m + n - 1 <= n_max && n <= n_max; ++n) {
      const int tgt_ar = m + n - 1;
      const auto& stm = res.stages.at(m);
      const auto& stn = res.stages.at(n);
      const auto& stt = res.stages.at(tgt_ar);
      const int sm = res.stabilized_at.at(m), sn = res.stabilized_at.at(n);
      const int top = int(stt.size()) - 1;
      for (int i = 1; i <= m; ++i)
        for (int w = 0; w <= sm + sn; ++w)
          for (int s = std::max(0, w - sn); s <= std::min(w, sm); ++s) {
            const int t = w - s;
            if (s + t > top) continue;
            std::array<int, 5> key{m, i, n, s, t};
            if (s == 0 && t == 0) {
              res.comps.emplace(key, prob.o.circ_at(m, i, n));
              continue;
            }
            const Space& psrc = stm[(std::size_t)s].obj;
            const Space& ptrc = stn[(std::size_t)t].obj;
            Space src = tensor_obj(psrc, ptrc);
            const Space& tgt = stt[(std::size_t)(s + t)].obj;
            if (src.dim == 0) {
              res.comps.emplace(key, zero_map(src, tgt));
              continue;
            }
            std::vector<Mat> ks, ls;
            if (s >= 1) {
              const LinMap& prevc = res.comps.at({m, i, n, s - 1, t});
              ks.push_back(kron(stm[(std::size_t)s].phi.entries,
                                Mat(Mat::Identity(ptrc.dim, ptrc.dim))));
              ls.push_back(matmul(stt[(std::size_t)(s + t)].phi.entries, prevc.entries));
            }
            if (t >= 1) {
              const LinMap& prevc = res.comps.at({m, i, n, s, t - 1});
              ks.push_back(kron(Mat(Mat::Identity(psrc.dim, psrc.dim)),
                                stn[(std::size_t)t].phi.entries));
              ls.push_back(matmul(stt[(std::size_t)(s + t)].phi.entries, prevc.entries));
            }
            for (const PushoutCell* a : cells_of(m, s))
              for (const PushoutCell* b : cells_of(n, t)) {
                if (a->target.dim == 0 || b->target.dim == 0) continue;
                ks.push_back(kron(a->psi_bar.entries, b->psi_bar.entries));
                ls.push_back(
                    detail::d_map(prob, i, *a, *b, stt[(std::size_t)(s + t)]).entries);
              }
            SolveRight<Rat> sol = solve_right(hstack<Rat>(ks), hstack<Rat>(ls));
            if (!sol.consistent || !sol.unique)
              throw NonCompatibleCube("composition map at (" + std::to_string(m) + "," +
                                      std::to_string(i) + "," + std::to_string(n) +
                                      ") is not determined by stages (" + std::to_string(s) +
                                      "," + std::to_string(t) + ")");
            res.comps.emplace(key, lin(src, tgt, sol.m));
          }
    }

  // the colimit operad: components at the top stage, compositions through the
  // stabilised stages (all later connecting maps are identities)
  Operad p;
  p.max_arity = n_max;
  for (int n = 0; n <= n_max; ++n) {
    Space obj = res.stages.at(n).back().obj;
    if (obj.dim > 0) p.seq.comp[n] = obj;
  }
  p.unit = compose(stage_chain(res.stages.at(1), 0, int(res.stages.at(1).size()) - 1),
                   prob.o.unit);
  for (int m = 1; m <= n_max; ++m)
    for (int n = 0; m + n - 1 <= n_max && n <= n_max; ++n) {
      const int tgt_ar = m + n - 1;
      const int sm = res.stabilized_at.at(m), sn = res.stabilized_at.at(n);
      const auto& stt = res.stages.at(tgt_ar);
      if (sm + sn > int(stt.size()) - 1) {
        res.operad_total = false;
        continue;
      }
      for (int i = 1; i <= m; ++i) {
        LinMap c = res.comps.at({m, i, n, sm, sn});
        LinMap full = compose(stage_chain(stt, sm + sn, int(stt.size()) - 1), c);
        if (full.source.dim == 0 || full.target.dim == 0) continue;
        p.circ[{m, i, n}] = lin(tensor_obj(p.at(m), p.at(n)), p.at(tgt_ar), full.entries);
      }
    }
  res.p = p;

  // canonical maps out of O and V
  res.f_prime.source = prob.o;
  res.f_prime.target = p;
  for (int n = 0; n <= n_max; ++n) {
    const auto& st = res.stages.at(n);
    LinMap chain = stage_chain(st, 0, int(st.size()) - 1);
    if (chain.source.dim > 0 || chain.target.dim > 0) res.f_prime.comp[n] = chain;
  }
  for (int n = 0; n <= n_max; ++n) {
    Space vn = prob.v.at(n);
    Space pn = res.stages.at(n).back().obj;
    if (vn.dim == 0) {
      res.gbar_prime[n] = zero_map(vn, pn);
      continue;
    }
    // the one-even-vertex chain tree whose cell holds V(n) against units
    std::vector<Tree> spine;
    for (int c = 0; c < n; ++c) spine.push_back(tree_inner({tree_leaf()}));
    Tree hat = tree_inner({tree_inner(std::move(spine))});
    const auto& st = res.stages.at(n);
    const PushoutStage& s1 = st[1];
    auto hit = s1.by_shape.find(encode(hat));
    if (hit == s1.by_shape.end()) {
      res.gbar_prime[n] = zero_map(vn, pn);
      continue;
    }
    const PushoutCell& cell = s1.cells[hit->second];
    std::vector<Mat> units((std::size_t)n + 1, prob.o.unit.entries);
    LinMap insert = lin(vn, cell.target, kron(Mat(Mat::Identity(vn.dim, vn.dim)),
                                              kron_chain<Rat>(units)));
    res.gbar_prime[n] =
        compose(stage_chain(st, 1, int(st.size()) - 1), compose(cell.psi_bar, insert));
  }

  // the push-out square must close exactly
  for (int n = 0; n <= n_max; ++n) {
    LinMap left = compose(res.gbar_prime.at(n), detail::seq_at(prob.f, prob.u, prob.v, n));
    LinMap right =
        compose(res.f_prime.at(n), detail::seq_at(prob.gbar, prob.u, prob.o.seq, n));
    if (left.entries != right.entries)
      throw DomainMismatch("build_pushout: the push-out square fails to close at arity " +
                           std::to_string(n) + "; the base operad breaks the unit laws");
  }
  return res;
}

// ---- the universal property -----------------------------------------------

namespace detail {

// right-hand side pinned down on a glued cell: send every tensor slot into
// the candidate operad and contract the tree there
inline LinMap cocone_rhs(const PushoutProblem& pb, const Operad& p2, const OperadMap& f2,
                         const std::map<int, LinMap>& gbar2, const PushoutCell& c) {
  const int n = n_leaves(c.shape.tree);
  std::vector<Mat> blocks;
  std::vector<Space> fs;
  bool dead = false;
  for (const auto& x : c.shape.evens) {
    LinMap g = seq_at(gbar2, pb.v, p2.seq, x.arity);
    blocks.push_back(g.entries);
    fs.push_back(g.target);
    dead = dead || g.target.dim == 0;
  }
  for (const auto& w : c.shape.odds) {
    LinMap g = f2.at(w.arity);
    blocks.push_back(g.entries);
    fs.push_back(g.target);
    dead = dead || g.target.dim == 0;
  }
  if (dead) return zero_map(c.target, p2.at(n));
  LinMap slots = lin(c.target, product_space(fs), kron_chain<Rat>(blocks));
  LinMap perm = to_path_order(c.shape, fs);
  LinMap ev = eval_full_contraction(p2, c.shape.tree);
  return compose(ev, compose(perm, slots));
}

}  // namespace detail

// The unique operad map out of the push-out agreeing with a cocone
// (f2 : O -> P', gbar2 : V -> P' with gbar2 . f = f2 . gbar).
inline OperadMap induced_morphism(const PushoutResult& res, const OperadMap& f2,
                                  const std::map<int, LinMap>& gbar2) {
  if (!res.operad_total)
    throw TruncationRequired(
        "induced_morphism: the push-out carries only a partial operad structure; rebuild "
        "with a larger stage bound");
  const Operad& p2 = f2.target;
  const PushoutProblem& pb = res.prob;
  detail::check_seq_morphism(gbar2, pb.v, p2.seq, "induced_morphism: gbar2");
  for (int n = 0; n <= res.n_max; ++n) {
    LinMap left = compose(detail::seq_at(gbar2, pb.v, p2.seq, n),
                          detail::seq_at(pb.f, pb.u, pb.v, n));
    LinMap right = compose(f2.at(n), detail::seq_at(pb.gbar, pb.u, pb.o.seq, n));
    if (left.entries != right.entries)
      throw IncompatibleCocone("induced_morphism: the cocone square fails to commute at arity " +
                               std::to_string(n));
  }

  OperadMap h;
  h.source = res.p;
  h.target = p2;
  for (int n = 0; n <= res.n_max; ++n) {
    const auto& st = res.stages.at(n);
    LinMap cur = f2.at(n);
    for (int r = 1; r < int(st.size()); ++r) {
      const PushoutStage& sg = st[(std::size_t)r];
      if (sg.cells.empty()) continue;  // the connecting map is the identity
      std::vector<Mat> ks{sg.phi.entries}, ls{cur.entries};
      for (const auto& c : sg.cells) {
        ks.push_back(c.psi_bar.entries);
        ls.push_back(detail::cocone_rhs(pb, p2, f2, gbar2, c).entries);
      }
      SolveRight<Rat> sol = solve_right(hstack<Rat>(ks), hstack<Rat>(ls));
      if (!sol.consistent)
        throw IncompatibleCocone("induced_morphism: the cocone does not factor through stage " +
                                 std::to_string(r) + " at arity " + std::to_string(n));
      if (!sol.unique)
        throw std::logic_error("internal: stage corners fail to span the push-out stage");
      cur = lin(sg.obj, p2.at(n), sol.m);
    }
    h.comp[n] = cur;
  }

  // the construction promises exact commutation with both canonical maps
  for (int n = 0; n <= res.n_max; ++n) {
    if (compose(h.at(n), res.f_prime.at(n)).entries != f2.at(n).entries)
      throw std::logic_error("internal: the induced map fails to extend the base leg");
    LinMap g1 = res.gbar_prime.count(n)
                    ? res.gbar_prime.at(n)
                    : zero_map(pb.v.at(n), res.p.at(n));
    if (compose(h.at(n), g1).entries !=
        detail::seq_at(gbar2, pb.v, p2.seq, n).entries)
      throw std::logic_error("internal: the induced map fails to extend the cell leg");
  }
  CheckReport rep = check_operad_map(h, res.n_max);
  if (!rep.pass())
    throw IncompatibleCocone("induced_morphism: the induced map is not an operad morphism: " +
                             rep.violations.front());
  return h;
}

// Check the universal property numerically: the stages are spanned by the
// base image together with the glued cells, the push-out's own legs induce
// the identity, and every sample cocone factors through the push-out.
inline CheckReport verify_universal(const PushoutResult& res,
                                    const std::vector<PushoutCocone>& samples) {
  CheckReport rep;
  for (int n = 0; n <= res.n_max; ++n) {
    const auto& st = res.stages.at(n);
    for (int r = 1; r < int(st.size()); ++r) {
      std::vector<Mat> gens{stage_chain(st, 0, r).entries};
      for (int q = 1; q <= r; ++q) {
        LinMap lift = stage_chain(st, q, r);
        for (const auto& c : st[(std::size_t)q].cells)
          gens.push_back(matmul(lift.entries, c.psi_bar.entries));
      }
      if (rank(hstack<Rat>(gens)) != st[(std::size_t)r].obj.dim)
        rep.violations.push_back("arity " + std::to_string(n) + " stage " + std::to_string(r) +
                                 ": base image and glued cells fail to span");
    }
  }
  try {
    OperadMap refl = induced_morphism(res, res.f_prime, res.gbar_prime);
    for (int n = 0; n <= res.n_max; ++n)
      if (refl.at(n).entries != Mat(Mat::Identity(res.p.at(n).dim, res.p.at(n).dim)))
        rep.violations.push_back("arity " + std::to_string(n) +
                                 ": the push-out's own cocone induces a non-identity map");
  } catch (const Error& e) {
    rep.violations.push_back(std::string("reflexive cocone: ") + e.what());
  }
  for (std::size_t q = 0; q < samples.size(); ++q) {
    try {
      OperadMap h = induced_morphism(res, samples[q].f2, samples[q].gbar2);
      for (int n = 0; n <= res.n_max; ++n) {
        if (compose(h.at(n), res.f_prime.at(n)).entries != samples[q].f2.at(n).entries)
          rep.violations.push_back("sample " + std::to_string(q) +
                                   ": base triangle fails at arity " + std::to_string(n));
        LinMap g1 = res.gbar_prime.count(n)
                        ? res.gbar_prime.at(n)
                        : zero_map(res.prob.v.at(n), res.p.at(n));
        LinMap g2 = detail::seq_at(samples[q].gbar2, res.prob.v, h.target.seq, n);
        if (compose(h.at(n), g1).entries != g2.entries)
          rep.violations.push_back("sample " + std::to_string(q) +
                                   ": cell triangle fails at arity " + std::to_string(n));
      }
    } catch (const Error& e) {
      rep.violations.push_back("sample " + std::to_string(q) + ": " + e.what());
    }
  }
  return rep;
}

}  // namespace opd
