// Push-outs of operad algebras along a map of generator graphs, built by
// staged cell attachment. Stage t attaches, for every arity n and every
// t-element subset S of the n slots, a cell whose tensor factors carry the
// new graph Z at the slots in S and the old carrier A elsewhere; the cell is
// glued along the punctured-cube source of the slotwise maps, with gluing
// maps determined recursively from the stage below. After each stage the
// carrier is quotiented by absorption relations that identify an attached
// element whose operation factors compose with the same element built from
// the composed operation, so that operad composition remains well defined.
// Structure maps of the result are then solved arity by arity from the
// covering families of the stage carriers.
//
// Every truncation (arity bound n_max, stage bound t_max) is recorded in
// certificates: `cells_exact` when no content-bearing cell was out of
// bounds, `nu_total` when every structure map could be solved, and
// `certified` for the conjunction, also requiring no skipped relations.
#pragma once

#include <opd/algebra.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opd {

// One attached cell: arity n, the subset of slots carrying the new graph,
// the gluing map psi into the previous stage and the characteristic map
// psibar into the new stage.
struct AlgPushCell {
  int n = 0;
  std::vector<int> slots;  // ascending, 1-based tensor positions
  std::map<PairKey, LinMap> psi;
  std::map<PairKey, LinMap> psibar;
};

struct AlgPushStage {
  SGraph obj;      // carrier after this stage
  SGraphMap phi;   // previous carrier -> this carrier
  std::vector<AlgPushCell> cells;
};

struct AlgebraPushoutResult {
  Algebra b;
  SGraphMap f_prime;     // carrier map of the algebra map A -> B
  SGraphMap gbar_prime;  // Z -> B, the pushed-forward attachment
  std::vector<AlgPushStage> stages;
  bool cells_exact = true;
  bool nu_total = true;
  bool relations_skipped = false;
  bool certified = true;
  int n_max = 0, t_max = 0;
  Algebra base;            // the input algebra, kept for replays and checks
  SGraphMap cell_f, cell_gbar;
};

namespace detail {

inline std::vector<std::vector<int>> subsets_of_size(int n, int t) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // iterative combination enumeration in lexicographic order
  cur.resize((std::size_t)t);
  for (int i = 0; i < t; ++i) cur[(std::size_t)i] = i + 1;
  if (t == 0) {
    out.push_back({});
    return out;
  }
  if (t > n) return out;
  while (true) {
    out.push_back(cur);
    int i = t - 1;
    while (i >= 0 && cur[(std::size_t)i] == n - (t - 1 - i)) --i;
    if (i < 0) break;
    ++cur[(std::size_t)i];
    for (int j = i + 1; j < t; ++j) cur[(std::size_t)j] = cur[(std::size_t)j - 1] + 1;
  }
  return out;
}

// slot relabeling after replacing the window {j..j+q-1} by one slot at j;
// assumes the input avoids the window
inline std::vector<int> shift_slots(const std::vector<int>& slots, int j, int q) {
  std::vector<int> out;
  out.reserve(slots.size());
  for (int i : slots) out.push_back(i < j ? i : i - q + 1);
  return out;
}

inline Mat block_injection(Index total, Index off, Index dim) {
  Mat m = Mat::Zero(total, dim);
  if (dim > 0) m.block(off, 0, dim, dim) = Mat::Identity(dim, dim);
  return m;
}

inline Mat block_projection(Index total, Index off, Index dim) {
  Mat m = Mat::Zero(dim, total);
  if (dim > 0) m.block(0, off, dim, dim) = Mat::Identity(dim, dim);
  return m;
}

inline Mat ident(Index d) { return Mat::Identity(d, d); }

// the characteristic map of cell (p, slots) at the given stage (0 = the
// input algebra's structure map), as a matrix into that stage's carrier
inline Mat psibar_at_stage(const Algebra& a, const std::vector<AlgPushStage>& stages, int sigma,
                           int p, const std::vector<int>& slots, const std::string& x,
                           const std::string& w) {
  if (sigma == 0) return a.nu_at(p, x, w).entries;
  for (const AlgPushCell& c : stages[(std::size_t)sigma - 1].cells)
    if (c.n == p && c.slots == slots) {
      auto it = c.psibar.find({x, w});
      if (it != c.psibar.end()) return it->second.entries;
    }
  throw std::logic_error("algebra_pushout: missing cell (" + std::to_string(p) + ") at stage " +
                         std::to_string(sigma));
}

inline bool operad_dims_eq(const Operad& a, const Operad& b) {
  if (a.max_arity != b.max_arity) return false;
  for (int n = 0; n <= a.max_arity; ++n)
    if (a.at(n).dim != b.at(n).dim) return false;
  if (a.unit.entries != b.unit.entries) return false;
  for (int m = 1; m <= a.max_arity; ++m)
    for (int n = 0; n <= a.max_arity && m + n - 1 <= a.max_arity; ++n)
      for (int i = 1; i <= m; ++i)
        if (a.circ_at(m, i, n).entries != b.circ_at(m, i, n).entries) return false;
  return true;
}

}  // namespace detail

inline AlgebraPushoutResult algebra_pushout(const Algebra& a, const SGraphMap& f,
                                            const SGraphMap& gbar, int n_max, int t_max) {
  const Operad& o = a.op;
  if (n_max < 1 || t_max < 1)
    throw TruncationRequired(
        "algebra_pushout: explicit bounds n_max >= 1 and t_max >= 1 are required; cells range "
        "over all arities otherwise");
  if (o.max_arity < 1)
    throw ArityMismatch("algebra_pushout: the operad needs arity one for its unit");
  require_same_objects(a.carrier, f.source, "algebra_pushout");
  require_same_objects(a.carrier, f.target, "algebra_pushout");
  require_same_objects(a.carrier, gbar.source, "algebra_pushout");
  require_same_objects(a.carrier, gbar.target, "algebra_pushout");
  if (!graph_dims_eq(f.source, gbar.source))
    throw DomainMismatch("algebra_pushout: the two attaching maps must share their source");
  if (!graph_dims_eq(gbar.target, a.carrier))
    throw DomainMismatch("algebra_pushout: gbar must land in the algebra carrier");
  const int N = std::min(n_max, o.max_arity);
  const int T = std::min(t_max, N);
  if (a.max_arity < N)
    throw DomainMismatch("algebra_pushout: the algebra's structure maps do not reach n_max");
  {
    CheckReport r = check_algebra(a, N);
    if (!r.pass())
      throw DomainMismatch("algebra_pushout: the input fails the algebra axioms: " +
                           r.violations.front());
  }

  const SGraph& A = a.carrier;
  const SGraph& Z = f.target;
  const std::vector<std::string>& objs = A.objects;
  const int s = A.n_objects();

  AlgebraPushoutResult res;
  res.n_max = n_max;
  res.t_max = t_max;
  res.base = a;
  res.cell_f = f;
  res.cell_gbar = gbar;

  auto tlist_of = [&](int n, const std::vector<int>& slots) {
    std::vector<const SGraph*> tl((std::size_t)n, &A);
    for (int i : slots) tl[(std::size_t)i - 1] = &Z;
    return tl;
  };

  // certificate: an out-of-bounds cell matters when the operad is nonzero at
  // its arity and its tensor object is nonzero somewhere
  for (int n = 1; n <= o.max_arity && res.cells_exact; ++n) {
    if (o.at(n).dim == 0) continue;
    for (int t = 1; t <= n && res.cells_exact; ++t) {
      if (n <= N && t <= T) continue;  // attached
      for (const std::vector<int>& sub : detail::subsets_of_size(n, t)) {
        std::vector<const SGraph*> tl = tlist_of(n, sub);
        bool content = false;
        for (int x = 0; x < s && !content; ++x)
          for (int w = 0; w < s && !content; ++w)
            if (prod_blocks(tl, x, w).total > 0) content = true;
        if (content) {
          res.cells_exact = false;
          break;
        }
      }
    }
  }

  struct CellWork {
    int n = 0;
    std::vector<int> slots;
    Index on = 0;
    std::vector<const SGraph*> tlist;
    std::vector<ProdBlocks> tpb;             // per component
    std::vector<std::vector<PPSource>> pp;   // per component, per chain
    std::vector<std::vector<Index>> qoff;    // per component, per chain
    std::vector<Index> qtot;                 // per component
    std::vector<Mat> psi, psibar;            // per component
  };

  SGraph B_prev = A;

  for (int t = 1; t <= T; ++t) {
    std::vector<CellWork> work;
    for (int n = t; n <= N; ++n)
      for (const std::vector<int>& sub : detail::subsets_of_size(n, t)) {
        CellWork cw;
        cw.n = n;
        cw.slots = sub;
        cw.on = o.at(n).dim;
        cw.tlist = tlist_of(n, sub);
        cw.tpb.reserve((std::size_t)(s * s));
        for (int x = 0; x < s; ++x)
          for (int w = 0; w < s; ++w) cw.tpb.push_back(prod_blocks(cw.tlist, x, w));
        cw.pp.resize((std::size_t)(s * s));
        cw.qoff.resize((std::size_t)(s * s));
        cw.qtot.assign((std::size_t)(s * s), 0);
        cw.psi.resize((std::size_t)(s * s));
        cw.psibar.resize((std::size_t)(s * s));
        work.push_back(std::move(cw));
      }

    // 1. punctured-cube sources and gluing maps
    for (CellWork& cw : work) {
      if (cw.on == 0) {
        for (int ci = 0; ci < s * s; ++ci) cw.psi[(std::size_t)ci] = Mat::Zero(
            B_prev.at_idx(ci / s, ci % s).dim, 0);
        continue;
      }
      for (int x = 0; x < s; ++x)
        for (int w = 0; w < s; ++w) {
          const int ci = x * s + w;
          const ProdBlocks& tpb = cw.tpb[(std::size_t)ci];
          std::vector<PPSource>& pps = cw.pp[(std::size_t)ci];
          std::vector<Index>& qoff = cw.qoff[(std::size_t)ci];
          for (std::size_t b = 0; b < tpb.paths.size(); ++b) {
            const std::vector<int>& u = tpb.paths[b];
            std::vector<LinMap> maps;
            for (int l = 1; l <= cw.n; ++l) {
              const int ix = u[(std::size_t)(cw.n - l)], iw = u[(std::size_t)(cw.n - l + 1)];
              const std::string& px = objs[(std::size_t)ix];
              const std::string& pw = objs[(std::size_t)iw];
              if (std::find(cw.slots.begin(), cw.slots.end(), l) != cw.slots.end())
                maps.push_back(f.at(px, pw));
              else
                maps.push_back(zero_map(initial_space(), A.at(px, pw)));
            }
            pps.push_back(pp_source(maps));
            qoff.push_back(cw.qtot[(std::size_t)ci]);
            cw.qtot[(std::size_t)ci] += pps.back().object.dim;
          }

          // corner equations determine psi
          const Index Bdim = B_prev.at_idx(x, w).dim;
          const Index cols = cw.on * cw.qtot[(std::size_t)ci];
          std::vector<Mat> ks, ls;
          std::vector<int> rest;  // slots minus one element, reused
          for (std::size_t b = 0; b < tpb.paths.size(); ++b) {
            const std::vector<int>& u = tpb.paths[b];
            for (int i : cw.slots) {
              const LinMap& kappa = pps[b].kappas[(std::size_t)i - 1];
              if (cw.on * kappa.source.dim == 0) continue;
              Mat injq = detail::block_injection(cw.qtot[(std::size_t)ci], qoff[b],
                                                 pps[b].object.dim);
              ks.push_back(kron(detail::ident(cw.on), Mat(matmul(injq, kappa.entries))));
              // previous-stage composite with gbar at the freed slot
              rest.clear();
              for (int q : cw.slots)
                if (q != i) rest.push_back(q);
              std::vector<const SGraph*> tl2 = tlist_of(cw.n, rest);
              ProdBlocks tpb2 = prod_blocks(tl2, x, w);
              std::vector<Mat> chain;
              for (int l = 1; l <= cw.n; ++l) {
                const int ix = u[(std::size_t)(cw.n - l)], iw = u[(std::size_t)(cw.n - l + 1)];
                if (l == i)
                  chain.push_back(gbar.at(objs[(std::size_t)ix], objs[(std::size_t)iw]).entries);
                else {
                  const SGraph* g = cw.tlist[(std::size_t)l - 1];
                  chain.push_back(detail::ident(g->at_idx(ix, iw).dim));
                }
              }
              Mat inj2 = detail::block_injection(tpb2.total, tpb2.offsets[b], tpb2.dims[b]);
              Mat prev = detail::psibar_at_stage(a, res.stages, t - 1, cw.n, rest,
                                                 objs[(std::size_t)x], objs[(std::size_t)w]);
              ls.push_back(matmul(prev, kron(detail::ident(cw.on),
                                             Mat(matmul(inj2, kron_chain(chain))))));
            }
          }
          Mat K = ks.empty() ? Mat::Zero(cols, 0) : hstack(ks);
          Mat L = ls.empty() ? Mat::Zero(Bdim, 0) : hstack(ls);
          SolveRight<Rat> sr = solve_right(K, L);
          if (!sr.consistent)
            throw NonCompatibleCube(
                "algebra_pushout: the corner maps of a cell admit no common gluing");
          if (!sr.unique)
            throw std::logic_error(
                "algebra_pushout: cell corners failed to cover the cube source");
          cw.psi[(std::size_t)ci] = sr.m;
        }
    }

    // 2. per-component stage push-out, absorption relations, quotient
    SGraph B_next = sgraph(objs);
    std::map<PairKey, LinMap> phi_comp;
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        const int ci = x * s + w;
        const Index Bdim = B_prev.at_idx(x, w).dim;
        Index X = 0, R = 0;
        std::vector<Index> soff, roff;
        for (const CellWork& cw : work) {
          soff.push_back(X);
          roff.push_back(R);
          X += cw.on * cw.qtot[(std::size_t)ci];
          R += cw.on * cw.tpb[(std::size_t)ci].total;
        }
        Mat fpo = Mat::Zero(Bdim, X);
        Mat gpo = Mat::Zero(R, X);
        for (std::size_t c = 0; c < work.size(); ++c) {
          const CellWork& cw = work[c];
          const Index sd = cw.on * cw.qtot[(std::size_t)ci];
          if (sd == 0) continue;
          fpo.middleCols(soff[c], sd) = cw.psi[(std::size_t)ci];
          Mat odiag = Mat::Zero(cw.tpb[(std::size_t)ci].total, cw.qtot[(std::size_t)ci]);
          for (std::size_t b = 0; b < cw.pp[(std::size_t)ci].size(); ++b) {
            const PPSource& p = cw.pp[(std::size_t)ci][b];
            if (p.object.dim == 0) continue;
            odiag.block(cw.tpb[(std::size_t)ci].offsets[b], cw.qoff[(std::size_t)ci][b],
                        cw.tpb[(std::size_t)ci].dims[b], p.object.dim) = p.odot.entries;
          }
          gpo.block(roff[c], soff[c], cw.on * cw.tpb[(std::size_t)ci].total, sd) =
              kron(detail::ident(cw.on), odiag);
        }
        PushoutData po = pushout(lin(space(X), space(Bdim), fpo), lin(space(X), space(R), gpo));
        const Index apex = po.apex.dim;

        // absorption: composing the operation factors equals acting on a
        // window of old-carrier factors first
        std::vector<Mat> rel_cols;
        for (std::size_t c = 0; c < work.size(); ++c) {
          const CellWork& cw = work[c];
          const Index ttot = cw.tpb[(std::size_t)ci].total;
          if (ttot == 0) continue;
          Mat pre_c = po.inj_right.entries.middleCols(roff[c], cw.on * ttot);
          for (int q = 0; q <= cw.n; ++q) {
            const int m = cw.n - q + 1;
            const Index oq = o.at(q).dim;
            if (m > N) {
              if (m <= o.max_arity && o.at(m).dim > 0 && oq > 0)
                res.relations_skipped = true;
              continue;
            }
            const Index om = o.at(m).dim;
            if (om == 0 || oq == 0) continue;
            for (int j = 1; j <= m; ++j) {
              bool overlap = false;
              for (int i : cw.slots)
                if (i >= j && i <= j + q - 1) overlap = true;
              if (overlap) continue;
              std::vector<int> slots2 = detail::shift_slots(cw.slots, j, q);
              // locate the target cell (m, slots2)
              std::size_t c2 = work.size();
              for (std::size_t k = 0; k < work.size(); ++k)
                if (work[k].n == m && work[k].slots == slots2) c2 = k;
              if (c2 == work.size())
                throw std::logic_error("algebra_pushout: absorption target cell missing");
              const CellWork& cw2 = work[c2];
              const Index t2tot = cw2.tpb[(std::size_t)ci].total;
              Mat pre_c2 = po.inj_right.entries.middleCols(roff[c2], om * t2tot);
              // one way: compose the operations
              Mat rho1 = matmul(pre_c, kron(o.circ_at(m, j, q).entries, detail::ident(ttot)));
              // other way: act on the window, then attach the smaller cell
              Mat M = Mat::Zero(om * t2tot, om * oq * ttot);
              const ProdBlocks& tpb = cw.tpb[(std::size_t)ci];
              for (std::size_t b = 0; b < tpb.paths.size(); ++b) {
                if (tpb.dims[b] == 0) continue;
                const std::vector<int>& u = tpb.paths[b];
                const std::vector<Index>& F = tpb.fdims[b];
                const int ai = u[(std::size_t)(cw.n - j - q + 1)];
                const int bi = u[(std::size_t)(cw.n - j + 1)];
                const Index ad = A.at_idx(ai, bi).dim;
                Index pre = 1, windim = 1, post = 1;
                for (int l = 1; l <= j - 1; ++l) pre *= F[(std::size_t)l - 1];
                for (int l = j; l <= j + q - 1; ++l) windim *= F[(std::size_t)l - 1];
                for (int l = j + q; l <= cw.n; ++l) post *= F[(std::size_t)l - 1];
                // window chain inside the old carrier's power
                std::vector<int> win(u.begin() + (cw.n - j - q + 1), u.begin() + (cw.n - j + 1) + 1);
                ProdBlocks pbq = pow_blocks(A, q, ai, bi);
                Mat injw = detail::block_injection(pbq.total,
                                                   pbq.offsets[(std::size_t)interior_code(win, s)],
                                                   windim);
                Mat wmap = matmul(a.nu_at_idx(q, ai, bi).entries,
                                  kron(detail::ident(oq), injw));
                Mat mid = kron_chain(std::vector<Mat>{detail::ident(om * pre), wmap,
                                                      detail::ident(post)});
                // permute the operation factor next to its window
                std::vector<Space> fs{space(om), space(oq)};
                for (Index fd : F) fs.push_back(space(fd));
                std::vector<int> dst((std::size_t)cw.n + 2);
                dst[0] = 0;
                dst[1] = j;
                for (int l = 1; l <= cw.n; ++l) dst[(std::size_t)(1 + l)] = l <= j - 1 ? l : l + 1;
                Mat perm = factor_perm(fs, dst).entries;
                // contracted chain in the target cell
                std::vector<int> u2(u.begin(), u.begin() + (cw.n - j - q + 1) + 1);
                u2.insert(u2.end(), u.begin() + (cw.n - j + 1), u.end());
                const Index off2 = cw2.tpb[(std::size_t)ci].offsets[(std::size_t)interior_code(u2, s)];
                Mat inj2 = detail::block_injection(t2tot, off2, pre * ad * post);
                Mat blockmap = matmul(kron(detail::ident(om), inj2), Mat(matmul(mid, perm)));
                Mat projb = detail::block_projection(ttot, tpb.offsets[b], tpb.dims[b]);
                M += matmul(blockmap, kron(detail::ident(om * oq), projb));
              }
              Mat rho2 = matmul(pre_c2, M);
              rel_cols.push_back(rho1 - rho2);
            }
          }
        }
        Mat rel = rel_cols.empty() ? Mat::Zero(apex, 0) : hstack(rel_cols);
        Quotient<Rat> qt = quotient_by<Rat>(apex, rel);
        const Index Bt = qt.dim();
        const PairKey key{objs[(std::size_t)x], objs[(std::size_t)w]};
        if (Bt > 0) B_next.hom[key] = space(Bt);
        phi_comp[key] = lin(space(Bdim), space(Bt), Mat(matmul(qt.proj, po.inj_left.entries)));
        for (std::size_t c = 0; c < work.size(); ++c) {
          const Index td = work[c].on * work[c].tpb[(std::size_t)ci].total;
          work[c].psibar[(std::size_t)ci] =
              matmul(qt.proj, Mat(po.inj_right.entries.middleCols(roff[c], td)));
        }
      }

    // 3. store the stage
    AlgPushStage st;
    st.obj = B_next;
    {
      std::map<PairKey, LinMap> pc;
      for (auto& [key, m] : phi_comp)
        pc.emplace(key, lin(B_prev.at(key.first, key.second), B_next.at(key.first, key.second),
                            m.entries));
      st.phi = SGraphMap{B_prev, B_next, std::move(pc)};
    }
    for (CellWork& cw : work) {
      AlgPushCell cell;
      cell.n = cw.n;
      cell.slots = cw.slots;
      for (int x = 0; x < s; ++x)
        for (int w = 0; w < s; ++w) {
          const int ci = x * s + w;
          const PairKey key{objs[(std::size_t)x], objs[(std::size_t)w]};
          cell.psi.emplace(key, lin(space(cw.on * cw.qtot[(std::size_t)ci]),
                                    B_prev.at_idx(x, w), cw.psi[(std::size_t)ci]));
          cell.psibar.emplace(key,
                              lin(space(cw.on * cw.tpb[(std::size_t)ci].total),
                                  B_next.at_idx(x, w), cw.psibar[(std::size_t)ci]));
        }
      st.cells.push_back(std::move(cell));
    }
    res.stages.push_back(std::move(st));
    B_prev = B_next;
  }

  const SGraph& B = B_prev;

  // composites into the final carrier
  std::vector<SGraphMap> Phi((std::size_t)T + 1);
  Phi[(std::size_t)T] = graph_identity(B);
  for (int t = T - 1; t >= 0; --t)
    Phi[(std::size_t)t] = graph_compose(Phi[(std::size_t)t + 1], res.stages[(std::size_t)t].phi);

  // structure maps, solved from the covering families of the stage carriers
  res.b.op = o;
  res.b.carrier = B;
  res.b.max_arity = N;
  if (o.at(0).dim > 0)
    for (const std::string& xo : objs) {
      LinMap nu0 = a.nu_at(0, xo, xo);
      set_nu(res.b, 0, xo, xo,
             lin(nu0.source, B.at(xo, xo), Mat(matmul(Phi[0].at(xo, xo).entries, nu0.entries))));
    }

  // Per-slot covering legs: a stage-0 slot is reached by every structure map
  // of the input algebra (its arity-1 part contains the identity through the
  // operad unit), a positive-stage slot by the stage map together with that
  // stage's cells. The recursion targets the stage whose index is the total
  // of the slot stages, capped at the last computed stage.
  struct Leg {
    int kind = 0;  // 1 phi, 2 cell, 3 input-algebra structure map
    const AlgPushCell* cell = nullptr;
    int stage = 0;
    int p = 0;  // arity for kind 3
  };

  auto carrier_at = [&](int sigma) -> const SGraph& {
    return sigma == 0 ? A : res.stages[(std::size_t)sigma - 1].obj;
  };

  for (int n = 1; n <= N; ++n) {
    const Index on = o.at(n).dim;
    if (on == 0) continue;
    // t-vectors by ascending total
    std::vector<std::vector<int>> tvecs;
    {
      std::vector<int> tv((std::size_t)n, 0);
      while (true) {
        tvecs.push_back(tv);
        int i = n - 1;
        while (i >= 0 && tv[(std::size_t)i] == T) {
          tv[(std::size_t)i] = 0;
          --i;
        }
        if (i < 0) break;
        ++tv[(std::size_t)i];
      }
      std::stable_sort(tvecs.begin(), tvecs.end(),
                       [](const std::vector<int>& p, const std::vector<int>& q) {
                         int sp = 0, sq = 0;
                         for (int v : p) sp += v;
                         for (int v : q) sq += v;
                         return sp < sq;
                       });
    }
    std::map<std::vector<int>, std::vector<Mat>> cmap;  // per component index
    std::map<std::vector<int>, Mat> mu_cache;

    for (const std::vector<int>& tv : tvecs) {
      int tsum = 0;
      for (int v : tv) tsum += v;
      std::vector<Mat> comp((std::size_t)(s * s));
      bool this_missing = false;

      if (tsum == 0) {
        for (int x = 0; x < s; ++x)
          for (int w = 0; w < s; ++w)
            comp[(std::size_t)(x * s + w)] = a.nu_at_idx(n, x, w).entries;
        cmap.emplace(tv, std::move(comp));
        continue;
      }
      const int sigma = std::min(tsum, T);
      const SGraph& Bsig = carrier_at(sigma);

      std::vector<const SGraph*> glist;
      for (int l = 0; l < n; ++l)
        glist.push_back(&carrier_at(std::min(tv[(std::size_t)l], T)));

      for (int x = 0; x < s && !this_missing; ++x)
        for (int w = 0; w < s && !this_missing; ++w) {
          const int ci = x * s + w;
          ProdBlocks pbB = prod_blocks(glist, x, w);
          const Index cols = on * pbB.total;
          std::vector<Mat> ks, ls;
          for (std::size_t blk = 0; blk < pbB.paths.size() && !this_missing; ++blk) {
            if (pbB.dims[blk] == 0) continue;
            const std::vector<int>& u = pbB.paths[blk];
            // per slot: covering legs
            std::vector<std::vector<Leg>> legs((std::size_t)n);
            for (int l = 1; l <= n; ++l) {
              const int tl = tv[(std::size_t)l - 1];
              if (tl == 0) {
                for (int p = 0; p <= N; ++p)
                  legs[(std::size_t)l - 1].push_back(Leg{3, nullptr, 0, p});
              } else {
                legs[(std::size_t)l - 1].push_back(Leg{1, nullptr, tl, 0});
                for (const AlgPushCell& c : res.stages[(std::size_t)tl - 1].cells)
                  legs[(std::size_t)l - 1].push_back(Leg{2, &c, tl, 0});
              }
            }
            std::vector<Index> nlegs((std::size_t)n), pickv((std::size_t)n, 0);
            for (int l = 0; l < n; ++l) nlegs[(std::size_t)l] = Index(legs[(std::size_t)l].size());
            do {
              // assemble the combo
              std::vector<const Leg*> pick((std::size_t)n);
              std::vector<std::pair<int, int>> pairs((std::size_t)n);  // object idx per slot
              for (int l = 1; l <= n; ++l) {
                pick[(std::size_t)l - 1] = &legs[(std::size_t)l - 1][(std::size_t)pickv[(std::size_t)l - 1]];
                pairs[(std::size_t)l - 1] = {u[(std::size_t)(n - l)], u[(std::size_t)(n - l + 1)]};
              }
              std::vector<Mat> leg_entries;
              Index combo_src = 1;
              int first_phi = 0;  // 1-based, 0 = none
              for (int l = 1; l <= n; ++l) {
                const Leg& lg = *pick[(std::size_t)l - 1];
                const auto [ix, iw] = pairs[(std::size_t)l - 1];
                const std::string& px = objs[(std::size_t)ix];
                const std::string& pw = objs[(std::size_t)iw];
                Mat e;
                if (lg.kind == 1) {
                  e = res.stages[(std::size_t)lg.stage - 1].phi.at(px, pw).entries;
                  if (first_phi == 0) first_phi = l;
                } else if (lg.kind == 2)
                  e = lg.cell->psibar.at({px, pw}).entries;
                else
                  e = a.nu_at(lg.p, px, pw).entries;
                combo_src *= e.cols();
                leg_entries.push_back(std::move(e));
              }
              if (on * combo_src == 0) continue;

              Mat injU = detail::block_injection(pbB.total, pbB.offsets[blk], pbB.dims[blk]);
              Mat kcol = kron(detail::ident(on), Mat(matmul(injU, kron_chain(leg_entries))));

              if (first_phi > 0) {
                // reduce the first stage-map slot to the stage below
                std::vector<int> tv2 = tv;
                --tv2[(std::size_t)first_phi - 1];
                auto it = cmap.find(tv2);
                if (it == cmap.end()) {
                  res.nu_total = false;
                  this_missing = true;
                  break;
                }
                std::vector<const SGraph*> glist2 = glist;
                glist2[(std::size_t)first_phi - 1] =
                    &carrier_at(std::min(tv2[(std::size_t)first_phi - 1], T));
                ProdBlocks pbB2 = prod_blocks(glist2, x, w);
                std::vector<Mat> chain2;
                for (int l = 1; l <= n; ++l) {
                  if (l == first_phi)
                    chain2.push_back(detail::ident(leg_entries[(std::size_t)l - 1].cols()));
                  else
                    chain2.push_back(leg_entries[(std::size_t)l - 1]);
                }
                Mat inj2 = detail::block_injection(pbB2.total, pbB2.offsets[blk], pbB2.dims[blk]);
                Mat rhs = matmul(it->second[(std::size_t)ci],
                                 kron(detail::ident(on), Mat(matmul(inj2, kron_chain(chain2)))));
                if (tsum <= T)
                  rhs = matmul(res.stages[(std::size_t)tsum - 1].phi.at_idx(x, w).entries, rhs);
                ks.push_back(kcol);
                ls.push_back(std::move(rhs));
                continue;
              }

              // every leg carries an operation factor: compose them into one
              // larger cell at the combined stage
              std::vector<int> ps((std::size_t)n);
              int psum = 0, ssum = 0;
              std::vector<int> stot;
              std::vector<ProdBlocks> tpbs((std::size_t)n);
              int prior = 0;
              for (int l = 1; l <= n; ++l) {
                const Leg& lg = *pick[(std::size_t)l - 1];
                const auto [ix, iw] = pairs[(std::size_t)l - 1];
                if (lg.kind == 3) {
                  ps[(std::size_t)l - 1] = lg.p;
                  tpbs[(std::size_t)l - 1] = pow_blocks(A, lg.p, ix, iw);
                } else {
                  ps[(std::size_t)l - 1] = lg.cell->n;
                  std::vector<const SGraph*> tl = tlist_of(lg.cell->n, lg.cell->slots);
                  tpbs[(std::size_t)l - 1] = prod_blocks(tl, ix, iw);
                  for (int i : lg.cell->slots) stot.push_back(prior + i);
                  ssum += int(lg.cell->slots.size());
                }
                psum += ps[(std::size_t)l - 1];
                prior += ps[(std::size_t)l - 1];
              }
              // composites beyond the attached range have no valid equation
              // in the truncated tower; coverage loss surfaces as an
              // underdetermined solve below
              if (psum > N || ssum > T) continue;
              // gather operation factors in front
              std::vector<Space> fs{o.at(n)};
              std::vector<int> dst{0};
              for (int l = 1; l <= n; ++l) {
                fs.push_back(o.at(ps[(std::size_t)l - 1]));
                dst.push_back(l);
                fs.push_back(space(tpbs[(std::size_t)l - 1].total));
                dst.push_back(n + l);
              }
              Mat perm = factor_perm(fs, dst).entries;
              // compose the operation factors
              auto mu_it = mu_cache.find(ps);
              if (mu_it == mu_cache.end())
                mu_it = mu_cache.emplace(ps, mu_tree(o, n, ps).entries).first;
              Index prod_t = 1;
              for (int l = 0; l < n; ++l) prod_t *= tpbs[(std::size_t)l].total;
              Mat step3 = kron(mu_it->second, detail::ident(prod_t));
              // concatenate the tensor factors into one cell block
              std::vector<const SGraph*> tl_tot = tlist_of(psum, stot);
              ProdBlocks tpbT = prod_blocks(tl_tot, x, w);
              Mat W = Mat::Zero(tpbT.total, prod_t);
              {
                std::vector<Index> nblk((std::size_t)n), bi((std::size_t)n, 0);
                for (int l = 0; l < n; ++l)
                  nblk[(std::size_t)l] = Index(tpbs[(std::size_t)l].paths.size());
                do {
                  std::vector<Index> bdims((std::size_t)n);
                  bool zero = false;
                  for (int l = 0; l < n; ++l) {
                    bdims[(std::size_t)l] = tpbs[(std::size_t)l].dims[(std::size_t)bi[(std::size_t)l]];
                    if (bdims[(std::size_t)l] == 0) zero = true;
                  }
                  if (zero) continue;
                  std::vector<int> v{u[0]};
                  for (int l = n; l >= 1; --l) {
                    const std::vector<int>& ip =
                        tpbs[(std::size_t)l - 1].paths[(std::size_t)bi[(std::size_t)l - 1]];
                    v.insert(v.end(), ip.begin() + 1, ip.end());
                  }
                  const Index offT = tpbT.offsets[(std::size_t)interior_code(v, s)];
                  std::vector<Index> within((std::size_t)n, 0);
                  do {
                    Index srcf = 0, tgtf = 0;
                    for (int l = 0; l < n; ++l) {
                      srcf = srcf * tpbs[(std::size_t)l].total +
                             tpbs[(std::size_t)l].offsets[(std::size_t)bi[(std::size_t)l]] +
                             within[(std::size_t)l];
                      tgtf = tgtf * bdims[(std::size_t)l] + within[(std::size_t)l];
                    }
                    W(offT + tgtf, srcf) = 1;
                  } while (detail::next_multi(within, bdims));
                } while (detail::next_multi(bi, nblk));
              }
              Mat step4 = kron(detail::ident(o.at(psum).dim), W);
              Mat pb_entries = detail::psibar_at_stage(a, res.stages, ssum, psum, stot,
                                                       objs[(std::size_t)x], objs[(std::size_t)w]);
              Mat L = matmul(pb_entries, matmul(step4, matmul(step3, perm)));
              if (ssum < sigma) {
                // lift to the equation's target stage
                for (int t2 = ssum + 1; t2 <= sigma; ++t2)
                  L = matmul(res.stages[(std::size_t)t2 - 1].phi.at_idx(x, w).entries, L);
              }
              ks.push_back(kcol);
              ls.push_back(L);
            } while (detail::next_multi(pickv, nlegs));
          }
          if (this_missing) break;
          Mat K = ks.empty() ? Mat::Zero(cols, 0) : hstack(ks);
          Mat L = ls.empty() ? Mat::Zero(Bsig.at_idx(x, w).dim, 0) : hstack(ls);
          SolveRight<Rat> sr = solve_right(K, L);
          if (!sr.consistent) {
            if (res.cells_exact && !res.relations_skipped)
              throw std::logic_error(
                  "algebra_pushout: inconsistent structure-map equations despite exact cells");
            res.nu_total = false;
            this_missing = true;
            break;
          }
          if (!sr.unique) {
            res.nu_total = false;
            this_missing = true;
            break;
          }
          comp[(std::size_t)ci] = sr.m;
        }

      if (this_missing) continue;
      cmap.emplace(tv, std::move(comp));
    }

    std::vector<int> full((std::size_t)n, T);
    auto it = cmap.find(full);
    if (it == cmap.end()) {
      res.nu_total = false;
    } else {
      for (int x = 0; x < s; ++x)
        for (int w = 0; w < s; ++w) {
          const PairKey key{objs[(std::size_t)x], objs[(std::size_t)w]};
          const Index powtot = pow_blocks(B, n, x, w).total;
          res.b.nu[n][key] =
              lin(space(on * powtot), B.at_idx(x, w), it->second[(std::size_t)(x * s + w)]);
        }
    }
  }

  // the two legs of the square
  res.f_prime = Phi[0];
  {
    std::map<PairKey, LinMap> comp;
    const AlgPushCell* c11 = nullptr;
    for (const AlgPushCell& c : res.stages[0].cells)
      if (c.n == 1 && c.slots == std::vector<int>{1}) c11 = &c;
    if (c11 == nullptr) throw std::logic_error("algebra_pushout: arity-one cell missing");
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        const PairKey key{objs[(std::size_t)x], objs[(std::size_t)w]};
        const Index zd = Z.at_idx(x, w).dim;
        Mat m = matmul(Phi[1].at_idx(x, w).entries,
                       Mat(matmul(c11->psibar.at(key).entries,
                                  kron(o.unit.entries, detail::ident(zd)))));
        comp.emplace(key, lin(Z.at_idx(x, w), B.at_idx(x, w), m));
      }
    res.gbar_prime = SGraphMap{Z, B, std::move(comp)};
  }
  if (!graph_eq(graph_compose(res.f_prime, gbar), graph_compose(res.gbar_prime, f)))
    throw std::logic_error("algebra_pushout: the push-out square legs failed to agree");

  res.certified = res.cells_exact && res.nu_total && !res.relations_skipped;
  return res;
}

// ---- verification of the stored cells -------------------------------------

// Recompute the gluing data of every attached cell and verify the corner
// equations and the per-stage push-out squares against the stored maps.
inline CheckReport check_pushout_cells(const AlgebraPushoutResult& res) {
  CheckReport rep;
  const Algebra& a = res.base;
  const Operad& o = a.op;
  const SGraph& A = a.carrier;
  const SGraph& Z = res.cell_f.target;
  const std::vector<std::string>& objs = A.objects;
  const int s = A.n_objects();

  const SGraph* Bprev = &A;
  for (std::size_t ti = 0; ti < res.stages.size(); ++ti) {
    const AlgPushStage& st = res.stages[ti];
    const int t = int(ti) + 1;
    for (const AlgPushCell& c : st.cells) {
      const Index on = o.at(c.n).dim;
      if (on == 0) continue;
      std::vector<const SGraph*> tl((std::size_t)c.n, &A);
      for (int i : c.slots) tl[(std::size_t)i - 1] = &Z;
      for (int x = 0; x < s; ++x)
        for (int w = 0; w < s; ++w) {
          const PairKey key{objs[(std::size_t)x], objs[(std::size_t)w]};
          ProdBlocks tpb = prod_blocks(tl, x, w);
          std::vector<PPSource> pps;
          std::vector<Index> qoff;
          Index qtot = 0;
          for (std::size_t b = 0; b < tpb.paths.size(); ++b) {
            const std::vector<int>& u = tpb.paths[b];
            std::vector<LinMap> maps;
            for (int l = 1; l <= c.n; ++l) {
              const int ix = u[(std::size_t)(c.n - l)], iw = u[(std::size_t)(c.n - l + 1)];
              if (std::find(c.slots.begin(), c.slots.end(), l) != c.slots.end())
                maps.push_back(res.cell_f.at(objs[(std::size_t)ix], objs[(std::size_t)iw]));
              else
                maps.push_back(zero_map(initial_space(),
                                        A.at(objs[(std::size_t)ix], objs[(std::size_t)iw])));
            }
            pps.push_back(pp_source(maps));
            qoff.push_back(qtot);
            qtot += pps.back().object.dim;
          }
          const Mat& psi = c.psi.at(key).entries;
          // corner equations
          for (std::size_t b = 0; b < tpb.paths.size(); ++b) {
            const std::vector<int>& u = tpb.paths[b];
            for (int i : c.slots) {
              const LinMap& kappa = pps[b].kappas[(std::size_t)i - 1];
              if (on * kappa.source.dim == 0) continue;
              Mat injq = detail::block_injection(qtot, qoff[b], pps[b].object.dim);
              Mat lhs = matmul(psi, kron(detail::ident(on), Mat(matmul(injq, kappa.entries))));
              std::vector<int> rest;
              for (int r : c.slots)
                if (r != i) rest.push_back(r);
              std::vector<const SGraph*> tl2((std::size_t)c.n, &A);
              for (int r : rest) tl2[(std::size_t)r - 1] = &Z;
              ProdBlocks tpb2 = prod_blocks(tl2, x, w);
              std::vector<Mat> chain;
              for (int l = 1; l <= c.n; ++l) {
                const int ix = u[(std::size_t)(c.n - l)], iw = u[(std::size_t)(c.n - l + 1)];
                if (l == i)
                  chain.push_back(
                      res.cell_gbar.at(objs[(std::size_t)ix], objs[(std::size_t)iw]).entries);
                else
                  chain.push_back(detail::ident(tl[(std::size_t)l - 1]->at_idx(ix, iw).dim));
              }
              Mat inj2 = detail::block_injection(tpb2.total, tpb2.offsets[b], tpb2.dims[b]);
              Mat prev = detail::psibar_at_stage(a, res.stages, t - 1, c.n, rest, key.first,
                                                 key.second);
              Mat rhs = matmul(prev,
                               kron(detail::ident(on), Mat(matmul(inj2, kron_chain(chain)))));
              if (lhs != rhs)
                rep.violations.push_back("stage " + std::to_string(t) + " cell arity " +
                                         std::to_string(c.n) + ": corner " + std::to_string(i) +
                                         " disagrees at (" + key.first + ", " + key.second +
                                         "), chain " + std::to_string(b));
            }
          }
          // push-out square
          Mat odiag = Mat::Zero(tpb.total, qtot);
          for (std::size_t b = 0; b < tpb.paths.size(); ++b) {
            if (pps[b].object.dim == 0) continue;
            odiag.block(tpb.offsets[b], qoff[b], tpb.dims[b], pps[b].object.dim) =
                pps[b].odot.entries;
          }
          Mat lhs = matmul(st.phi.at(key.first, key.second).entries, psi);
          Mat rhs = matmul(c.psibar.at(key).entries, kron(detail::ident(on), odiag));
          if (lhs != rhs)
            rep.violations.push_back("stage " + std::to_string(t) + " cell arity " +
                                     std::to_string(c.n) + ": push-out square fails at (" +
                                     key.first + ", " + key.second + ")");
        }
    }
    Bprev = &st.obj;
  }
  (void)Bprev;
  return rep;
}

// ---- the universal property -----------------------------------------------

// The unique carrier map B -> B2 agreeing with a cocone (f2 on the input
// algebra, gbar2 on the attached graph) over a target algebra B2. Solved
// stage by stage from the covering families.
inline SGraphMap algebra_induced_morphism(const AlgebraPushoutResult& res, const Algebra& b2,
                                          const SGraphMap& f2, const SGraphMap& gbar2) {
  const Algebra& a = res.base;
  const Operad& o = a.op;
  const SGraph& A = a.carrier;
  const SGraph& Z = res.cell_f.target;
  require_same_objects(A, b2.carrier, "algebra_induced_morphism");
  const int N = std::min(res.n_max, o.max_arity);
  if (b2.max_arity < N)
    throw DomainMismatch(
        "algebra_induced_morphism: the cocone algebra's structure maps do not reach the "
        "push-out's arity bound");
  if (!graph_dims_eq(f2.source, A) || !graph_dims_eq(f2.target, b2.carrier) ||
      !graph_dims_eq(gbar2.source, Z) || !graph_dims_eq(gbar2.target, b2.carrier))
    throw DomainMismatch("algebra_induced_morphism: cocone legs have the wrong shapes");
  if (!graph_eq(graph_compose(f2, res.cell_gbar), graph_compose(gbar2, res.cell_f)))
    throw IncompatibleCocone(
        "algebra_induced_morphism: the legs do not agree on the attaching source");

  const std::vector<std::string>& objs = A.objects;
  const int s = A.n_objects();
  SGraphMap h = f2;
  for (std::size_t ti = 0; ti < res.stages.size(); ++ti) {
    const AlgPushStage& st = res.stages[ti];
    std::map<PairKey, LinMap> comp;
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        const PairKey key{objs[(std::size_t)x], objs[(std::size_t)w]};
        std::vector<Mat> ks{st.phi.at(key.first, key.second).entries};
        std::vector<Mat> ls{h.at(key.first, key.second).entries};
        for (const AlgPushCell& c : st.cells) {
          const Index on = o.at(c.n).dim;
          std::vector<const SGraph*> tl((std::size_t)c.n, &A);
          for (int i : c.slots) tl[(std::size_t)i - 1] = &Z;
          ProdBlocks tpb = prod_blocks(tl, x, w);
          ks.push_back(c.psibar.at(key).entries);
          ProdBlocks pb2 = pow_blocks(b2.carrier, c.n, x, w);
          Mat ch = Mat::Zero(pb2.total, tpb.total);
          for (std::size_t b = 0; b < tpb.paths.size(); ++b) {
            if (tpb.dims[b] == 0 || pb2.dims[b] == 0) continue;
            const std::vector<int>& u = tpb.paths[b];
            std::vector<Mat> chain;
            for (int l = 1; l <= c.n; ++l) {
              const int ix = u[(std::size_t)(c.n - l)], iw = u[(std::size_t)(c.n - l + 1)];
              const std::string& px = objs[(std::size_t)ix];
              const std::string& pw = objs[(std::size_t)iw];
              if (std::find(c.slots.begin(), c.slots.end(), l) != c.slots.end())
                chain.push_back(gbar2.at(px, pw).entries);
              else
                chain.push_back(f2.at(px, pw).entries);
            }
            ch.block(pb2.offsets[b], tpb.offsets[b], pb2.dims[b], tpb.dims[b]) =
                kron_chain(chain);
          }
          ls.push_back(matmul(b2.nu_at_idx(c.n, x, w).entries,
                              kron(detail::ident(on), ch)));
        }
        SolveRight<Rat> sr = solve_right(hstack(ks), hstack(ls));
        if (!sr.consistent)
          throw IncompatibleCocone(
              "algebra_induced_morphism: the legs are incompatible with an attached cell");
        if (!sr.unique)
          throw std::logic_error(
              "algebra_induced_morphism: stage covering failed to be jointly epic");
        comp.emplace(key, lin(st.obj.at(key.first, key.second),
                              b2.carrier.at(key.first, key.second), sr.m));
      }
    h = SGraphMap{st.obj, b2.carrier, std::move(comp)};
  }
  return h;
}

// ---- change of operad -----------------------------------------------------

// Pull an algebra back along an operad map: same carrier, structure maps
// precomposed with the map's components.
inline Algebra restrict_algebra(const OperadMap& phi, const Algebra& b) {
  Algebra out;
  out.op = phi.source;
  out.carrier = b.carrier;
  out.max_arity = std::min({phi.source.max_arity, phi.target.max_arity, b.max_arity});
  const int s = b.carrier.n_objects();
  for (int n = 0; n <= out.max_arity; ++n) {
    const Index on = phi.source.at(n).dim;
    if (on == 0) continue;
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        const Index powtot = pow_blocks(b.carrier, n, x, w).total;
        if (powtot == 0 || b.carrier.at_idx(x, w).dim == 0) continue;
        Mat m = matmul(b.nu_at_idx(n, x, w).entries,
                       kron(phi.at(n).entries, detail::ident(powtot)));
        set_nu(out, n, b.carrier.objects[(std::size_t)x], b.carrier.objects[(std::size_t)w],
               lin(space(on * powtot), b.carrier.at_idx(x, w), m));
      }
  }
  return out;
}

// A cell presentation: the initial algebra with an ordered list of attached
// cells, each a span (f: Y -> Z, gbar: Y -> current carrier).
struct AlgebraCell {
  SGraphMap f, gbar;
};

struct AlgebraCellPresentation {
  Algebra base;
  std::vector<AlgebraCell> cells;
};

struct CellExtension {
  Algebra extended;   // over the target operad
  Algebra presented;  // the replayed algebra over the source operad
  SGraphMap unit;     // carrier map presented -> restrict_algebra(extended)
  bool certified = true;
};

// Replay a cell presentation over the target operad of an operad map, and
// produce the comparison map from the source-side replay into the pull-back
// of the result. Both replays use the same bounds.
inline CellExtension extend_cells_full(const OperadMap& phi, const AlgebraCellPresentation& pres,
                                       int n_max, int t_max) {
  const Operad& O = phi.source;
  const Operad& P = phi.target;
  if (!detail::operad_dims_eq(pres.base.op, O))
    throw DomainMismatch(
        "extend_cells: the presentation is over a different operad than the map's source");
  const std::vector<std::string>& objs = pres.base.carrier.objects;
  Algebra init = initial_algebra(O, objs);
  if (!graph_dims_eq(pres.base.carrier, init.carrier))
    throw MissingPresentation(
        "extend_cells: the presentation base must be the initial algebra on its objects");
  for (int n = 0; n <= O.max_arity; ++n)
    for (const std::string& xo : objs)
      for (const std::string& wo : objs)
        if (!map_eq(pres.base.nu_at(n, xo, wo), init.nu_at(n, xo, wo)))
          throw MissingPresentation(
              "extend_cells: the presentation base must carry the initial structure maps");

  CellExtension out;
  Algebra curO = pres.base;
  Algebra curP = initial_algebra(P, objs);
  SGraphMap eta = z_map(phi.at(0), objs);
  eta.source = curO.carrier;
  eta.target = curP.carrier;
  for (std::size_t k = 0; k < pres.cells.size(); ++k) {
    const AlgebraCell& cell = pres.cells[k];
    if (!graph_dims_eq(cell.gbar.target, curO.carrier))
      throw MissingPresentation("extend_cells: cell " + std::to_string(k) +
                                " does not attach to the replayed carrier");
    AlgebraPushoutResult rO = algebra_pushout(curO, cell.f, cell.gbar, n_max, t_max);
    SGraphMap gP = graph_compose(eta, cell.gbar);
    AlgebraPushoutResult rP = algebra_pushout(curP, cell.f, gP, n_max, t_max);
    out.certified = out.certified && rO.certified && rP.certified;
    Algebra pulled = restrict_algebra(phi, rP.b);
    eta = algebra_induced_morphism(rO, pulled, graph_compose(rP.f_prime, eta), rP.gbar_prime);
    curO = rO.b;
    curP = rP.b;
  }
  out.extended = std::move(curP);
  out.presented = std::move(curO);
  out.unit = std::move(eta);
  return out;
}

inline Algebra extend_cells(const OperadMap& phi, const AlgebraCellPresentation& pres, int n_max,
                            int t_max) {
  return extend_cells_full(phi, pres, n_max, t_max).extended;
}

inline SGraphMap adjunction_unit(const OperadMap& phi, const AlgebraCellPresentation& pres,
                                 int n_max, int t_max) {
  return extend_cells_full(phi, pres, n_max, t_max).unit;
}

}  // namespace opd
