// Graphs of hom-spaces over a fixed finite object set, the substitution
// tensor that sums over composable chains, and the structures built on it:
// central objects and the internal mapping space, endomorphism operads of a
// graph, operad algebras carried by a graph, and free algebras on a graph of
// generators.
//
// Conventions. A component of an n-fold substitution product at (x, y) is a
// direct sum over chains x = w_0 -> w_1 -> ... -> w_n = y; the factor at left
// tensor position l covers the step (w_{n-l}, w_{n-l+1}), so the leftmost
// factor covers the last step and composition reads right to left like
// function application. Chains are enumerated lexicographically in their
// interior (w_1, ..., w_{n-1}) with w_1 most significant, and chains whose
// block is zero-dimensional keep their slot in the enumeration, so a block
// index is the pure mixed-radix code of the interior. Within a block, factors
// flatten row-major with the leftmost factor most significant. The central
// tensor z(A) (x)_S M flattens componentwise to A (x) M(x, y) with A most
// significant.
#pragma once

#include <opd/errors.hpp>
#include <opd/exactcat.hpp>
#include <opd/operad.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace opd {

// ---- graphs of hom-spaces -------------------------------------------------

using PairKey = std::pair<std::string, std::string>;

// A graph of hom-spaces over an ordered finite object set: one vector space
// per ordered pair of objects, with absent components read as zero.
struct SGraph {
  std::vector<std::string> objects;
  std::map<PairKey, Space> hom;

  Space at(const std::string& x, const std::string& y) const {
    auto it = hom.find({x, y});
    return it == hom.end() ? initial_space() : it->second;
  }
  Space at_idx(int i, int j) const {
    return at(objects[(std::size_t)i], objects[(std::size_t)j]);
  }
  int n_objects() const { return int(objects.size()); }
  int obj_index(const std::string& x) const {
    for (int i = 0; i < n_objects(); ++i)
      if (objects[(std::size_t)i] == x) return i;
    throw DomainMismatch("SGraph: object '" + x + "' is not in the object set");
  }
};

inline SGraph sgraph(std::vector<std::string> objects) {
  for (std::size_t i = 0; i < objects.size(); ++i)
    for (std::size_t j = i + 1; j < objects.size(); ++j)
      if (objects[i] == objects[j])
        throw DomainMismatch("sgraph: object names must be distinct, got '" + objects[i] +
                             "' twice");
  SGraph g;
  g.objects = std::move(objects);
  return g;
}

inline void set_hom(SGraph& g, const std::string& x, const std::string& y, const Space& sp) {
  g.obj_index(x);
  g.obj_index(y);
  if (sp.dim > 0)
    g.hom[{x, y}] = sp;
  else
    g.hom.erase({x, y});
}

inline bool same_objects(const SGraph& a, const SGraph& b) { return a.objects == b.objects; }

inline void require_same_objects(const SGraph& a, const SGraph& b, const char* who) {
  if (!same_objects(a, b))
    throw ObjectSetMismatch(std::string(who) + ": graphs over different object sets combined");
}

// componentwise dimension equality (the meaningful notion of "same graph")
inline bool graph_dims_eq(const SGraph& a, const SGraph& b) {
  if (!same_objects(a, b)) return false;
  for (int i = 0; i < a.n_objects(); ++i)
    for (int j = 0; j < a.n_objects(); ++j)
      if (a.at_idx(i, j).dim != b.at_idx(i, j).dim) return false;
  return true;
}

// A map of graphs over the same object set: one linear map per component,
// with absent components read as zero.
struct SGraphMap {
  SGraph source, target;
  std::map<PairKey, LinMap> comp;

  LinMap at(const std::string& x, const std::string& y) const {
    auto it = comp.find({x, y});
    if (it != comp.end()) return it->second;
    return zero_map(source.at(x, y), target.at(x, y));
  }
  LinMap at_idx(int i, int j) const {
    return at(source.objects[(std::size_t)i], source.objects[(std::size_t)j]);
  }
};

inline SGraphMap graph_map(const SGraph& src, const SGraph& tgt, std::map<PairKey, LinMap> comp) {
  require_same_objects(src, tgt, "graph_map");
  for (const auto& [key, m] : comp) {
    src.obj_index(key.first);
    src.obj_index(key.second);
    if (m.source.dim != src.at(key.first, key.second).dim ||
        m.target.dim != tgt.at(key.first, key.second).dim)
      throw DomainMismatch("graph_map: component at (" + key.first + ", " + key.second +
                           ") does not match the graph dimensions");
  }
  return SGraphMap{src, tgt, std::move(comp)};
}

inline SGraphMap graph_identity(const SGraph& g) {
  std::map<PairKey, LinMap> comp;
  for (const auto& [key, sp] : g.hom) comp.emplace(key, identity(sp));
  return SGraphMap{g, g, std::move(comp)};
}

inline SGraphMap graph_zero(const SGraph& src, const SGraph& tgt) {
  require_same_objects(src, tgt, "graph_zero");
  return SGraphMap{src, tgt, {}};
}

inline SGraphMap graph_compose(const SGraphMap& g, const SGraphMap& f) {
  require_same_objects(f.target, g.source, "graph_compose");
  std::map<PairKey, LinMap> comp;
  for (int i = 0; i < f.source.n_objects(); ++i)
    for (int j = 0; j < f.source.n_objects(); ++j) {
      const std::string& x = f.source.objects[(std::size_t)i];
      const std::string& y = f.source.objects[(std::size_t)j];
      LinMap c = compose(g.at(x, y), f.at(x, y));
      if (c.source.dim > 0 && c.target.dim > 0) comp.emplace(PairKey{x, y}, c);
    }
  return SGraphMap{f.source, g.target, std::move(comp)};
}

// true when both maps have the same component shapes and entries
inline bool graph_eq(const SGraphMap& f, const SGraphMap& g) {
  if (!same_objects(f.source, g.source)) return false;
  for (int i = 0; i < f.source.n_objects(); ++i)
    for (int j = 0; j < f.source.n_objects(); ++j) {
      LinMap a = f.at_idx(i, j), b = g.at_idx(i, j);
      if (!same_space(a.source, b.source) || !same_space(a.target, b.target)) return false;
      if (!map_eq(a, b)) return false;
    }
  return true;
}

// ---- chain-indexed block layout -------------------------------------------

namespace detail {

// advance a mixed-radix counter; with empty dims the single combination has
// already been visited, so the first call returns false
inline bool next_multi(std::vector<Index>& v, const std::vector<Index>& dims) {
  for (std::size_t i = dims.size(); i-- > 0;) {
    if (++v[i] < dims[i]) return true;
    v[i] = 0;
  }
  return false;
}

inline Index flat_index(const std::vector<Index>& dims, const std::vector<Index>& v) {
  Index f = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) f = f * dims[i] + v[i];
  return f;
}

}  // namespace detail

// Block layout of an n-fold substitution product at one component (x, y):
// one block per chain, in interior-lexicographic order with w_1 most
// significant. fdims lists factor dimensions by left tensor position.
struct ProdBlocks {
  std::vector<std::vector<int>> paths;    // object-index chains w_0..w_n
  std::vector<std::vector<Index>> fdims;  // factor dims by left position
  std::vector<Index> offsets, dims;
  Index total = 0;
};

// block index of a chain = mixed-radix code of its interior
inline Index interior_code(const std::vector<int>& path, int n_objects) {
  Index c = 0;
  for (std::size_t j = 1; j + 1 < path.size(); ++j) c = c * n_objects + path[j];
  return c;
}

inline ProdBlocks prod_blocks(const std::vector<const SGraph*>& gs, int x, int y) {
  ProdBlocks out;
  const int n = int(gs.size());
  if (n == 0) {
    if (x == y) {
      out.paths.push_back({x});
      out.fdims.push_back({});
      out.offsets.push_back(0);
      out.dims.push_back(1);
      out.total = 1;
    }
    return out;
  }
  const int s = gs[0]->n_objects();
  for (int l = 1; l < n; ++l)
    if (gs[(std::size_t)l]->n_objects() != s)
      throw ObjectSetMismatch("prod_blocks: graphs over different object sets combined");
  Index count = 1;
  for (int j = 0; j + 1 < n; ++j) count *= s;
  std::vector<int> w((std::size_t)n + 1);
  w[0] = x;
  w[(std::size_t)n] = y;
  for (Index code = 0; code < count; ++code) {
    Index c = code;
    for (int j = n - 1; j >= 1; --j) {
      w[(std::size_t)j] = int(c % s);
      c /= s;
    }
    std::vector<Index> fd((std::size_t)n);
    Index d = 1;
    for (int l = 1; l <= n; ++l) {
      fd[(std::size_t)l - 1] = gs[(std::size_t)l - 1]->at_idx(w[(std::size_t)(n - l)],
                                                              w[(std::size_t)(n - l + 1)]).dim;
      d *= fd[(std::size_t)l - 1];
    }
    out.paths.push_back(w);
    out.fdims.push_back(std::move(fd));
    out.offsets.push_back(out.total);
    out.dims.push_back(d);
    out.total += d;
  }
  return out;
}

inline ProdBlocks pow_blocks(const SGraph& g, int n, int x, int y) {
  std::vector<const SGraph*> gs((std::size_t)n, &g);
  return prod_blocks(gs, x, y);
}

// ---- substitution tensor --------------------------------------------------

inline SGraph tensor_S_obj(const std::vector<const SGraph*>& gs,
                           const std::vector<std::string>& objects) {
  SGraph out = sgraph(objects);
  for (const SGraph* g : gs)
    if (g->objects != objects)
      throw ObjectSetMismatch("tensor_S: graphs over different object sets combined");
  const int s = int(objects.size());
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Index d = prod_blocks(gs, i, j).total;
      if (d > 0) out.hom[{objects[(std::size_t)i], objects[(std::size_t)j]}] = space(d);
    }
  return out;
}

inline SGraph tensor_S(const SGraph& m, const SGraph& n) {
  require_same_objects(m, n, "tensor_S");
  return tensor_S_obj({&m, &n}, m.objects);
}

inline SGraph unit_graph(const std::vector<std::string>& objects) {
  SGraph g = sgraph(objects);
  for (const std::string& x : objects) g.hom[{x, x}] = unit_space();
  return g;
}

inline SGraphMap tensor_S_maps(const std::vector<const SGraphMap*>& fs,
                               const std::vector<std::string>& objects) {
  std::vector<const SGraph*> srcs, tgts;
  for (const SGraphMap* f : fs) {
    srcs.push_back(&f->source);
    tgts.push_back(&f->target);
  }
  SGraph src = tensor_S_obj(srcs, objects);
  SGraph tgt = tensor_S_obj(tgts, objects);
  const int s = int(objects.size());
  const int n = int(fs.size());
  std::map<PairKey, LinMap> comp;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      ProdBlocks sb = prod_blocks(srcs, i, j);
      ProdBlocks tb = prod_blocks(tgts, i, j);
      if (sb.total == 0 || tb.total == 0) continue;
      Mat m = Mat::Zero(tb.total, sb.total);
      for (std::size_t b = 0; b < sb.paths.size(); ++b) {
        if (sb.dims[b] == 0 || tb.dims[b] == 0) continue;
        const std::vector<int>& w = sb.paths[b];
        std::vector<Mat> chain;
        for (int l = 1; l <= n; ++l)
          chain.push_back(fs[(std::size_t)l - 1]
                              ->at_idx(w[(std::size_t)(n - l)], w[(std::size_t)(n - l + 1)])
                              .entries);
        m.block(tb.offsets[b], sb.offsets[b], tb.dims[b], sb.dims[b]) = kron_chain(chain);
      }
      comp.emplace(PairKey{objects[(std::size_t)i], objects[(std::size_t)j]},
                   lin(space(sb.total), space(tb.total), m));
    }
  return SGraphMap{std::move(src), std::move(tgt), std::move(comp)};
}

inline SGraphMap tensor_S_map(const SGraphMap& f, const SGraphMap& g) {
  require_same_objects(f.source, g.source, "tensor_S_map");
  return tensor_S_maps({&f, &g}, f.source.objects);
}

// right adjoint of (m (x)_S -): component (x, y) is the product over z of
// Hom(m(y, z), p(x, z))
inline SGraph hom_l(const SGraph& m, const SGraph& p) {
  require_same_objects(m, p, "hom_l");
  SGraph out = sgraph(m.objects);
  const int s = m.n_objects();
  for (int x = 0; x < s; ++x)
    for (int y = 0; y < s; ++y) {
      Index d = 0;
      for (int z = 0; z < s; ++z) d += m.at_idx(y, z).dim * p.at_idx(x, z).dim;
      if (d > 0) out.hom[{m.objects[(std::size_t)x], m.objects[(std::size_t)y]}] = space(d);
    }
  return out;
}

// right adjoint of (- (x)_S n): component (x, y) is the product over z of
// Hom(n(z, x), p(z, y))
inline SGraph hom_r(const SGraph& n, const SGraph& p) {
  require_same_objects(n, p, "hom_r");
  SGraph out = sgraph(n.objects);
  const int s = n.n_objects();
  for (int x = 0; x < s; ++x)
    for (int y = 0; y < s; ++y) {
      Index d = 0;
      for (int z = 0; z < s; ++z) d += n.at_idx(z, x).dim * p.at_idx(z, y).dim;
      if (d > 0) out.hom[{n.objects[(std::size_t)x], n.objects[(std::size_t)y]}] = space(d);
    }
  return out;
}

// ---- central objects and the mapping space --------------------------------

// the graph with a on every diagonal component
inline SGraph z_of(const Space& a, const std::vector<std::string>& objects) {
  SGraph g = sgraph(objects);
  if (a.dim > 0)
    for (const std::string& x : objects) g.hom[{x, x}] = a;
  return g;
}

inline SGraphMap z_map(const LinMap& f, const std::vector<std::string>& objects) {
  SGraph src = z_of(f.source, objects);
  SGraph tgt = z_of(f.target, objects);
  std::map<PairKey, LinMap> comp;
  if (f.source.dim > 0 && f.target.dim > 0)
    for (const std::string& x : objects) comp.emplace(PairKey{x, x}, f);
  return SGraphMap{std::move(src), std::move(tgt), std::move(comp)};
}

// the braiding z(a) (x)_S m -> m (x)_S z(a), componentwise the symmetry of
// vector spaces
inline SGraphMap zeta(const Space& a, const SGraph& m) {
  SGraph za = z_of(a, m.objects);
  SGraph src = tensor_S(za, m);
  SGraph tgt = tensor_S(m, za);
  std::map<PairKey, LinMap> comp;
  for (int i = 0; i < m.n_objects(); ++i)
    for (int j = 0; j < m.n_objects(); ++j) {
      Space mc = m.at_idx(i, j);
      if (a.dim * mc.dim == 0) continue;
      comp.emplace(PairKey{m.objects[(std::size_t)i], m.objects[(std::size_t)j]},
                   symmetry(a, mc));
    }
  return SGraphMap{std::move(src), std::move(tgt), std::move(comp)};
}

// layout of the mapping space of two graphs: one Hom block per component
// pair, enumerated x-major
struct HomCLayout {
  std::vector<Index> offsets;  // indexed x * n_objects + y
  Index total = 0;
};

inline HomCLayout hom_C_layout(const SGraph& y, const SGraph& z) {
  require_same_objects(y, z, "hom_C");
  HomCLayout lay;
  const int s = y.n_objects();
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      lay.offsets.push_back(lay.total);
      lay.total += y.at_idx(i, j).dim * z.at_idx(i, j).dim;
    }
  return lay;
}

inline Space hom_C(const SGraph& y, const SGraph& z) { return space(hom_C_layout(y, z).total); }

// transpose a graph map z(a) (x)_S y -> z into a -> hom_C(y, z)
inline LinMap curry_C(const SGraphMap& f, const Space& a, const SGraph& y) {
  const SGraph& z = f.target;
  require_same_objects(y, z, "curry_C");
  HomCLayout lay = hom_C_layout(y, z);
  std::vector<Mat> parts;
  const int s = y.n_objects();
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Space yc = y.at_idx(i, j), zc = z.at_idx(i, j);
      LinMap comp = f.at(y.objects[(std::size_t)i], y.objects[(std::size_t)j]);
      if (comp.source.dim != a.dim * yc.dim || comp.target.dim != zc.dim)
        throw DomainMismatch("curry_C: component shapes do not match z(a) (x)_S y -> z");
      parts.push_back(curry(lin(tensor_obj(a, yc), zc, comp.entries), a, yc).entries);
    }
  return lin(a, space(lay.total), vstack(parts));
}

// transpose a -> hom_C(y, z) into a graph map z(a) (x)_S y -> z
inline SGraphMap uncurry_C(const LinMap& g, const SGraph& y, const SGraph& z) {
  HomCLayout lay = hom_C_layout(y, z);
  if (g.target.dim != lay.total)
    throw DomainMismatch("uncurry_C: target dimension does not match hom_C(y, z)");
  const Space a = g.source;
  SGraph src = tensor_S(z_of(a, y.objects), y);
  std::map<PairKey, LinMap> comp;
  const int s = y.n_objects();
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Space yc = y.at_idx(i, j), zc = z.at_idx(i, j);
      if (a.dim * yc.dim == 0 || zc.dim == 0) continue;
      Mat block = g.entries.middleRows(lay.offsets[(std::size_t)(i * s + j)], yc.dim * zc.dim);
      comp.emplace(PairKey{y.objects[(std::size_t)i], y.objects[(std::size_t)j]},
                   uncurry(lin(a, hom_space(yc, zc), block), yc, zc));
    }
  return SGraphMap{std::move(src), z, std::move(comp)};
}

// the counit of the transpose bijection: z(hom_C(y, z)) (x)_S y -> z
inline SGraphMap evaluation(const SGraph& y, const SGraph& z) {
  return uncurry_C(identity(hom_C(y, z)), y, z);
}

// ---- endomorphism operad --------------------------------------------------

namespace detail {

// per-arity layout of the endomorphism operad of a graph: for each component
// pair (x-major) a Hom block from the n-fold power at that pair to the graph
struct EndLayout {
  std::vector<std::vector<ProdBlocks>> pb;  // [x][w] power blocks
  std::vector<std::vector<Index>> off;      // [x][w] block offsets
  Index total = 0;
};

inline EndLayout end_layout(const SGraph& y, int n) {
  EndLayout lay;
  const int s = y.n_objects();
  lay.pb.resize((std::size_t)s);
  lay.off.resize((std::size_t)s);
  for (int x = 0; x < s; ++x) {
    lay.pb[(std::size_t)x].reserve((std::size_t)s);
    for (int w = 0; w < s; ++w) {
      lay.pb[(std::size_t)x].push_back(pow_blocks(y, n, x, w));
      lay.off[(std::size_t)x].push_back(lay.total);
      lay.total += lay.pb[(std::size_t)x].back().total * y.at_idx(x, w).dim;
    }
  }
  return lay;
}

}  // namespace detail

// The endomorphism operad of a graph: arity n is the mapping space from the
// n-fold substitution power to the graph, the unit is the identity element,
// and the partial compositions substitute one operation into a slot of
// another. Each partial-composition matrix is a 0/1 matrix with at most one
// entry per column, written by direct index arithmetic over chains.
inline Operad end_operad(const SGraph& y, int max_arity) {
  if (max_arity < 0) throw ArityMismatch("end_operad: max_arity must be nonnegative");
  const int s = y.n_objects();
  std::vector<detail::EndLayout> lay;
  lay.reserve((std::size_t)max_arity + 1);
  for (int k = 0; k <= max_arity; ++k) lay.push_back(detail::end_layout(y, k));

  Operad op;
  op.max_arity = max_arity;
  for (int k = 0; k <= max_arity; ++k)
    if (lay[(std::size_t)k].total > 0) op.seq.comp[k] = space(lay[(std::size_t)k].total);

  // unit: the identity element of the arity-1 mapping space
  if (max_arity >= 1) {
    Mat u = Mat::Zero(lay[1].total, 1);
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        const Index d = y.at_idx(x, w).dim;
        for (Index i = 0; i < d; ++i) u(lay[1].off[(std::size_t)x][(std::size_t)w] + i * d + i, 0) = 1;
      }
    op.unit = lin(unit_space(), space(lay[1].total), u);
  } else {
    op.unit = lin(unit_space(), initial_space(), Mat::Zero(0, 1));
  }

  for (int m = 1; m <= max_arity; ++m)
    for (int n = 0; n <= max_arity; ++n) {
      const int k = m + n - 1;
      if (k < 0 || k > max_arity) continue;
      const Index rows = lay[(std::size_t)k].total;
      const Index cols = lay[(std::size_t)m].total * lay[(std::size_t)n].total;
      if (rows == 0 || cols == 0) continue;
      for (int i = 1; i <= m; ++i) {
        Mat big = Mat::Zero(rows, cols);
        for (int x = 0; x < s; ++x)
          for (int w = 0; w < s; ++w) {
            const detail::EndLayout& Lk = lay[(std::size_t)k];
            const ProdBlocks& pbk = Lk.pb[(std::size_t)x][(std::size_t)w];
            const Index ydim = y.at_idx(x, w).dim;
            for (std::size_t b = 0; b < pbk.paths.size(); ++b) {
              if (pbk.dims[b] == 0) continue;
              const std::vector<int>& u = pbk.paths[b];
              const std::vector<Index>& F = pbk.fdims[b];
              const int a = u[(std::size_t)(m - i)];
              const int bb = u[(std::size_t)(m + n - i)];
              const Index yab = y.at_idx(a, bb).dim;
              if (yab == 0 && n > 0) continue;  // the inserted output must exist
              // locate the inner chain in the arity-n layout
              const ProdBlocks& pbn = lay[(std::size_t)n].pb[(std::size_t)a][(std::size_t)bb];
              std::vector<int> mid(u.begin() + (m - i), u.begin() + (m + n - i) + 1);
              if (n == 0) mid = {a};
              const Index o_mid = pbn.offsets[(std::size_t)interior_code(mid, s)];
              // locate the contracted chain in the arity-m layout
              const ProdBlocks& pbm = lay[(std::size_t)m].pb[(std::size_t)x][(std::size_t)w];
              std::vector<int> con(u.begin(), u.begin() + (m - i) + 1);
              con.insert(con.end(), u.begin() + (m + n - i), u.end());
              const Index o_con = pbm.offsets[(std::size_t)interior_code(con, s)];
              // factor dimensions of the inner and contracted blocks
              std::vector<Index> Fmid(F.begin() + (i - 1), F.begin() + (i - 1) + n);
              std::vector<Index> Fcon(F.begin(), F.begin() + (i - 1));
              Fcon.push_back(yab);
              Fcon.insert(Fcon.end(), F.begin() + (i - 1) + n, F.end());
              std::vector<Index> v(F.size(), 0);
              do {
                std::vector<Index> vmid(v.begin() + (i - 1), v.begin() + (i - 1) + n);
                const Index fb = detail::flat_index(F, v);
                const Index fmid = detail::flat_index(Fmid, vmid);
                for (Index it_ = 0; it_ < yab; ++it_) {
                  std::vector<Index> vcon(v.begin(), v.begin() + (i - 1));
                  vcon.push_back(it_);
                  vcon.insert(vcon.end(), v.begin() + (i - 1) + n, v.end());
                  const Index fcon = detail::flat_index(Fcon, vcon);
                  const Index e_n = lay[(std::size_t)n].off[(std::size_t)a][(std::size_t)bb] +
                                    it_ * pbn.total + o_mid + fmid;
                  for (Index I = 0; I < ydim; ++I) {
                    const Index row = Lk.off[(std::size_t)x][(std::size_t)w] + I * pbk.total +
                                      pbk.offsets[b] + fb;
                    const Index e_m = lay[(std::size_t)m].off[(std::size_t)x][(std::size_t)w] +
                                      I * pbm.total + o_con + fcon;
                    big(row, e_m * lay[(std::size_t)n].total + e_n) = 1;
                  }
                }
              } while (detail::next_multi(v, F));
            }
          }
        op.circ.emplace(Key3{m, i, n},
                        lin(space(cols), space(rows), big));
      }
    }
  return op;
}

// ---- algebras over an operad ----------------------------------------------

// An algebra over an operad, carried by a graph: for each arity n a structure
// morphism from z(O(n)) (x)_S (n-fold power of the carrier) to the carrier,
// stored componentwise. Absent components and arities are zero.
struct Algebra {
  Operad op;
  SGraph carrier;
  std::map<int, std::map<PairKey, LinMap>> nu;
  int max_arity = 0;

  LinMap nu_at(int n, const std::string& x, const std::string& y) const {
    auto itn = nu.find(n);
    if (itn != nu.end()) {
      auto itp = itn->second.find({x, y});
      if (itp != itn->second.end()) return itp->second;
    }
    const int xi = carrier.obj_index(x), yi = carrier.obj_index(y);
    const Index pow_tot = pow_blocks(carrier, n, xi, yi).total;
    return zero_map(space(op.at(n).dim * pow_tot), carrier.at(x, y));
  }
  LinMap nu_at_idx(int n, int i, int j) const {
    return nu_at(n, carrier.objects[(std::size_t)i], carrier.objects[(std::size_t)j]);
  }
};

inline void set_nu(Algebra& a, int n, const std::string& x, const std::string& y,
                   const LinMap& m) {
  if (m.source.dim > 0 && m.target.dim > 0) a.nu[n][{x, y}] = m;
}

// Verify the two structure diagrams of an algebra up to the requested arity:
// the unit acts as the identity, and acting by a partial composition agrees
// with acting in two stages. Structure-map shape problems are reported too.
inline CheckReport check_algebra(const Algebra& a, int max_arity) {
  if (max_arity > a.max_arity || max_arity > a.op.max_arity)
    throw ArityMismatch("check_algebra: requested bound exceeds the algebra's max_arity");
  CheckReport rep;
  const SGraph& y = a.carrier;
  const Operad& o = a.op;
  const int s = y.n_objects();

  // shapes
  for (const auto& [n, comps] : a.nu)
    for (const auto& [key, m] : comps) {
      const int xi = y.obj_index(key.first), wi = y.obj_index(key.second);
      const Index want_src = o.at(n).dim * pow_blocks(y, n, xi, wi).total;
      if (m.source.dim != want_src || m.target.dim != y.at(key.first, key.second).dim)
        rep.violations.push_back("structure map at arity " + std::to_string(n) + ", component (" +
                                 key.first + ", " + key.second + ") has the wrong shape");
    }
  if (!rep.violations.empty()) return rep;

  // unit diagram
  for (int x = 0; x < s; ++x)
    for (int w = 0; w < s; ++w) {
      const Index d = y.at_idx(x, w).dim;
      if (d == 0) continue;
      Mat lhs = matmul(a.nu_at_idx(1, x, w).entries, kron(o.unit.entries, Mat(Mat::Identity(d, d))));
      if (lhs != Mat(Mat::Identity(d, d)))
        rep.violations.push_back("unit action is not the identity at component (" +
                                 y.objects[(std::size_t)x] + ", " + y.objects[(std::size_t)w] + ")");
    }

  // composition diagrams
  for (int m = 1; m <= max_arity; ++m)
    for (int n = 0; n <= max_arity; ++n) {
      const int k = m + n - 1;
      if (k < 0 || k > max_arity) continue;
      const Index om = o.at(m).dim, on = o.at(n).dim;
      if (om == 0 || on == 0) continue;
      for (int i = 1; i <= m; ++i) {
        const LinMap circ = o.circ_at(m, i, n);
        for (int x = 0; x < s; ++x)
          for (int w = 0; w < s; ++w) {
            ProdBlocks pbk = pow_blocks(y, k, x, w);
            ProdBlocks pbm = pow_blocks(y, m, x, w);
            const LinMap nu_k = a.nu_at_idx(k, x, w);
            const LinMap nu_m = a.nu_at_idx(m, x, w);
            for (std::size_t b = 0; b < pbk.paths.size(); ++b) {
              if (pbk.dims[b] == 0) continue;
              const std::vector<int>& u = pbk.paths[b];
              const std::vector<Index>& F = pbk.fdims[b];
              const int aa = u[(std::size_t)(m - i)];
              const int bb = u[(std::size_t)(m + n - i)];
              const Index yab = y.at_idx(aa, bb).dim;
              // one way: compose the operations first
              Mat inj_b = Mat::Zero(pbk.total, pbk.dims[b]);
              inj_b.block(pbk.offsets[b], 0, pbk.dims[b], pbk.dims[b]) =
                  Mat::Identity(pbk.dims[b], pbk.dims[b]);
              Mat lhs = matmul(nu_k.entries, kron(circ.entries, inj_b));
              // other way: act on the inner window first
              ProdBlocks pbn = pow_blocks(y, n, aa, bb);
              std::vector<int> mid(u.begin() + (m - i), u.begin() + (m + n - i) + 1);
              if (n == 0) mid = {aa};
              const Index o_mid = pbn.offsets[(std::size_t)interior_code(mid, s)];
              std::vector<int> con(u.begin(), u.begin() + (m - i) + 1);
              con.insert(con.end(), u.begin() + (m + n - i), u.end());
              const Index o_con = pbm.offsets[(std::size_t)interior_code(con, s)];
              Index pre = 1, midd = 1, post = 1;
              for (int l = 1; l <= i - 1; ++l) pre *= F[(std::size_t)l - 1];
              for (int l = i; l <= i + n - 1; ++l) midd *= F[(std::size_t)l - 1];
              for (int l = i + n; l <= k; ++l) post *= F[(std::size_t)l - 1];
              std::vector<Space> fs{o.at(m), o.at(n)};
              for (Index fd : F) fs.push_back(space(fd));
              std::vector<int> dst(fs.size());
              dst[0] = 0;
              dst[1] = i;
              for (int l = 1; l <= k; ++l) dst[(std::size_t)(1 + l)] = l <= i - 1 ? l : l + 1;
              LinMap perm = factor_perm(fs, dst);
              Mat inj_mid = Mat::Zero(pbn.total, midd);
              if (midd > 0)
                inj_mid.block(o_mid, 0, midd, midd) = Mat::Identity(midd, midd);
              Mat inner = matmul(a.nu_at_idx(n, aa, bb).entries,
                                 kron(Mat(Mat::Identity(on, on)), inj_mid));
              Mat mid_chain = kron_chain(std::vector<Mat>{
                  Mat(Mat::Identity(om * pre, om * pre)), inner,
                  Mat(Mat::Identity(post, post))});
              const Index dcon = pre * yab * post;
              Mat inj_con = Mat::Zero(pbm.total, dcon);
              if (dcon > 0)
                inj_con.block(o_con, 0, dcon, dcon) = Mat::Identity(dcon, dcon);
              Mat rhs = matmul(nu_m.entries,
                               matmul(kron(Mat(Mat::Identity(om, om)), inj_con),
                                      matmul(mid_chain, perm.entries)));
              if (lhs != rhs)
                rep.violations.push_back(
                    "two-stage action disagrees at arities (" + std::to_string(m) + "," +
                    std::to_string(n) + "), slot " + std::to_string(i) + ", component (" +
                    y.objects[(std::size_t)x] + ", " + y.objects[(std::size_t)w] + "), chain " +
                    std::to_string(b));
            }
          }
      }
    }
  return rep;
}

// Verify that a graph map between the carriers of two algebras over the same
// operad intertwines the structure maps up to the requested arity.
inline CheckReport check_algebra_map(const Algebra& a, const Algebra& b, const SGraphMap& h,
                                     int max_arity) {
  require_same_objects(a.carrier, b.carrier, "check_algebra_map");
  CheckReport rep;
  const int s = a.carrier.n_objects();
  const int bound = std::min({max_arity, a.max_arity, b.max_arity, a.op.max_arity});
  for (int n = 0; n <= bound; ++n) {
    const Index on = a.op.at(n).dim;
    if (on == 0) continue;
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        ProdBlocks pa = pow_blocks(a.carrier, n, x, w);
        ProdBlocks pb = pow_blocks(b.carrier, n, x, w);
        const LinMap nu_a = a.nu_at_idx(n, x, w);
        const LinMap nu_b = b.nu_at_idx(n, x, w);
        const LinMap hxw = h.at_idx(x, w);
        for (std::size_t blk = 0; blk < pa.paths.size(); ++blk) {
          if (pa.dims[blk] == 0) continue;
          const std::vector<int>& u = pa.paths[blk];
          Mat inj_a = Mat::Zero(pa.total, pa.dims[blk]);
          inj_a.block(pa.offsets[blk], 0, pa.dims[blk], pa.dims[blk]) =
              Mat::Identity(pa.dims[blk], pa.dims[blk]);
          Mat lhs = matmul(hxw.entries, matmul(nu_a.entries, kron(Mat(Mat::Identity(on, on)), inj_a)));
          std::vector<Mat> chain;
          for (int l = 1; l <= n; ++l)
            chain.push_back(h.at_idx(u[(std::size_t)(n - l)], u[(std::size_t)(n - l + 1)]).entries);
          Mat hblk = kron_chain(chain);
          Mat inj_b = Mat::Zero(pb.total, pb.dims[blk]);
          if (pb.dims[blk] > 0)
            inj_b.block(pb.offsets[blk], 0, pb.dims[blk], pb.dims[blk]) =
                Mat::Identity(pb.dims[blk], pb.dims[blk]);
          Mat rhs = matmul(nu_b.entries,
                           kron(Mat(Mat::Identity(on, on)), Mat(matmul(inj_b, hblk))));
          if (lhs != rhs)
            rep.violations.push_back("carrier map fails to intertwine the action at arity " +
                                     std::to_string(n) + ", component (" +
                                     a.carrier.objects[(std::size_t)x] + ", " +
                                     a.carrier.objects[(std::size_t)w] + "), chain " +
                                     std::to_string(blk));
        }
      }
  }
  return rep;
}

// ---- algebras as operad maps into the endomorphism operad -----------------

// transpose the structure maps into an operad map O -> End(carrier)
inline OperadMap opmap_from_algebra(const Algebra& a) {
  OperadMap f;
  f.source = a.op;
  f.target = end_operad(a.carrier, std::max(1, a.max_arity));
  const int s = a.carrier.n_objects();
  for (int n = 0; n <= a.max_arity; ++n) {
    const Index on = a.op.at(n).dim;
    const Index end_n = f.target.at(n).dim;
    if (on == 0 || end_n == 0) continue;
    std::vector<Mat> parts;
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        Space powsp = space(pow_blocks(a.carrier, n, x, w).total);
        Space yc = a.carrier.at_idx(x, w);
        LinMap comp = lin(tensor_obj(a.op.at(n), powsp), yc, a.nu_at_idx(n, x, w).entries);
        parts.push_back(curry(comp, a.op.at(n), powsp).entries);
      }
    f.comp.emplace(n, lin(a.op.at(n), space(end_n), vstack(parts)));
  }
  return f;
}

// read an algebra off an operad map whose target is the endomorphism operad
// of the given carrier
inline Algebra algebra_from_opmap(const OperadMap& f, const SGraph& carrier) {
  Algebra a;
  a.op = f.source;
  a.carrier = carrier;
  a.max_arity = std::min(f.source.max_arity, f.target.max_arity);
  const int s = carrier.n_objects();
  for (int n = 0; n <= a.max_arity; ++n) {
    detail::EndLayout lay = detail::end_layout(carrier, n);
    if (f.target.at(n).dim != lay.total)
      throw DomainMismatch(
          "algebra_from_opmap: target arity " + std::to_string(n) +
          " does not match the endomorphism operad of the carrier");
    const Index on = f.source.at(n).dim;
    if (on == 0 || lay.total == 0) continue;
    const LinMap fn = f.at(n);
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        Space yc = carrier.at_idx(x, w);
        Space powsp = space(lay.pb[(std::size_t)x][(std::size_t)w].total);
        if (yc.dim * powsp.dim == 0) continue;
        Mat block = fn.entries.middleRows(lay.off[(std::size_t)x][(std::size_t)w],
                                          powsp.dim * yc.dim);
        LinMap g = lin(f.source.at(n), hom_space(powsp, yc), block);
        set_nu(a, n, carrier.objects[(std::size_t)x], carrier.objects[(std::size_t)w],
               uncurry(g, powsp, yc));
      }
  }
  return a;
}

// ---- free algebras --------------------------------------------------------

// simultaneous composition as the full collapse of a two-level tree: source
// factors are O(n), O(p_1), ..., O(p_n) in that order
inline LinMap mu_tree(const Operad& o, int n, const std::vector<int>& ps) {
  if (int(ps.size()) != n) throw ArityMismatch("mu_tree: need one inner arity per slot");
  std::vector<Tree> kids;
  kids.reserve(ps.size());
  for (int p : ps) kids.push_back(corolla(p));
  return eval_full_contraction(o, tree_inner(std::move(kids)));
}

// the initial algebra: the carrier has O(0) on the diagonal, and every
// operation acts through the simultaneous composition into arity zero
inline Algebra initial_algebra(const Operad& o, const std::vector<std::string>& objects) {
  Algebra a;
  a.op = o;
  a.carrier = z_of(o.at(0), objects);
  a.max_arity = o.max_arity;
  const Index d0 = o.at(0).dim;
  if (d0 == 0) return a;
  for (int n = 0; n <= o.max_arity; ++n) {
    if (o.at(n).dim == 0) continue;
    LinMap mu = mu_tree(o, n, std::vector<int>((std::size_t)n, 0));
    for (const std::string& x : objects)
      set_nu(a, n, x, x, lin(mu.source, o.at(0), mu.entries));
  }
  return a;
}

// The free algebra on a graph of generators, graded by the number of
// generator factors and truncated above p_max. Components are laid out grade
// by grade; within a grade the operation factor is most significant, then the
// chain blocks of the generator power. The `exact` flag records whether any
// grade above p_max could carry content.
struct FreeAlgebraData {
  Algebra alg;
  SGraph gens;
  int p_max = 0;
  bool exact = true;
  std::map<PairKey, std::vector<Index>> grade_off;  // per component, with a total sentinel
};

inline FreeAlgebraData free_algebra(const Operad& o, const SGraph& y, int p_max) {
  if (p_max < 0) throw DomainMismatch("free_algebra: p_max must be >= 0");
  FreeAlgebraData out;
  out.gens = y;
  out.p_max = p_max;
  const int s = y.n_objects();

  // power-block tables of the generator graph, per component and grade
  std::vector<std::vector<std::vector<ProdBlocks>>> pb((std::size_t)s);
  for (int x = 0; x < s; ++x) {
    pb[(std::size_t)x].resize((std::size_t)s);
    for (int w = 0; w < s; ++w)
      for (int p = 0; p <= p_max; ++p)
        pb[(std::size_t)x][(std::size_t)w].push_back(pow_blocks(y, p, x, w));
  }

  // carrier and grade offsets
  SGraph carrier = sgraph(y.objects);
  for (int x = 0; x < s; ++x)
    for (int w = 0; w < s; ++w) {
      std::vector<Index> off;
      Index acc = 0;
      for (int p = 0; p <= p_max; ++p) {
        off.push_back(acc);
        acc += o.at(p).dim * pb[(std::size_t)x][(std::size_t)w][(std::size_t)p].total;
      }
      off.push_back(acc);
      const PairKey key{y.objects[(std::size_t)x], y.objects[(std::size_t)w]};
      out.grade_off[key] = off;
      if (acc > 0) carrier.hom[key] = space(acc);
    }

  // completeness: a grade above p_max carries content when the operad is
  // nonzero there and the generator graph has a composable chain that long
  {
    std::vector<std::vector<bool>> reach((std::size_t)s, std::vector<bool>((std::size_t)s));
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) reach[(std::size_t)x][(std::size_t)w] = x == w;  // length 0
    for (int p = 1; p <= o.max_arity; ++p) {
      std::vector<std::vector<bool>> nxt((std::size_t)s, std::vector<bool>((std::size_t)s, false));
      for (int x = 0; x < s; ++x)
        for (int w = 0; w < s; ++w)
          for (int z = 0; z < s; ++z)
            if (reach[(std::size_t)x][(std::size_t)z] && y.at_idx(z, w).dim > 0)
              nxt[(std::size_t)x][(std::size_t)w] = true;
      reach = nxt;
      if (p > p_max && o.at(p).dim > 0)
        for (int x = 0; x < s; ++x)
          for (int w = 0; w < s; ++w)
            if (reach[(std::size_t)x][(std::size_t)w]) out.exact = false;
    }
  }

  Algebra alg;
  alg.op = o;
  alg.carrier = carrier;
  alg.max_arity = o.max_arity;

  std::map<std::vector<int>, Mat> mu_cache;
  auto mu_of = [&](const std::vector<int>& ps) -> const Mat& {
    auto it = mu_cache.find(ps);
    if (it != mu_cache.end()) return it->second;
    return mu_cache.emplace(ps, mu_tree(o, int(ps.size()), ps).entries).first->second;
  };

  for (int n = 0; n <= o.max_arity; ++n) {
    const Index on = o.at(n).dim;
    if (on == 0) continue;
    for (int x = 0; x < s; ++x)
      for (int w = 0; w < s; ++w) {
        const PairKey key{y.objects[(std::size_t)x], y.objects[(std::size_t)w]};
        const Index fdim = carrier.at_idx(x, w).dim;
        ProdBlocks pbf = pow_blocks(carrier, n, x, w);
        if (fdim == 0 || pbf.total == 0) continue;
        Mat M = Mat::Zero(fdim, on * pbf.total);
        for (std::size_t B = 0; B < pbf.paths.size(); ++B) {
          if (pbf.dims[B] == 0) continue;
          const std::vector<int>& u = pbf.paths[B];
          // per slot: all (grade, inner chain) choices with nonzero content
          struct Opt {
            int p;
            Index odim, pow_tot, in_off, in_dim;
            const std::vector<int>* in_path;
            Index f_base;  // offset of this grade/operation/chain inside the factor
          };
          std::vector<std::vector<Opt>> opts((std::size_t)n);
          bool empty = false;
          for (int l = 1; l <= n; ++l) {
            const int ix = u[(std::size_t)(n - l)], iw = u[(std::size_t)(n - l + 1)];
            const std::vector<Index>& goff =
                out.grade_off[{y.objects[(std::size_t)ix], y.objects[(std::size_t)iw]}];
            for (int p = 0; p <= p_max; ++p) {
              const Index od = o.at(p).dim;
              if (od == 0) continue;
              const ProdBlocks& pbp = pb[(std::size_t)ix][(std::size_t)iw][(std::size_t)p];
              for (std::size_t bi = 0; bi < pbp.paths.size(); ++bi) {
                if (pbp.dims[bi] == 0) continue;
                opts[(std::size_t)l - 1].push_back(Opt{p, od, pbp.total, pbp.offsets[bi],
                                                      pbp.dims[bi], &pbp.paths[bi],
                                                      goff[(std::size_t)p]});
              }
            }
            if (opts[(std::size_t)l - 1].empty()) empty = true;
          }
          if (empty && n > 0) continue;
          std::vector<Index> choice((std::size_t)n, 0);
          std::vector<Index> nopts((std::size_t)n);
          for (int l = 0; l < n; ++l) nopts[(std::size_t)l] = Index(opts[(std::size_t)l].size());
          do {
            std::vector<const Opt*> pick((std::size_t)n);
            int psum = 0;
            std::vector<int> ps((std::size_t)n);
            for (int l = 0; l < n; ++l) {
              pick[(std::size_t)l] = &opts[(std::size_t)l][(std::size_t)choice[(std::size_t)l]];
              ps[(std::size_t)l] = pick[(std::size_t)l]->p;
              psum += pick[(std::size_t)l]->p;
            }
            if (psum > p_max) continue;  // dropped grade; completeness is tracked above
            if (psum > o.max_arity || o.at(psum).dim == 0) continue;
            // concatenated chain: slot n covers the first steps
            std::vector<int> v{u[0]};
            for (int l = n; l >= 1; --l) {
              const std::vector<int>& ip = *pick[(std::size_t)l - 1]->in_path;
              v.insert(v.end(), ip.begin() + 1, ip.end());
            }
            const ProdBlocks& pbt = pb[(std::size_t)x][(std::size_t)w][(std::size_t)psum];
            const Index o_v = pbt.offsets[(std::size_t)interior_code(v, s)];
            const Mat& mu = mu_of(ps);
            const std::vector<Index>& goff_out = out.grade_off[key];
            // iterate operation indices and generator indices
            std::vector<Index> odims, ydims;
            odims.push_back(on);
            for (int l = 0; l < n; ++l) odims.push_back(pick[(std::size_t)l]->odim);
            for (int l = 0; l < n; ++l) ydims.push_back(pick[(std::size_t)l]->in_dim);
            std::vector<Index> oi(odims.size(), 0);
            do {
              Index mu_col = detail::flat_index(odims, oi);
              std::vector<Index> yi(ydims.size(), 0);
              do {
                // source column: factor indices combine grade offset,
                // operation index and inner-chain index
                std::vector<Index> f((std::size_t)n);
                for (int l = 0; l < n; ++l) {
                  const Opt& op_l = *pick[(std::size_t)l];
                  f[(std::size_t)l] = op_l.f_base + oi[(std::size_t)l + 1] * op_l.pow_tot +
                                      op_l.in_off + yi[(std::size_t)l];
                }
                const Index col = oi[0] * pbf.total + pbf.offsets[B] +
                                  detail::flat_index(pbf.fdims[B], f);
                const Index y_flat = detail::flat_index(ydims, yi);
                for (Index r = 0; r < o.at(psum).dim; ++r) {
                  const Rat& val = mu(r, mu_col);
                  if (val == 0) continue;
                  const Index row =
                      goff_out[(std::size_t)psum] + r * pbt.total + o_v + y_flat;
                  M(row, col) = val;
                }
              } while (detail::next_multi(yi, ydims));
            } while (detail::next_multi(oi, odims));
          } while (detail::next_multi(choice, nopts));
        }
        alg.nu[n][key] = lin(space(on * pbf.total), carrier.at_idx(x, w), M);
      }
  }
  out.alg = std::move(alg);
  return out;
}

// the generator inclusion: each generator lands in grade one under the unit
inline SGraphMap free_algebra_unit(const FreeAlgebraData& f) {
  const Operad& o = f.alg.op;
  if (o.max_arity < 1 || f.p_max < 1)
    throw DomainMismatch("free_algebra_unit: needs arity one and grade one present");
  std::map<PairKey, LinMap> comp;
  const int s = f.gens.n_objects();
  for (int x = 0; x < s; ++x)
    for (int w = 0; w < s; ++w) {
      const PairKey key{f.gens.objects[(std::size_t)x], f.gens.objects[(std::size_t)w]};
      const Index yd = f.gens.at_idx(x, w).dim;
      const Index fd = f.alg.carrier.at_idx(x, w).dim;
      if (yd == 0 || fd == 0) continue;
      const Index g1 = f.grade_off.at(key)[1];
      Mat m = Mat::Zero(fd, yd);
      for (Index r = 0; r < o.at(1).dim; ++r)
        for (Index j = 0; j < yd; ++j) m(g1 + r * yd + j, j) = o.unit.entries(r, 0);
      comp.emplace(key, lin(f.gens.at_idx(x, w), f.alg.carrier.at_idx(x, w), m));
    }
  return SGraphMap{f.gens, f.alg.carrier, std::move(comp)};
}

// collapse the free algebra on the carrier of an algebra back onto the
// algebra: grade p acts through the algebra's arity-p structure map
inline SGraphMap free_algebra_counit(const FreeAlgebraData& f, const Algebra& a) {
  require_same_objects(f.gens, a.carrier, "free_algebra_counit");
  if (!graph_dims_eq(f.gens, a.carrier))
    throw DomainMismatch("free_algebra_counit: the free algebra is not on this carrier");
  if (f.p_max > a.max_arity)
    throw DomainMismatch("free_algebra_counit: the algebra carries no structure maps above its "
                         "max_arity");
  std::map<PairKey, LinMap> comp;
  const int s = a.carrier.n_objects();
  for (int x = 0; x < s; ++x)
    for (int w = 0; w < s; ++w) {
      const PairKey key{a.carrier.objects[(std::size_t)x], a.carrier.objects[(std::size_t)w]};
      if (f.alg.carrier.at_idx(x, w).dim == 0) continue;
      std::vector<Mat> parts;
      for (int p = 0; p <= f.p_max; ++p) parts.push_back(a.nu_at_idx(p, x, w).entries);
      Mat m = hstack(parts);
      if (a.carrier.at_idx(x, w).dim == 0) continue;
      comp.emplace(key, lin(f.alg.carrier.at_idx(x, w), a.carrier.at_idx(x, w), m));
    }
  return SGraphMap{f.alg.carrier, a.carrier, std::move(comp)};
}

// the free algebra map induced by a map of generator graphs
inline SGraphMap free_algebra_map(const FreeAlgebraData& fy, const FreeAlgebraData& fw,
                                  const SGraphMap& g) {
  require_same_objects(fy.gens, fw.gens, "free_algebra_map");
  if (fy.p_max != fw.p_max)
    throw DomainMismatch("free_algebra_map: the two free algebras have different grade bounds");
  if (!graph_dims_eq(g.source, fy.gens) || !graph_dims_eq(g.target, fw.gens))
    throw DomainMismatch("free_algebra_map: the generator map does not match the generators");
  const Operad& o = fy.alg.op;
  std::map<PairKey, LinMap> comp;
  const int s = fy.gens.n_objects();
  for (int x = 0; x < s; ++x)
    for (int w = 0; w < s; ++w) {
      const PairKey key{fy.gens.objects[(std::size_t)x], fy.gens.objects[(std::size_t)w]};
      const Index src_d = fy.alg.carrier.at_idx(x, w).dim;
      const Index tgt_d = fw.alg.carrier.at_idx(x, w).dim;
      if (src_d == 0 || tgt_d == 0) continue;
      Mat m = Mat::Zero(tgt_d, src_d);
      for (int p = 0; p <= fy.p_max; ++p) {
        const Index od = o.at(p).dim;
        if (od == 0) continue;
        ProdBlocks pby = pow_blocks(fy.gens, p, x, w);
        ProdBlocks pbw = pow_blocks(fw.gens, p, x, w);
        for (std::size_t b = 0; b < pby.paths.size(); ++b) {
          if (pby.dims[b] == 0 || pbw.dims[b] == 0) continue;
          const std::vector<int>& u = pby.paths[b];
          std::vector<Mat> chain;
          for (int l = 1; l <= p; ++l)
            chain.push_back(g.at_idx(u[(std::size_t)(p - l)], u[(std::size_t)(p - l + 1)]).entries);
          Mat blk = kron_chain(chain);
          for (Index r = 0; r < od; ++r)
            m.block(fw.grade_off.at(key)[(std::size_t)p] + r * pbw.total + pbw.offsets[b],
                    fy.grade_off.at(key)[(std::size_t)p] + r * pby.total + pby.offsets[b],
                    pbw.dims[b], pby.dims[b]) = blk;
        }
      }
      comp.emplace(key, lin(fy.alg.carrier.at_idx(x, w), fw.alg.carrier.at_idx(x, w), m));
    }
  return SGraphMap{fy.alg.carrier, fw.alg.carrier, std::move(comp)};
}

}  // namespace opd
