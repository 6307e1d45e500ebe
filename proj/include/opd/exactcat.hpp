// Finite-dimensional rational vector spaces: objects, linear maps, tensor
// structure, biproducts, pushouts, punctured-cube colimits and internal homs.
// Pushout apexes always come in the canonical coordinates produced by
// quotient_by, so equal inputs give byte-identical outputs.
#pragma once

#include <opd/errors.hpp>
#include <opd/la.hpp>
#include <opd/rational.hpp>

#include <string>
#include <vector>

namespace opd {

struct Space {
  Index dim = 0;
  std::vector<std::string> labels;  // optional basis labels, cosmetic only
};

inline Space space(Index dim) { return Space{dim, {}}; }
inline Space unit_space() { return space(1); }
inline Space initial_space() { return space(0); }
inline bool same_space(const Space& a, const Space& b) { return a.dim == b.dim; }

struct LinMap {
  Space source, target;
  Mat entries;  // target.dim x source.dim, rows indexed by the target basis
};

inline LinMap lin(const Space& src, const Space& tgt, const Mat& m) {
  if (m.rows() != tgt.dim || m.cols() != src.dim)
    throw DomainMismatch("lin: entry matrix shape does not match the declared spaces");
  return LinMap{src, tgt, m};
}

inline LinMap identity(const Space& s) { return {s, s, Mat::Identity(s.dim, s.dim)}; }
inline LinMap zero_map(const Space& src, const Space& tgt) {
  return {src, tgt, Mat::Zero(tgt.dim, src.dim)};
}

inline bool map_eq(const LinMap& f, const LinMap& g) {
  return same_space(f.source, g.source) && same_space(f.target, g.target) &&
         f.entries == g.entries;
}

inline LinMap compose(const LinMap& g, const LinMap& f) {
  if (!same_space(f.target, g.source))
    throw DomainMismatch("compose: inner spaces disagree");
  return {f.source, g.target, matmul(g.entries, f.entries)};
}

inline LinMap add(const LinMap& f, const LinMap& g) {
  if (!same_space(f.source, g.source) || !same_space(f.target, g.target))
    throw DomainMismatch("add: maps must be parallel");
  return {f.source, f.target, f.entries + g.entries};
}

inline LinMap scale(const Rat& c, const LinMap& f) { return {f.source, f.target, c * f.entries}; }

inline Space tensor_obj(const Space& a, const Space& b) { return space(a.dim * b.dim); }

inline LinMap tensor_map(const LinMap& f, const LinMap& g) {
  return {tensor_obj(f.source, g.source), tensor_obj(f.target, g.target),
          kron(f.entries, g.entries)};
}

// A (x) B -> B (x) A
inline LinMap symmetry(const Space& a, const Space& b) {
  return {tensor_obj(a, b), tensor_obj(b, a), swap_perm<Rat>(a.dim, b.dim)};
}

// permutation of an n-fold tensor product; dst_pos[f] = new position of factor f
inline LinMap factor_perm(const std::vector<Space>& factors, const std::vector<int>& dst_pos) {
  std::vector<Index> dims;
  Index total = 1;
  for (const auto& s : factors) {
    dims.push_back(s.dim);
    total *= s.dim;
  }
  return {space(total), space(total), tensor_perm<Rat>(dims, dst_pos)};
}

struct Coproduct {
  Space sum;
  std::vector<LinMap> injections;
  std::vector<LinMap> projections;
};

inline Coproduct coproduct(const std::vector<Space>& parts) {
  Index total = 0;
  for (const auto& p : parts) total += p.dim;
  Coproduct c;
  c.sum = space(total);
  Index at = 0;
  for (const auto& p : parts) {
    Mat in = Mat::Zero(total, p.dim);
    in.block(at, 0, p.dim, p.dim) = Mat::Identity(p.dim, p.dim);
    c.injections.push_back({p, c.sum, in});
    c.projections.push_back({c.sum, p, in.transpose()});
    at += p.dim;
  }
  return c;
}

// ---- pushouts -------------------------------------------------------------

struct PushoutData {
  Space apex;
  LinMap inj_left;   // from target(f)
  LinMap inj_right;  // from target(g)
  LinMap f, g;       // the span the pushout was taken over, kept for checks
};

inline PushoutData pushout(const LinMap& f, const LinMap& g) {
  if (!same_space(f.source, g.source))
    throw DomainMismatch("pushout: span legs must share their source");
  const Index da = f.target.dim, db = g.target.dim;
  Mat rel(da + db, f.source.dim);
  rel.topRows(da) = f.entries;
  rel.bottomRows(db) = -g.entries;
  Quotient<Rat> q = quotient_by<Rat>(da + db, rel);
  PushoutData out;
  out.apex = space(q.dim());
  out.inj_left = {f.target, out.apex, q.proj.leftCols(da)};
  out.inj_right = {g.target, out.apex, q.proj.rightCols(db)};
  out.f = f;
  out.g = g;
  return out;
}

// The unique map out of the apex restricting to p and q. Throws
// IncompatibleLegs when (p, q) is not a cocone over the span.
inline LinMap mediating_map(const PushoutData& po, const LinMap& p, const LinMap& q) {
  if (!same_space(p.target, q.target))
    throw DomainMismatch("mediating_map: cocone legs must share their target");
  if (!same_space(p.source, po.inj_left.source) || !same_space(q.source, po.inj_right.source))
    throw DomainMismatch("mediating_map: cocone legs do not match the pushout corners");
  Mat k(po.apex.dim, p.source.dim + q.source.dim);
  k.leftCols(p.source.dim) = po.inj_left.entries;
  k.rightCols(q.source.dim) = po.inj_right.entries;
  Mat l(p.target.dim, p.source.dim + q.source.dim);
  l.leftCols(p.source.dim) = p.entries;
  l.rightCols(q.source.dim) = q.entries;
  SolveRight<Rat> s = solve_right(k, l);
  if (!s.consistent)
    throw IncompatibleLegs("mediating_map: the given legs do not commute with the span");
  if (!s.unique)
    throw NonCompatibleCube("mediating_map: pushout injections failed to be jointly epic");
  return {po.apex, p.target, s.m};
}

inline bool verify_pushout(const PushoutData& po) {
  if (!map_eq(compose(po.inj_left, po.f), compose(po.inj_right, po.g))) return false;
  Mat k = hstack<Rat>({po.inj_left.entries, po.inj_right.entries});
  if (rank(k) != po.apex.dim) return false;  // injections must be jointly epic
  // apex dimension matches the cokernel of (f, -g)
  Mat rel(po.f.target.dim + po.g.target.dim, po.f.source.dim);
  rel.topRows(po.f.target.dim) = po.f.entries;
  rel.bottomRows(po.g.target.dim) = -po.g.entries;
  return po.apex.dim == po.f.target.dim + po.g.target.dim - rank(rel);
}

// ---- punctured cube sources ----------------------------------------------

// Source object of an k-fold pushout product together with the corner
// inclusions kappa_i and the product map itself.
struct PPSource {
  std::vector<LinMap> maps;   // f_i : U_i -> V_i
  Space object;               // s(f_1 (.) ... (.) f_k)
  std::vector<LinMap> kappas; // corner inclusions into the source object
  LinMap odot;                // the pushout product map, object -> V_1 (x) ... (x) V_k
};

namespace detail {
inline Space tensor_all(const std::vector<Space>& xs, int from, int to) {
  Space acc = unit_space();
  for (int i = from; i < to; ++i) acc = tensor_obj(acc, xs[(std::size_t)i]);
  return acc;
}
}  // namespace detail

inline PPSource pp_source(const std::vector<LinMap>& fs) {
  if (fs.empty()) throw DomainMismatch("pp_source: needs at least one map");
  PPSource s;
  s.maps = fs;
  // base: a single map is its own pushout product
  s.object = fs[0].source;
  s.kappas = {identity(fs[0].source)};
  s.odot = fs[0];
  std::vector<Space> v_targets = {fs[0].target};
  for (std::size_t k = 1; k < fs.size(); ++k) {
    const LinMap& f = fs[k];
    Space v_prod = detail::tensor_all(v_targets, 0, int(v_targets.size()));
    // span: s_{k-1} (x) U_k <- both corners
    LinMap left = tensor_map(s.odot, identity(f.source));      // -> V_1..V_{k-1} (x) U_k
    LinMap right = tensor_map(identity(s.object), f);          // -> s_{k-1} (x) V_k
    PushoutData po = pushout(left, right);
    std::vector<LinMap> kappas_next;
    // corners with U at an old slot i < k, tensored with the new V_k
    for (std::size_t i = 0; i < s.kappas.size(); ++i)
      kappas_next.push_back(compose(po.inj_right, tensor_map(s.kappas[i], identity(f.target))));
    kappas_next.push_back(po.inj_left);  // corner with U at the new slot k
    LinMap odot_next = mediating_map(
        po, tensor_map(identity(v_prod), f),            // on V_1..V_{k-1} (x) U_k
        tensor_map(s.odot, identity(f.target)));        // on s_{k-1} (x) V_k
    s.object = po.apex;
    s.kappas = std::move(kappas_next);
    s.odot = odot_next;
    v_targets.push_back(f.target);
  }
  return s;
}

// Unique map out of a punctured-cube source agreeing with the given legs on
// every corner. legs[i] must be defined on the corner with U at slot i.
inline LinMap induced_from_cube(const PPSource& s, const std::vector<LinMap>& legs) {
  const std::size_t n = s.maps.size();
  if (legs.size() != n)
    throw DomainMismatch("induced_from_cube: one leg per corner required");
  for (std::size_t i = 0; i < n; ++i) {
    if (!same_space(legs[i].source, s.kappas[i].source))
      throw DomainMismatch("induced_from_cube: leg " + std::to_string(i) +
                           " has the wrong corner source");
    if (!same_space(legs[i].target, legs[0].target))
      throw DomainMismatch("induced_from_cube: legs must share a target");
  }
  // pairwise compatibility squares: changing U -> V in another slot first
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      // double corner: U at both i and j
      std::vector<LinMap> into_i, into_j;
      for (std::size_t t = 0; t < n; ++t) {
        if (t == i) {
          into_i.push_back(identity(s.maps[t].source));
          into_j.push_back(s.maps[t]);
        } else if (t == j) {
          into_i.push_back(s.maps[t]);
          into_j.push_back(identity(s.maps[t].source));
        } else {
          into_i.push_back(identity(s.maps[t].target));
          into_j.push_back(identity(s.maps[t].target));
        }
      }
      LinMap mi = identity(unit_space()), mj = identity(unit_space());
      for (std::size_t t = 0; t < n; ++t) {
        mi = tensor_map(mi, into_i[t]);
        mj = tensor_map(mj, into_j[t]);
      }
      if (compose(legs[i], mi).entries != compose(legs[j], mj).entries)
        throw IncompatibleLegs("induced_from_cube: legs " + std::to_string(i) + " and " +
                               std::to_string(j) + " disagree on their double corner");
    }
  std::vector<Mat> ks, ls;
  for (std::size_t i = 0; i < n; ++i) {
    ks.push_back(s.kappas[i].entries);
    ls.push_back(legs[i].entries);
  }
  SolveRight<Rat> sol = solve_right(hstack<Rat>(ks), hstack<Rat>(ls));
  if (!sol.consistent)
    throw NonCompatibleCube("induced_from_cube: compatible legs admit no common extension");
  if (!sol.unique)
    throw NonCompatibleCube("induced_from_cube: corner inclusions failed to be jointly epic");
  return {s.object, legs[0].target, sol.m};
}

// binary pushout product f (.) g as a map out of its source object
inline LinMap pushout_product(const LinMap& f, const LinMap& g) {
  return pp_source({f, g}).odot;
}

// ---- internal homs --------------------------------------------------------

// Hom(A, B) with basis the matrix units E_{ij} (i a basis row of B, j of A),
// flattened with i major: index(E_{ij}) = i * dim A + j.
inline Space hom_space(const Space& a, const Space& b) { return space(a.dim * b.dim); }

// curry f : A (x) B -> C into A -> Hom(B, C)
inline LinMap curry(const LinMap& f, const Space& a, const Space& b) {
  if (f.source.dim != a.dim * b.dim)
    throw DomainMismatch("curry: source is not the stated tensor product");
  const Space& c = f.target;
  Mat m = Mat::Zero(b.dim * c.dim, a.dim);
  for (Index i = 0; i < c.dim; ++i)
    for (Index av = 0; av < a.dim; ++av)
      for (Index bv = 0; bv < b.dim; ++bv) {
        const Rat& x = f.entries(i, av * b.dim + bv);
        if (x != 0) m(i * b.dim + bv, av) = x;
      }
  return {a, hom_space(b, c), m};
}

// inverse of curry
inline LinMap uncurry(const LinMap& g, const Space& b, const Space& c) {
  if (g.target.dim != b.dim * c.dim)
    throw DomainMismatch("uncurry: target is not the stated hom space");
  const Space& a = g.source;
  Mat m = Mat::Zero(c.dim, a.dim * b.dim);
  for (Index i = 0; i < c.dim; ++i)
    for (Index av = 0; av < a.dim; ++av)
      for (Index bv = 0; bv < b.dim; ++bv) {
        const Rat& x = g.entries(i * b.dim + bv, av);
        if (x != 0) m(i, av * b.dim + bv) = x;
      }
  return lin(tensor_obj(a, b), c, m);
}

// evaluation Hom(B, C) (x) B -> C
inline LinMap eval_map(const Space& b, const Space& c) {
  Space h = hom_space(b, c);
  Mat m = Mat::Zero(c.dim, h.dim * b.dim);
  for (Index i = 0; i < c.dim; ++i)
    for (Index j = 0; j < b.dim; ++j) m(i, (i * b.dim + j) * b.dim + j) = 1;
  return {tensor_obj(h, b), c, m};
}

}  // namespace opd
