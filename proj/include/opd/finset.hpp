// Finite sets with chosen element orderings: products, coproducts and
// pushouts (quotients by the span relation, computed by union-find with
// lexicographically least representatives).
#pragma once

#include <opd/errors.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace opd {

struct FinSetObj {
  std::vector<std::string> elements;  // distinct, order fixed
};

struct FinSetMap {
  FinSetObj source, target;
  std::vector<std::string> images;  // images[i] = image of source.elements[i]
};

inline int finset_index(const FinSetObj& s, const std::string& e) {
  for (std::size_t i = 0; i < s.elements.size(); ++i)
    if (s.elements[i] == e) return int(i);
  return -1;
}

inline bool same_finset(const FinSetObj& a, const FinSetObj& b) {
  return a.elements == b.elements;
}

inline FinSetMap finset_map(const FinSetObj& src, const FinSetObj& tgt,
                            const std::vector<std::string>& images) {
  if (images.size() != src.elements.size())
    throw DomainMismatch("finset_map: one image per source element required");
  for (const auto& e : images)
    if (finset_index(tgt, e) < 0)
      throw DomainMismatch("finset_map: image '" + e + "' is not in the target");
  return {src, tgt, images};
}

inline FinSetMap finset_identity(const FinSetObj& s) { return {s, s, s.elements}; }

inline bool finset_map_eq(const FinSetMap& f, const FinSetMap& g) {
  return same_finset(f.source, g.source) && same_finset(f.target, g.target) &&
         f.images == g.images;
}

inline FinSetMap finset_compose(const FinSetMap& g, const FinSetMap& f) {
  if (!same_finset(f.target, g.source))
    throw DomainMismatch("finset_compose: inner sets disagree");
  std::vector<std::string> im;
  for (const auto& e : f.images) im.push_back(g.images[(std::size_t)finset_index(g.source, e)]);
  return {f.source, g.target, im};
}

inline FinSetObj finset_unit() { return {{"*"}}; }
inline FinSetObj finset_initial() { return {{}}; }

inline std::string pair_label(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

// cartesian product, left factor major
inline FinSetObj finset_product(const FinSetObj& a, const FinSetObj& b) {
  FinSetObj p;
  for (const auto& x : a.elements)
    for (const auto& y : b.elements) p.elements.push_back(pair_label(x, y));
  return p;
}

inline FinSetMap finset_product_map(const FinSetMap& f, const FinSetMap& g) {
  FinSetObj src = finset_product(f.source, g.source);
  FinSetObj tgt = finset_product(f.target, g.target);
  std::vector<std::string> im;
  for (std::size_t i = 0; i < f.source.elements.size(); ++i)
    for (std::size_t j = 0; j < g.source.elements.size(); ++j)
      im.push_back(pair_label(f.images[i], g.images[j]));
  return {src, tgt, im};
}

// (a, b) -> (b, a)
inline FinSetMap finset_symmetry(const FinSetObj& a, const FinSetObj& b) {
  FinSetObj src = finset_product(a, b);
  FinSetObj tgt = finset_product(b, a);
  std::vector<std::string> im;
  for (const auto& x : a.elements)
    for (const auto& y : b.elements) im.push_back(pair_label(y, x));
  return {src, tgt, im};
}

struct FinSetPushout {
  FinSetObj apex;
  FinSetMap inj_left, inj_right;
};

// Pushout of target(f) <- source -> target(g): disjoint union of the targets
// modulo f(x) ~ g(x). Class representatives are the lexicographically least
// member names; a numeric suffix disambiguates accidental collisions between
// unidentified classes.
inline FinSetPushout finset_pushout(const FinSetMap& f, const FinSetMap& g) {
  if (!same_finset(f.source, g.source))
    throw DomainMismatch("finset_pushout: span legs must share their source");
  const std::size_t na = f.target.elements.size(), nb = g.target.elements.size();
  std::vector<std::size_t> parent(na + nb);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t x, std::size_t y) { parent[find(x)] = find(y); };
  for (std::size_t i = 0; i < f.source.elements.size(); ++i) {
    std::size_t a = (std::size_t)finset_index(f.target, f.images[i]);
    std::size_t b = na + (std::size_t)finset_index(g.target, g.images[i]);
    unite(a, b);
  }
  auto name_of = [&](std::size_t k) {
    return k < na ? f.target.elements[k] : g.target.elements[k - na];
  };
  // least member name per class, classes ordered by first occurrence
  std::map<std::size_t, std::string> least;
  std::vector<std::size_t> class_order;
  for (std::size_t k = 0; k < na + nb; ++k) {
    std::size_t r = find(k);
    auto it = least.find(r);
    if (it == least.end()) {
      least[r] = name_of(k);
      class_order.push_back(r);
    } else if (name_of(k) < it->second) {
      it->second = name_of(k);
    }
  }
  std::map<std::string, int> used;
  std::map<std::size_t, std::string> label;
  for (std::size_t r : class_order) {
    std::string base = least[r];
    int& n = used[base];
    label[r] = n == 0 ? base : base + "#" + std::to_string(n + 1);
    ++n;
  }
  FinSetPushout out;
  for (std::size_t r : class_order) out.apex.elements.push_back(label[r]);
  std::vector<std::string> im_l, im_r;
  for (std::size_t k = 0; k < na; ++k) im_l.push_back(label[find(k)]);
  for (std::size_t k = 0; k < nb; ++k) im_r.push_back(label[find(na + k)]);
  out.inj_left = {f.target, out.apex, im_l};
  out.inj_right = {g.target, out.apex, im_r};
  return out;
}

}  // namespace opd
