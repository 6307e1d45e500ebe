// Shared randomized fixtures for the test suite. Everything is deterministic
// given a seed and uses the library's own types (unlike oracles.hpp, which
// stays independent of the library).
#pragma once

#include <opd/operad.hpp>

#include "oracles.hpp"

namespace fixture {

using namespace opd;

// A one-dimensional operad with every component the scalar line and
//   circ(m,i,n) = multiplication by c^((m-1)(n-1)) * b[m+n-1] / (b[m] * b[n]),
// for arbitrary nonzero weights b with b[1] = 1 and arbitrary nonzero c. The
// exchange relations reduce to the symmetry of (a-1)(b-1)+(a+b-2)(c-1) in b,c
// and the unit relations to b[1] = 1, so any such weight family works. Useful
// because the structure maps are not all equal yet every axiom holds.
inline Operad weighted_line_operad(int max_arity, std::uint64_t seed) {
  oracle::Rng rng(seed);
  std::vector<Rat> b((std::size_t)max_arity + 1, Rat(1));
  for (int n = 0; n <= max_arity; ++n) {
    if (n == 1) continue;
    Rat x = 0;
    while (x == 0) x = rng.rat(4);
    b[(std::size_t)n] = x;
  }
  Rat c = 0;
  while (c == 0) c = rng.rat(3);
  Operad o;
  o.max_arity = max_arity;
  for (int n = 0; n <= max_arity; ++n) o.seq.comp[n] = space(1);
  o.unit = {unit_space(), space(1), Mat::Identity(1, 1)};
  auto cpow = [&](int e) {
    Rat r = 1;
    for (int k = 0; k < std::abs(e); ++k) r *= c;
    return e < 0 ? Rat(1) / r : r;
  };
  for (int m = 1; m <= max_arity; ++m)
    for (int n = 0; n <= max_arity; ++n) {
      if (m + n - 1 > max_arity) continue;
      Rat lam = cpow((m - 1) * (n - 1)) * b[(std::size_t)(m + n - 1)] /
                (b[(std::size_t)m] * b[(std::size_t)n]);
      Mat e(1, 1);
      e(0, 0) = lam;
      for (int i = 1; i <= m; ++i)
        o.circ.emplace(Key3{m, i, n}, LinMap{space(1), space(1), e});
    }
  return o;
}

// the associative operad without its arity-zero component; every positive
// arity is one-dimensional and all compositions are the identity scalar
inline Operad reduced_ass_operad(int max_arity) {
  Operad o = ass_operad(max_arity);
  o.seq.comp.erase(0);
  for (auto it = o.circ.begin(); it != o.circ.end();)
    it = std::get<2>(it->first) == 0 ? o.circ.erase(it) : std::next(it);
  return o;
}

// the operad with only an identity operation: one dimension in arity 1,
// nothing anywhere else
inline Operad unit_operad(int max_arity) {
  Operad o;
  o.max_arity = max_arity;
  o.seq.comp[1] = space(1);
  o.unit = lin(unit_space(), o.at(1), Mat::Identity(1, 1));
  o.circ[{1, 1, 1}] = lin(tensor_obj(o.at(1), o.at(1)), o.at(1), Mat::Identity(1, 1));
  return o;
}

// random total linear map between the components of two spaces
inline LinMap random_lin(oracle::Rng& rng, const Space& src, const Space& tgt, int span = 3) {
  Mat m(tgt.dim, src.dim);
  for (Index i = 0; i < tgt.dim; ++i)
    for (Index j = 0; j < src.dim; ++j) m(i, j) = rng.rat(span);
  return lin(src, tgt, m);
}

}  // namespace fixture
