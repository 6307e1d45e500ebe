// Exact rational scalar for all linear algebra: GMP's mpq_class plugged into
// Eigen through the NumTraits extension point. Every matrix in this library is
// dense over Rat; arithmetic is exact, comparisons are exact, no tolerances.
#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <string>

namespace Eigen {
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};
}  // namespace Eigen

namespace opd {

using Rat = mpq_class;
using Mat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// "p/q" or "p"; the canonical printed form of a rational
inline std::string rat_str(const Rat& x) {
  Rat c = x;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline bool parse_rat(const std::string& s, Rat& out) {
  if (s.empty()) return false;
  try {
    out = Rat(s);  // accepts "p" and "p/q"
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (out.get_den() == 0) return false;
  out.canonicalize();
  return true;
}

}  // namespace opd
