#ifndef EXPDYN_GROWTH_HPP
#define EXPDYN_GROWTH_HPP

#include <cstddef>

#include "expdyn/address.hpp"

namespace expdyn {

/// The model of exponential growth t -> exp(t) - 1 and its inverse.
double modelGrowth(double t);
double modelGrowthInverse(double x);
/// F^n(t); +inf once the iterate leaves the double range.
double modelGrowthIterate(double t, std::size_t n);

struct GrowthBounds {
  double tStar = 0.0;    // sup_k F^{-(k-1)}(2 pi |s_k|)
  double tLimsup = 0.0;  // limsup_k of the same sequence
  bool expBounded = true;
};

/// Growth bounds of an infinite address.
///
/// Eventually periodic addresses are decided exactly. For generator-backed
/// addresses the supremum is decided once no representable entry can beat
/// it; the limsup is 0 when every entry inside the resolution window is
/// representable and +inf when an entry overflows. Throws UndecidedError
/// when the window ends before the supremum is settled.
GrowthBounds growthBounds(const ExternalAddress& a,
                          std::size_t depthCap = kDefaultDepthCap);

}  // namespace expdyn

#endif  // EXPDYN_GROWTH_HPP
