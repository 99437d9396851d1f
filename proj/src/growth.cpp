#include "expdyn/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace expdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Largest entry magnitude the address layer represents.
constexpr double kEntryCeiling = 1152921504606846976.0;  // 2^60

// F^{-(k-1)}(2 pi |e|), abandoned as soon as it cannot exceed `best`.
double term(std::size_t k, Entry e, double best) {
  double v = kTwoPi * std::abs(static_cast<double>(e));
  for (std::size_t i = 1; i < k; ++i) {
    if (v <= best) return v;
    v = std::log1p(v);
  }
  return v;
}

}  // namespace

double modelGrowth(double t) { return std::expm1(t); }

double modelGrowthInverse(double x) { return std::log1p(x); }

double modelGrowthIterate(double t, std::size_t n) {
  for (std::size_t i = 0; i < n && std::isfinite(t); ++i) t = std::expm1(t);
  return t;
}

GrowthBounds growthBounds(const ExternalAddress& a, std::size_t depthCap) {
  if (!a.isInfinite())
    throw Error(ErrorCode::Precondition,
                "growth bounds are defined for infinite addresses only");
  constexpr double inf = std::numeric_limits<double>::infinity();

  const std::size_t horizon =
      a.isExact() ? a.prefix().size() + a.cycle().size()
                  : std::min(depthCap, a.resolutionCap());
  double best = 0.0;
  // bound = F^{-(k-1)}(2 pi 2^60), the largest term any entry could produce.
  double bound = kTwoPi * kEntryCeiling;
  for (std::size_t k = 1;; ++k) {
    if (k > 1) bound = std::log1p(bound);
    if (bound <= best) break;
    if (k > horizon) {
      if (a.isExact()) break;
      throw UndecidedError(k, "supremum of growth terms undecided at depth " +
                                  std::to_string(horizon));
    }
    auto e = a.entry(k);
    if (!e || std::abs(static_cast<double>(*e)) > kEntryCeiling)
      return {inf, inf, false};
    best = std::max(best, term(k, *e, best));
  }
  // Entries bounded by 2^60 drive F^{-(k-1)}(2 pi |s_k|) to zero.
  if (a.isGenerated()) {
    const std::size_t window = std::min(depthCap, a.resolutionCap());
    for (std::size_t k = 1; k <= window; ++k) {
      auto e = a.entry(k);
      if (!e || std::abs(static_cast<double>(*e)) > kEntryCeiling)
        return {inf, inf, false};
    }
  }
  return {best, 0.0, true};
}

}  // namespace expdyn
