#ifndef EXPDYN_ITINERARY_HPP
#define EXPDYN_ITINERARY_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "expdyn/address.hpp"

namespace expdyn {

/// One itinerary symbol: an integer strip j, the boundary symbol (j | j-1),
/// or the terminal * of an intermediate address.
struct ItineraryEntry {
  enum class Kind { Int, Boundary, Star };
  Kind kind = Kind::Int;
  Entry value = 0;  // j for Int and Boundary

  static ItineraryEntry integer(Entry j) { return {Kind::Int, j}; }
  static ItineraryEntry boundary(Entry j) { return {Kind::Boundary, j}; }
  static ItineraryEntry star() { return {Kind::Star, 0}; }

  bool operator==(const ItineraryEntry&) const = default;
};

std::string formatEntry(const ItineraryEntry& u);

struct Itinerary {
  std::vector<ItineraryEntry> entries;

  std::size_t depth() const { return entries.size(); }
  const ItineraryEntry& operator[](std::size_t k) const {  // 1-based
    return entries.at(k - 1);
  }
  bool operator==(const Itinerary&) const = default;
};

/// Comma-separated rendering, e.g. "0,1,(2|1),*".
std::string formatItinerary(const Itinerary& it);

class ItineraryUndecided : public UndecidedError {
 public:
  ItineraryUndecided(std::size_t index, Itinerary partial)
      : UndecidedError(index, "itinerary entry " + std::to_string(index) +
                                  " undecided at depth cap"),
        partial_(std::move(partial)) {}
  const Itinerary& partial() const noexcept { return partial_; }

 private:
  Itinerary partial_;
};

/// itin_r(s) up to `depth` entries. For an intermediate s of length n the
/// entries are u_1 ... u_{n-1} followed by *.
Itinerary itinerary(const ExternalAddress& s, const ExternalAddress& base,
                    std::size_t depth, std::size_t depthCap = kDefaultDepthCap);

/// K(s) = itin_s(s).
Itinerary kneading(const ExternalAddress& s, std::size_t depth,
                   std::size_t depthCap = kDefaultDepthCap);

/// m is adjacent to u if m == u, or u = (j | j-1) with m in {j-1, j}.
bool adjacent(Entry m, const ItineraryEntry& u);

/// Numerical record of the shared-itinerary consequence: for r != r~ with a
/// common itinerary relative to s and first difference m, every
/// sigma^{m+k}(r), sigma^{m+k}(r~) surround some sigma^j(s) with j <= k,
/// and u~_{m+k} lies in {u_1, ..., u_k}.
struct SharedItineraryStep {
  std::size_t k = 0;
  std::optional<std::size_t> surroundWitness;  // the j found
  std::optional<bool> entryMember;             // only for 1 <= k, m+k <= depth
  bool passed() const {
    return surroundWitness.has_value() && entryMember.value_or(true);
  }
};

struct SharedItineraryReport {
  std::size_t firstDifference = 0;
  std::size_t depth = 0;
  std::vector<SharedItineraryStep> steps;
  bool allPassed() const;
};

/// Throws Error(Precondition) when r == r~ or the itineraries of r and r~
/// differ within `depth`.
SharedItineraryReport sharedItineraryConsequence(
    const ExternalAddress& r, const ExternalAddress& rTilde,
    const ExternalAddress& s, std::size_t depth,
    std::size_t depthCap = kDefaultDepthCap);

}  // namespace expdyn

#endif  // EXPDYN_ITINERARY_HPP
