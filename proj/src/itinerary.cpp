#include "expdyn/itinerary.hpp"

#include <algorithm>
#include <sstream>

namespace expdyn {

std::string formatEntry(const ItineraryEntry& u) {
  switch (u.kind) {
    case ItineraryEntry::Kind::Int:
      return std::to_string(u.value);
    case ItineraryEntry::Kind::Boundary:
      return "(" + std::to_string(u.value) + "|" + std::to_string(u.value - 1) +
             ")";
    case ItineraryEntry::Kind::Star:
      return "*";
  }
  return "?";
}

std::string formatItinerary(const Itinerary& it) {
  std::ostringstream out;
  for (std::size_t i = 0; i < it.entries.size(); ++i)
    out << (i ? "," : "") << formatEntry(it.entries[i]);
  return out.str();
}

Itinerary itinerary(const ExternalAddress& s, const ExternalAddress& base,
                    std::size_t depth, std::size_t depthCap) {
  if (depth == 0)
    throw Error(ErrorCode::InvalidArgument, "itinerary depth must be >= 1");
  if (base.isInfinity())
    throw Error(ErrorCode::Precondition, "itinerary base must not be inf");

  Itinerary out;
  out.entries.reserve(depth);
  ExternalAddress x = s;
  for (std::size_t k = 1; k <= depth; ++k) {
    if (x.isInfinity()) {
      out.entries.push_back(ItineraryEntry::star());
      break;
    }
    auto sym = x.symbol(1);
    if (!sym) throw ItineraryUndecided(k, out);
    if (*sym % 2 != 0) {
      // Half-integer h: m r < x < (m+1) r with m = floor(h).
      out.entries.push_back(ItineraryEntry::integer((*sym - 1) / 2));
      x = shift(x);
      continue;
    }
    const Entry j = *sym / 2;
    ExternalAddress tail = shift(x);
    // x = j tail, so comparing x with j r reduces to comparing tail with r.
    switch (compareLex(tail, base, depthCap)) {
      case Ordering::Greater:
        out.entries.push_back(ItineraryEntry::integer(j));
        break;
      case Ordering::Less:
        out.entries.push_back(ItineraryEntry::integer(j - 1));
        break;
      case Ordering::Equal:
        out.entries.push_back(ItineraryEntry::boundary(j));
        break;
      case Ordering::Undecided:
        throw ItineraryUndecided(k, out);
    }
    x = std::move(tail);
  }
  return out;
}

Itinerary kneading(const ExternalAddress& s, std::size_t depth,
                   std::size_t depthCap) {
  return itinerary(s, s, depth, depthCap);
}

bool adjacent(Entry m, const ItineraryEntry& u) {
  switch (u.kind) {
    case ItineraryEntry::Kind::Int:
      return m == u.value;
    case ItineraryEntry::Kind::Boundary:
      return m == u.value || m == u.value - 1;
    case ItineraryEntry::Kind::Star:
      return false;
  }
  return false;
}

bool SharedItineraryReport::allPassed() const {
  return std::all_of(steps.begin(), steps.end(),
                     [](const SharedItineraryStep& st) { return st.passed(); });
}

SharedItineraryReport sharedItineraryConsequence(const ExternalAddress& r,
                                                 const ExternalAddress& rTilde,
                                                 const ExternalAddress& s,
                                                 std::size_t depth,
                                                 std::size_t depthCap) {
  auto m = firstDifference(r, rTilde, depthCap);
  if (!m) throw Error(ErrorCode::Precondition, "r and r~ must be distinct");

  const Itinerary u = kneading(s, depth, depthCap);
  const Itinerary ut = itinerary(r, s, depth, depthCap);
  if (ut != itinerary(rTilde, s, depth, depthCap))
    throw Error(ErrorCode::Precondition,
                "r and r~ do not share an itinerary up to depth " +
                    std::to_string(depth));

  SharedItineraryReport report;
  report.firstDifference = *m;
  report.depth = depth;
  if (*m > depth) return report;

  std::vector<ExternalAddress> sShifts{s};
  ExternalAddress a = shift(r, *m);
  ExternalAddress b = shift(rTilde, *m);
  for (std::size_t k = 0; *m + k <= depth; ++k) {
    SharedItineraryStep step;
    step.k = k;
    while (sShifts.size() <= k && !sShifts.back().isInfinity())
      sShifts.push_back(shift(sShifts.back()));
    if (compareLex(a, b, depthCap) != Ordering::Equal) {
      for (std::size_t j = 0; j <= k && j < sShifts.size(); ++j) {
        if (surrounds(a, b, sShifts[j], depthCap)) {
          step.surroundWitness = j;
          break;
        }
      }
    }
    if (k >= 1 && *m + k <= ut.depth()) {
      const ItineraryEntry& target = ut[*m + k];
      step.entryMember = std::any_of(
          u.entries.begin(),
          u.entries.begin() + static_cast<long>(std::min(k, u.depth())),
          [&](const ItineraryEntry& e) { return e == target; });
    }
    report.steps.push_back(step);
    if (a.isInfinity() || b.isInfinity()) break;
    a = shift(a);
    b = shift(b);
  }
  return report;
}

}  // namespace expdyn
