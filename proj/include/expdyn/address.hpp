#ifndef EXPDYN_ADDRESS_HPP
#define EXPDYN_ADDRESS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expdyn/error.hpp"

namespace expdyn {

using Entry = std::int64_t;

/// Symbols are stored doubled so that integers, half-integers and the
/// terminating infinity share one totally ordered integer domain.
using Symbol = std::int64_t;
inline constexpr Symbol kInfinitySymbol = std::numeric_limits<Symbol>::max();

/// Default number of entries a comparison involving a generator-backed
/// address may inspect before answering Undecided.
inline constexpr std::size_t kDefaultDepthCap = 4096;

/// External address of an exponential map.
///
/// Three kinds are represented:
///  - Infinite: an integer sequence, either eventually periodic (prefix plus
///    minimal cycle, canonicalized on construction) or generator-backed
///    (explicit prefix followed by a pure index rule with a resolution cap).
///  - Intermediate: s_1 ... s_{n-2} s_{n-1} inf with s_{n-1} a half-integer,
///    n >= 2.
///  - Infinity: the compactification point, the intermediate address of
///    length 1.
class ExternalAddress {
 public:
  enum class Kind { Infinite, Intermediate, Infinity };

  /// Rule k -> s_k (1-based). nullopt marks an entry that is not
  /// representable as a 64-bit integer.
  using Generator = std::function<std::optional<Entry>(std::size_t)>;

  static ExternalAddress periodic(std::vector<Entry> prefix,
                                  std::vector<Entry> cycle);
  static ExternalAddress constant(Entry value) { return periodic({}, {value}); }
  /// `halfTwice` is twice the half-integer entry and must be odd.
  static ExternalAddress intermediate(std::vector<Entry> entries,
                                      Entry halfTwice);
  static ExternalAddress infinity();
  /// Entries k <= prefix.size() come from `prefix`, later ones from
  /// `rule(k - prefix.size())`; indices into the rule beyond `ruleCap`
  /// are unresolvable.
  static ExternalAddress generated(Generator rule, std::size_t ruleCap,
                                   std::vector<Entry> prefix = {});

  Kind kind() const noexcept { return kind_; }
  bool isInfinite() const noexcept { return kind_ == Kind::Infinite; }
  bool isIntermediate() const noexcept { return kind_ == Kind::Intermediate; }
  bool isInfinity() const noexcept { return kind_ == Kind::Infinity; }
  bool isGenerated() const noexcept { return rule_ != nullptr; }
  /// True when every order query on this address is decided exactly.
  bool isExact() const noexcept { return rule_ == nullptr; }

  const std::vector<Entry>& prefix() const noexcept { return prefix_; }
  const std::vector<Entry>& cycle() const noexcept { return cycle_; }
  /// Twice the half-integer entry of an intermediate address.
  Entry halfTwice() const noexcept { return halfTwice_; }
  /// Number of symbols including the terminator (intermediate / infinity).
  std::size_t length() const noexcept;

  /// Largest index whose entry can be resolved (SIZE_MAX when unbounded).
  std::size_t resolutionCap() const noexcept;

  /// Doubled symbol at 1-based index k, nullopt when unresolvable or past
  /// the terminator.
  std::optional<Symbol> symbol(std::size_t k) const;
  /// Integer entry at 1-based index k of an infinite address.
  std::optional<Entry> entry(std::size_t k) const;
  /// Entry k, throwing UndecidedError when it cannot be resolved.
  Entry at(std::size_t k) const;

  bool operator==(const ExternalAddress& other) const;

 private:
  ExternalAddress() = default;
  void canonicalize();

  Kind kind_ = Kind::Infinite;
  std::vector<Entry> prefix_;
  std::vector<Entry> cycle_;
  Entry halfTwice_ = 0;
  std::shared_ptr<const Generator> rule_;
  std::size_t ruleOffset_ = 0;
  std::size_t ruleCap_ = 0;

  friend ExternalAddress shift(const ExternalAddress& a);
  friend ExternalAddress prepend(Entry j, const ExternalAddress& a);
  friend bool alignedGenerators(const ExternalAddress& a,
                                const ExternalAddress& b);
};

enum class Ordering { Less, Equal, Greater, Undecided };

std::string_view orderingName(Ordering o);

/// Parses the textual address grammar:
///   addr    := "inf" | "(" entries ")" | entries "," "(" entries ")"
///            | [entries ","] half "," "inf"
///   entries := int ("," int)*
///   half    := odd-int "/2"
/// Whitespace is ignored.
ExternalAddress parseAddress(std::string_view text);
/// Canonical text. Generator-backed addresses print their first
/// `generatorPreview` entries followed by ",..." (not parseable).
std::string formatAddress(const ExternalAddress& a,
                          std::size_t generatorPreview = 16);

/// Lexicographic order on S. Half-integers compare numerically and the
/// terminating infinity is greater than every entry.
Ordering compareLex(const ExternalAddress& a, const ExternalAddress& b,
                    std::size_t depthCap = kDefaultDepthCap);

/// True iff (a, b, c) is positively oriented on the circle S u {inf}.
/// Throws UndecidedError if an underlying comparison is undecided.
bool circularOrder(const ExternalAddress& a, const ExternalAddress& b,
                   const ExternalAddress& c,
                   std::size_t depthCap = kDefaultDepthCap);

/// Drops the first entry. An intermediate address of length 2 maps to inf.
ExternalAddress shift(const ExternalAddress& a);
ExternalAddress shift(const ExternalAddress& a, std::size_t times);
/// The address j a, with shift(prepend(j, a)) == a.
ExternalAddress prepend(Entry j, const ExternalAddress& a);

/// True iff s lies strictly between r1 and r2.
bool surrounds(const ExternalAddress& r1, const ExternalAddress& r2,
               const ExternalAddress& s,
               std::size_t depthCap = kDefaultDepthCap);

/// Index of the first entry where a and b differ (nullopt if equal).
/// Throws UndecidedError when undecided within depthCap.
std::optional<std::size_t> firstDifference(
    const ExternalAddress& a, const ExternalAddress& b,
    std::size_t depthCap = kDefaultDepthCap);

/// Explicit first n entries of an infinite address.
std::vector<Entry> expand(const ExternalAddress& a, std::size_t n);

}  // namespace expdyn

#endif  // EXPDYN_ADDRESS_HPP
