#include "expdyn/address.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace expdyn {

namespace {

constexpr Entry kEntryLimit = Entry{1} << 60;

std::optional<Symbol> doubled(std::optional<Entry> e) {
  if (!e || *e > kEntryLimit || *e < -kEntryLimit) return std::nullopt;
  return 2 * *e;
}

std::size_t minimalPeriod(const std::vector<Entry>& cycle) {
  const std::size_t n = cycle.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = cycle[i] == cycle[i - d];
    if (ok) return d;
  }
  return n;
}

// Number of leading symbols after which two exact addresses either differ or
// agree forever.
std::size_t exactHorizon(const ExternalAddress& a, const ExternalAddress& b) {
  auto shape = [](const ExternalAddress& x) -> std::pair<std::size_t, std::size_t> {
    if (x.isInfinite()) return {x.prefix().size(), x.cycle().size()};
    return {x.length(), 1};
  };
  auto [pa, la] = shape(a);
  auto [pb, lb] = shape(b);
  return std::max(pa, pb) + std::lcm(la, lb);
}

}  // namespace

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "syntax";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Undecided: return "undecided";
    case ErrorCode::SingularFloor: return "singular-floor";
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::RefinementCap: return "refinement-cap";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

std::string_view orderingName(Ordering o) {
  switch (o) {
    case Ordering::Less: return "LT";
    case Ordering::Equal: return "EQ";
    case Ordering::Greater: return "GT";
    case Ordering::Undecided: return "Undecided";
  }
  return "?";
}

ExternalAddress ExternalAddress::periodic(std::vector<Entry> prefix,
                                          std::vector<Entry> cycle) {
  if (cycle.empty())
    throw Error(ErrorCode::InvalidArgument,
                "an eventually periodic address needs a nonempty cycle");
  ExternalAddress a;
  a.kind_ = Kind::Infinite;
  a.prefix_ = std::move(prefix);
  a.cycle_ = std::move(cycle);
  a.canonicalize();
  return a;
}

ExternalAddress ExternalAddress::intermediate(std::vector<Entry> entries,
                                              Entry halfTwice) {
  if (halfTwice % 2 == 0)
    throw Error(ErrorCode::InvalidArgument,
                "intermediate address needs a half-integer penultimate entry");
  ExternalAddress a;
  a.kind_ = Kind::Intermediate;
  a.prefix_ = std::move(entries);
  a.halfTwice_ = halfTwice;
  return a;
}

ExternalAddress ExternalAddress::infinity() {
  ExternalAddress a;
  a.kind_ = Kind::Infinity;
  return a;
}

ExternalAddress ExternalAddress::generated(Generator rule, std::size_t ruleCap,
                                           std::vector<Entry> prefix) {
  if (!rule) throw Error(ErrorCode::InvalidArgument, "empty generator rule");
  ExternalAddress a;
  a.kind_ = Kind::Infinite;
  a.prefix_ = std::move(prefix);
  a.rule_ = std::make_shared<const Generator>(std::move(rule));
  a.ruleCap_ = ruleCap;
  return a;
}

void ExternalAddress::canonicalize() {
  cycle_.resize(minimalPeriod(cycle_));
  while (!prefix_.empty() && prefix_.back() == cycle_.back()) {
    std::rotate(cycle_.rbegin(), cycle_.rbegin() + 1, cycle_.rend());
    prefix_.pop_back();
  }
}

std::size_t ExternalAddress::length() const noexcept {
  switch (kind_) {
    case Kind::Intermediate: return prefix_.size() + 2;
    case Kind::Infinity: return 1;
    case Kind::Infinite: break;
  }
  return std::numeric_limits<std::size_t>::max();
}

std::size_t ExternalAddress::resolutionCap() const noexcept {
  if (!rule_) return length();
  const std::size_t rest = ruleCap_ > ruleOffset_ ? ruleCap_ - ruleOffset_ : 0;
  return prefix_.size() + rest;
}

std::optional<Entry> ExternalAddress::entry(std::size_t k) const {
  if (k == 0 || kind_ != Kind::Infinite) return std::nullopt;
  if (k <= prefix_.size()) return prefix_[k - 1];
  const std::size_t j = k - prefix_.size();
  if (rule_) {
    const std::size_t idx = j + ruleOffset_;
    if (idx > ruleCap_) return std::nullopt;
    return (*rule_)(idx);
  }
  return cycle_[(j - 1) % cycle_.size()];
}

Entry ExternalAddress::at(std::size_t k) const {
  auto e = entry(k);
  if (!e)
    throw UndecidedError(k, "entry " + std::to_string(k) +
                                " of address is not resolvable");
  return *e;
}

std::optional<Symbol> ExternalAddress::symbol(std::size_t k) const {
  if (k == 0) return std::nullopt;
  switch (kind_) {
    case Kind::Infinite:
      return doubled(entry(k));
    case Kind::Infinity:
      return k == 1 ? std::optional<Symbol>(kInfinitySymbol) : std::nullopt;
    case Kind::Intermediate: {
      const std::size_t n = prefix_.size() + 2;
      if (k <= n - 2) return doubled(prefix_[k - 1]);
      if (k == n - 1) return halfTwice_;
      if (k == n) return kInfinitySymbol;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool ExternalAddress::operator==(const ExternalAddress& other) const {
  if (kind_ != other.kind_) return false;
  if (rule_ || other.rule_) return compareLex(*this, other) == Ordering::Equal;
  return prefix_ == other.prefix_ && cycle_ == other.cycle_ &&
         halfTwice_ == other.halfTwice_;
}

// Two generator-backed addresses reading the same rule at the same index for
// every position past their prefixes.
bool alignedGenerators(const ExternalAddress& a, const ExternalAddress& b) {
  if (!a.rule_ || a.rule_ != b.rule_) return false;
  const auto keyA = static_cast<long long>(a.ruleOffset_) -
                    static_cast<long long>(a.prefix_.size());
  const auto keyB = static_cast<long long>(b.ruleOffset_) -
                    static_cast<long long>(b.prefix_.size());
  return keyA == keyB;
}

Ordering compareLex(const ExternalAddress& a, const ExternalAddress& b,
                    std::size_t depthCap) {
  std::size_t limit = depthCap;
  bool exact = false;
  if (a.isExact() && b.isExact()) {
    limit = exactHorizon(a, b);
    exact = true;
  } else if (alignedGenerators(a, b)) {
    limit = std::max(a.prefix().size(), b.prefix().size());
    exact = true;
  }
  for (std::size_t k = 1; k <= limit; ++k) {
    auto sa = a.symbol(k);
    auto sb = b.symbol(k);
    if (!sa || !sb) return Ordering::Undecided;
    if (*sa < *sb) return Ordering::Less;
    if (*sa > *sb) return Ordering::Greater;
    if (*sa == kInfinitySymbol) return Ordering::Equal;
  }
  return exact ? Ordering::Equal : Ordering::Undecided;
}

namespace {

Ordering decided(const ExternalAddress& a, const ExternalAddress& b,
                 std::size_t depthCap) {
  Ordering o = compareLex(a, b, depthCap);
  if (o == Ordering::Undecided)
    throw UndecidedError(depthCap, "comparison of " + formatAddress(a) +
                                       " and " + formatAddress(b) +
                                       " undecided at depth cap");
  return o;
}

}  // namespace

bool circularOrder(const ExternalAddress& a, const ExternalAddress& b,
                   const ExternalAddress& c, std::size_t depthCap) {
  const bool ab = decided(a, b, depthCap) == Ordering::Less;
  const bool bc = decided(b, c, depthCap) == Ordering::Less;
  const bool ca = decided(c, a, depthCap) == Ordering::Less;
  // Exactly two of the three must hold for a positive orientation.
  return (ab && bc) || (bc && ca) || (ca && ab);
}

ExternalAddress shift(const ExternalAddress& a) {
  using Kind = ExternalAddress::Kind;
  if (a.kind_ == Kind::Infinity)
    throw Error(ErrorCode::Precondition, "shift of inf is undefined");
  ExternalAddress r = a;
  if (a.kind_ == Kind::Intermediate) {
    if (r.prefix_.empty()) return ExternalAddress::infinity();
    r.prefix_.erase(r.prefix_.begin());
    return r;
  }
  if (!r.prefix_.empty()) {
    r.prefix_.erase(r.prefix_.begin());
  } else if (r.rule_) {
    ++r.ruleOffset_;
  } else {
    std::rotate(r.cycle_.begin(), r.cycle_.begin() + 1, r.cycle_.end());
  }
  return r;
}

ExternalAddress shift(const ExternalAddress& a, std::size_t times) {
  ExternalAddress r = a;
  for (std::size_t i = 0; i < times; ++i) r = shift(r);
  return r;
}

ExternalAddress prepend(Entry j, const ExternalAddress& a) {
  if (a.isInfinity())
    throw Error(ErrorCode::Precondition, "cannot prepend an entry to inf");
  ExternalAddress r = a;
  r.prefix_.insert(r.prefix_.begin(), j);
  if (r.isInfinite() && !r.rule_) r.canonicalize();
  return r;
}

bool surrounds(const ExternalAddress& r1, const ExternalAddress& r2,
               const ExternalAddress& s, std::size_t depthCap) {
  Ordering o = decided(r1, r2, depthCap);
  if (o == Ordering::Equal)
    throw Error(ErrorCode::Precondition, "surrounds needs r1 != r2");
  const ExternalAddress& lo = o == Ordering::Less ? r1 : r2;
  const ExternalAddress& hi = o == Ordering::Less ? r2 : r1;
  return decided(lo, s, depthCap) == Ordering::Less &&
         decided(s, hi, depthCap) == Ordering::Less;
}

std::optional<std::size_t> firstDifference(const ExternalAddress& a,
                                           const ExternalAddress& b,
                                           std::size_t depthCap) {
  std::size_t limit = depthCap;
  if (a.isExact() && b.isExact()) limit = exactHorizon(a, b);
  for (std::size_t k = 1; k <= limit; ++k) {
    auto sa = a.symbol(k);
    auto sb = b.symbol(k);
    if (!sa || !sb) throw UndecidedError(k, "entry not resolvable");
    if (*sa != *sb) return k;
    if (*sa == kInfinitySymbol) return std::nullopt;
  }
  if (a.isExact() && b.isExact()) return std::nullopt;
  if (alignedGenerators(a, b)) return std::nullopt;
  throw UndecidedError(depthCap, "first difference beyond depth cap");
}

std::vector<Entry> expand(const ExternalAddress& a, std::size_t n) {
  if (!a.isInfinite())
    throw Error(ErrorCode::Precondition, "expand needs an infinite address");
  std::vector<Entry> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) out.push_back(a.at(k));
  return out;
}

// ---------------------------------------------------------------------------
// Text grammar

namespace {

class AddressParser {
 public:
  explicit AddressParser(std::string_view text) : text_(text) {}

  ExternalAddress parse() {
    std::vector<Item> items;
    skipSpace();
    if (atEnd()) throw SyntaxError(pos_, "empty address");
    for (;;) {
      items.push_back(item());
      skipSpace();
      if (atEnd()) break;
      if (peek() != ',')
        throw SyntaxError(pos_, std::string("expected ',' but found '") +
                                    peek() + "'");
      ++pos_;
    }
    return assemble(items);
  }

 private:
  enum class ItemKind { Int, Half, Inf, Cycle };
  struct Item {
    ItemKind kind;
    std::size_t pos;
    Entry value = 0;  // twice the value for Half
    std::vector<Entry> cycle;
  };

  bool atEnd() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skipSpace() {
    while (!atEnd() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  Entry integer() {
    skipSpace();
    const std::size_t start = pos_;
    bool negative = false;
    if (!atEnd() && (peek() == '-' || peek() == '+')) {
      negative = peek() == '-';
      ++pos_;
      skipSpace();
    }
    if (atEnd() || !std::isdigit(static_cast<unsigned char>(peek())))
      throw SyntaxError(pos_, "expected an integer");
    Entry v = 0;
    while (!atEnd() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      if (v > kEntryLimit) throw SyntaxError(start, "entry out of range");
      ++pos_;
    }
    return negative ? -v : v;
  }

  Item item() {
    skipSpace();
    const std::size_t start = pos_;
    if (text_.substr(pos_, 3) == "inf") {
      pos_ += 3;
      return {ItemKind::Inf, start, 0, {}};
    }
    if (peek() == '(') {
      ++pos_;
      Item it{ItemKind::Cycle, start, 0, {}};
      for (;;) {
        it.cycle.push_back(integer());
        skipSpace();
        if (atEnd()) throw SyntaxError(pos_, "unterminated cycle, expected ')'");
        if (peek() == ')') {
          ++pos_;
          break;
        }
        if (peek() != ',') throw SyntaxError(pos_, "expected ',' or ')'");
        ++pos_;
      }
      return it;
    }
    Entry v = integer();
    skipSpace();
    if (!atEnd() && peek() == '/') {
      ++pos_;
      Entry denom = integer();
      if (denom != 2)
        throw SyntaxError(start, "fraction entries must have denominator 2");
      if (v % 2 == 0)
        throw SyntaxError(start,
                          "intermediate address with non-half-integer "
                          "penultimate entry");
      return {ItemKind::Half, start, v, {}};
    }
    return {ItemKind::Int, start, v, {}};
  }

  ExternalAddress assemble(const std::vector<Item>& items) {
    const Item& last = items.back();
    auto requireInts = [&](std::size_t count) {
      std::vector<Entry> out;
      for (std::size_t i = 0; i < count; ++i) {
        if (items[i].kind != ItemKind::Int)
          throw SyntaxError(items[i].pos, "expected an integer entry");
        out.push_back(items[i].value);
      }
      return out;
    };
    switch (last.kind) {
      case ItemKind::Cycle:
        return ExternalAddress::periodic(requireInts(items.size() - 1),
                                         last.cycle);
      case ItemKind::Inf: {
        if (items.size() == 1) return ExternalAddress::infinity();
        const Item& pen = items[items.size() - 2];
        if (pen.kind != ItemKind::Half)
          throw SyntaxError(pen.pos,
                            "intermediate address with non-half-integer "
                            "penultimate entry");
        return ExternalAddress::intermediate(requireInts(items.size() - 2),
                                             pen.value);
      }
      case ItemKind::Half:
        throw SyntaxError(last.pos, "half-integer entry must be followed by inf");
      case ItemKind::Int:
        break;
    }
    requireInts(items.size());
    throw SyntaxError(text_.size(),
                      "finite integer sequence is not an external address; "
                      "add a periodic cycle '(...)' or a half-integer and 'inf'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ExternalAddress parseAddress(std::string_view text) {
  return AddressParser(text).parse();
}

std::string formatAddress(const ExternalAddress& a,
                          std::size_t generatorPreview) {
  std::ostringstream out;
  auto list = [&out](const std::vector<Entry>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  };
  switch (a.kind()) {
    case ExternalAddress::Kind::Infinity:
      return "inf";
    case ExternalAddress::Kind::Intermediate:
      list(a.prefix());
      if (!a.prefix().empty()) out << ",";
      out << a.halfTwice() << "/2,inf";
      return out.str();
    case ExternalAddress::Kind::Infinite:
      break;
  }
  if (a.isGenerated()) {
    const std::size_t n = std::min(generatorPreview, a.resolutionCap());
    for (std::size_t k = 1; k <= n; ++k) {
      auto e = a.entry(k);
      out << (k > 1 ? "," : "");
      if (e) out << *e; else out << "?";
    }
    out << ",...";
    return out.str();
  }
  list(a.prefix());
  if (!a.prefix().empty()) out << ",";
  out << "(";
  list(a.cycle());
  out << ")";
  return out.str();
}

}  // namespace expdyn
