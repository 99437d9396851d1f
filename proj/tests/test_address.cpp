#include <doctest.h>

#include <random>

#include "expdyn/address.hpp"
#include "oracle.hpp"

using namespace expdyn;

TEST_SUITE("address") {

TEST_CASE("parse eventually periodic and intermediate addresses") {
  const auto a = parseAddress("0,(1)");
  CHECK(a.isInfinite());
  CHECK(a.prefix() == std::vector<Entry>{0});
  CHECK(a.cycle() == std::vector<Entry>{1});

  const auto zero = parseAddress("(0)");
  CHECK(zero.prefix().empty());
  CHECK(zero.cycle() == std::vector<Entry>{0});

  const auto m = parseAddress("0,1,1/2,inf");
  CHECK(m.isIntermediate());
  CHECK(m.length() == 4);
  CHECK(m.halfTwice() == 1);

  CHECK(parseAddress(" -3/2 , inf ").halfTwice() == -3);
  CHECK(parseAddress("inf").isInfinity());
}

TEST_CASE("canonical form makes equal addresses structurally equal") {
  CHECK(parseAddress("0,(1,1)") == parseAddress("0,(1)"));
  CHECK(parseAddress("1,(1)") == parseAddress("(1)"));
  CHECK(parseAddress("1,2,(1,2)") == parseAddress("(1,2)"));
  CHECK(parseAddress("2,(1,2)") == parseAddress("(2,1)"));
  CHECK(formatAddress(parseAddress("2,(1,2)")) == "(2,1)");
}

TEST_CASE("format round-trips the grammar") {
  for (const char* text : {"(0)", "0,(1)", "2,0,3,0,1,3,0,(1)", "0,1,1/2,inf", "-3/2,inf",
                           "inf", "-1,(1)", "(1,0,2)"})
    CHECK(formatAddress(parseAddress(text)) == text);
}

TEST_CASE("syntax errors") {
  for (const char* text : {"", "1,2,3", "(", "()", "0,(1", "1/3,inf", "2/2,inf", "1/2",
                           "0,(1),2", "a", "1,,2"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(parseAddress(text), SyntaxError);
  }
}

TEST_CASE("lexicographic comparisons") {
  CHECK(compareLex(parseAddress("0,(1)"), parseAddress("(0)")) == Ordering::Greater);
  CHECK(compareLex(parseAddress("(1)"), parseAddress("0,1,1/2,inf")) == Ordering::Greater);
  const auto a = parseAddress("2,0,(1)");
  CHECK(compareLex(a, a) == Ordering::Equal);
  // Half-integers sit between integers; the terminator exceeds every entry.
  CHECK(compareLex(parseAddress("1/2,inf"), parseAddress("(0)")) == Ordering::Greater);
  CHECK(compareLex(parseAddress("1/2,inf"), parseAddress("(1)")) == Ordering::Less);
  CHECK(compareLex(parseAddress("0,1/2,inf"), parseAddress("0,(0)")) == Ordering::Greater);
  CHECK(compareLex(parseAddress("inf"), parseAddress("(1000)")) == Ordering::Greater);
}

TEST_CASE("compareLex agrees with entrywise comparison and is a total order") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(0, 3), per(1, 3), val(-2, 2);
  auto randomSeq = [&](int n) {
    oracle::Seq v;
    for (int i = 0; i < n; ++i) v.push_back(val(rng));
    return v;
  };
  std::vector<ExternalAddress> as;
  std::vector<oracle::Seq> us;
  for (int i = 0; i < 60; ++i) {
    const auto p = randomSeq(len(rng)), c = randomSeq(per(rng));
    as.push_back(ExternalAddress::periodic(p, c));
    us.push_back(oracle::unroll(p, c, 40));
  }
  auto sign = [](Ordering o) { return o == Ordering::Less ? -1 : o == Ordering::Equal ? 0 : 1; };
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = 0; j < as.size(); ++j) {
      const Ordering o = compareLex(as[i], as[j]);
      REQUIRE(o != Ordering::Undecided);
      CHECK(sign(o) == oracle::lex(us[i], us[j]));
      CHECK(sign(compareLex(as[j], as[i])) == -sign(o));
      CHECK((o == Ordering::Equal) == (as[i] == as[j]));
    }
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j)
      for (std::size_t k = 0; k < 20; ++k)
        if (compareLex(as[i], as[j]) == Ordering::Less &&
            compareLex(as[j], as[k]) == Ordering::Less)
          CHECK(compareLex(as[i], as[k]) == Ordering::Less);
}

TEST_CASE("generator-backed comparisons report Undecided at the cap") {
  const auto g = ExternalAddress::generated([](std::size_t) { return Entry{1}; }, 100);
  CHECK(compareLex(g, parseAddress("(1)"), 50) == Ordering::Undecided);
  CHECK(compareLex(g, parseAddress("1,1,(0)"), 50) == Ordering::Greater);
  CHECK(compareLex(g, parseAddress("(1)"), 200) == Ordering::Undecided);
  CHECK_THROWS_AS(firstDifference(g, parseAddress("(1)"), 50), UndecidedError);
}

TEST_CASE("circular order") {
  const auto inf = ExternalAddress::infinity();
  const auto a0 = parseAddress("(0)"), a1 = parseAddress("(1)"), a5 = parseAddress("(5)");
  CHECK(circularOrder(a0, a1, inf));
  CHECK_FALSE(circularOrder(a1, a0, inf));
  CHECK(circularOrder(inf, a0, a5));
  CHECK(circularOrder(a1, inf, a0));
}

TEST_CASE("shift and prepend") {
  CHECK(shift(parseAddress("0,(1)")) == parseAddress("(1)"));
  CHECK(shift(parseAddress("1/2,inf")).isInfinity());
  CHECK(shift(parseAddress("(0)")) == parseAddress("(0)"));
  CHECK(shift(parseAddress("0,1,1/2,inf")) == parseAddress("1,1/2,inf"));
  CHECK(prepend(0, parseAddress("(0)")) == parseAddress("(0)"));
  CHECK(prepend(2, parseAddress("0,(1)")) == parseAddress("2,0,(1)"));
  CHECK(prepend(-1, parseAddress("(1)")) == parseAddress("-1,(1)"));
  for (const char* text : {"(0)", "0,(1)", "3,(1,2)", "0,1/2,inf"})
    for (Entry j : {-3, 0, 1, 7}) CHECK(shift(prepend(j, parseAddress(text))) == parseAddress(text));
  CHECK(shift(parseAddress("2,0,3,(1)"), 3) == parseAddress("(1)"));
}

TEST_CASE("shift is locally order preserving") {
  const std::vector<const char*> xs{"0,(1)", "0,(0)", "0,2,(1)", "0,1,(0,2)", "0,(2,0)"};
  for (const char* x : xs)
    for (const char* y : xs) {
      const auto a = parseAddress(x), b = parseAddress(y);
      if (compareLex(a, b) == Ordering::Less) CHECK(compareLex(shift(a), shift(b)) == Ordering::Less);
    }
}

TEST_CASE("surrounds") {
  CHECK(surrounds(parseAddress("(0)"), parseAddress("(2)"), parseAddress("(1)")));
  CHECK_FALSE(surrounds(parseAddress("(0)"), parseAddress("(2)"), parseAddress("(3)")));
  CHECK(surrounds(parseAddress("0,(1)"), parseAddress("2,(1)"), parseAddress("(1)")));
  CHECK(surrounds(parseAddress("2,(1)"), parseAddress("0,(1)"), parseAddress("(1)")));
  CHECK_FALSE(surrounds(parseAddress("(0)"), parseAddress("(2)"), parseAddress("(0)")));
}

TEST_CASE("expand and firstDifference") {
  CHECK(expand(parseAddress("2,(0,1)"), 5) == std::vector<Entry>{2, 0, 1, 0, 1});
  CHECK(firstDifference(parseAddress("0,(1)"), parseAddress("0,1,1,(2)")) == 4u);
  CHECK_FALSE(firstDifference(parseAddress("(1)"), parseAddress("1,(1)")).has_value());
}

}
