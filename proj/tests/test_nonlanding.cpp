#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "expdyn/growth.hpp"
#include "expdyn/itinerary.hpp"
#include "expdyn/nonlanding.hpp"
#include "oracle.hpp"

using namespace expdyn;
using doctest::Approx;

namespace {

// T_1 s_1..s_{n_1-1} T_{n_1} s_1..s_{n_2-1} T_{n_2} ... written out by hand.
oracle::Seq familyOracle(const oracle::Seq& s, const std::vector<std::size_t>& ns,
                         std::size_t count) {
  auto T = [&](std::size_t n) {
    return 2 + *std::max_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
  };
  oracle::Seq out{T(1)};
  for (std::size_t j = 0; out.size() < count; ++j) {
    const std::size_t n = j < ns.size() ? ns[j] : ns.back();
    for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(s[i]);
    out.push_back(T(n));
  }
  out.resize(count);
  return out;
}

Parameter misiurewicz() { return knownParameter(Parameter::Label::MisiurewiczExample); }

}  // namespace

TEST_SUITE("nonlanding") {

TEST_CASE("T_n sequence") {
  for (std::size_t n = 1; n <= 10; ++n) CHECK(teeSequence(parseAddress("(0)"), n) == 2);
  CHECK(teeSequence(parseAddress("0,(1)"), 1) == 2);
  for (std::size_t n = 2; n <= 10; ++n) CHECK(teeSequence(parseAddress("0,(1)"), n) == 3);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(teeSequence(parseAddress("5,1,(2)"), n) == 7);
  const auto s = parseAddress("1,0,(3,-1)");
  for (std::size_t n = 2; n <= 12; ++n) CHECK(teeSequence(s, n) >= teeSequence(s, n - 1));
}

TEST_CASE("stage blocks") {
  const auto s = parseAddress("0,(1)");
  CHECK(stageBlock(s, 1) == std::vector<Entry>{2});
  CHECK(stageBlock(s, 2) == std::vector<Entry>{0, 3});
  CHECK(stageBlock(s, 3) == std::vector<Entry>{0, 1, 3});
}

TEST_CASE("preimage stage addresses") {
  const auto s = parseAddress("0,(1)");
  CHECK(formatAddress(candidateAddress({{}, s, {}}, Tail::LoopToBase)) == "2,0,(1)");
  CHECK(formatAddress(candidateAddress({{2}, s, {}}, Tail::LoopToBase)) == "2,0,3,0,(1)");
  CHECK(formatAddress(candidateAddress({{2, 3}, s, {}}, Tail::LoopToBase)) ==
        "2,0,3,0,1,3,0,(1)");
}

TEST_CASE("family members") {
  const auto zero = parseAddress("(0)");
  CHECK(candidateAddress({{1, 1}, zero, {}}, Tail::ContinueFamily) == parseAddress("(2)"));
  CHECK(candidateAddress({{}, zero, {}}, Tail::ContinueFamily) == parseAddress("(2)"));

  const oracle::Seq s = oracle::unroll({0}, {1}, 64);
  const auto base = parseAddress("0,(1)");
  for (const std::vector<std::size_t>& ns : std::vector<std::vector<std::size_t>>{
           {2, 3}, {2, 3, 4}, {1}, {5, 1, 2}, {3, 3, 3, 7}}) {
    const auto r = candidateAddress({ns, base, {}}, Tail::ContinueFamily);
    CHECK(r.isExact());
    CHECK(expand(r, 30) == familyOracle(s, ns, 30));
  }

  // An unbounded continuation n_j = j is held by a generator.
  StagePlan grow{{1, 2}, base, [](std::size_t j) { return j; }};
  const auto r = candidateAddress(grow, Tail::ContinueFamily);
  CHECK(r.isGenerated());
  std::vector<std::size_t> ns;
  for (std::size_t j = 1; j <= 30; ++j) ns.push_back(j);
  CHECK(expand(r, 30) == familyOracle(s, ns, 30));
}

TEST_CASE("bounded base gives bounded candidates") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(1, 6);
  for (const char* text : {"0,(1)", "(2,0,1)", "1,(0)", "-1,(3,0)"}) {
    const auto s = parseAddress(text);
    const auto ent = expand(s, 64);
    const Entry lo = std::min<Entry>(*std::min_element(ent.begin(), ent.end()), 0);
    const Entry hi = 2 + *std::max_element(ent.begin(), ent.end());
    for (int trial = 0; trial < 10; ++trial) {
      StagePlan plan{{pick(rng), pick(rng), pick(rng)}, s, {}};
      for (Tail tail : {Tail::ContinueFamily, Tail::LoopToBase})
        for (Entry e : expand(candidateAddress(plan, tail), 80)) {
          CHECK(e >= lo);
          CHECK(e <= hi);
        }
    }
  }
}

TEST_CASE("growth bound report for a family member") {
  const Parameter p = misiurewicz();
  const auto s = parseAddress("0,(1)");
  const double tS = std::log1p(2 * std::numbers::pi);
  const auto r = candidateAddress({{2, 3}, s, {}}, Tail::ContinueFamily);
  const Claim1Report rep = claim1Report(r, s, p.kappa);
  CHECK(rep.tStarS == Approx(tS));
  CHECK(rep.T0 == Approx(2 * tS + std::log(std::abs(p.kappa)) + 8));
  CHECK(rep.bound == Approx(tS + 2));
  CHECK(rep.firstTerm == Approx(4 * std::numbers::pi));
  CHECK(rep.tStarR >= rep.firstTerm);
  CHECK(rep.boundHolds == (rep.tStarR <= rep.bound));
  CHECK(rep.bigTeeR == Approx(bigTee(r, p.kappa)));

  const Claim1Report z = claim1Report(parseAddress("(2)"), parseAddress("(0)"), {-2, 0});
  CHECK(z.tStarS == 0.0);
  CHECK(z.T0 == Approx(std::log(2.0) + 8));
}

TEST_CASE("itinerary mismatch witnesses") {
  const auto s = parseAddress("0,(1)");
  const Claim2Report rep = claim2Check({{2, 3, 4}, s, {}}, 30);
  CHECK(rep.witnesses.size() == 30);
  CHECK(rep.allFound());
  const auto r = candidateAddress({{2, 3, 4}, s, {}}, Tail::ContinueFamily);
  const auto u = kneading(s, 400);
  const auto ur = itinerary(r, s, 400);
  for (const Claim2Witness& w : rep.witnesses) {
    REQUIRE(w.k.has_value());
    const std::size_t k = *w.k;
    CHECK(w.kPrime >= k);
    CHECK(w.entry == r.at(w.m + k));
    CHECK(w.entry == teeSequence(s, w.kPrime));
    CHECK(w.entry >= s.at(k) + 2);
    CHECK(u[k] != ur[w.m + k]);
  }
}

TEST_CASE("family members have pairwise distinct itineraries") {
  const auto s = parseAddress("0,(1)");
  const auto rep = pairwiseDistinctItineraries({{{2, 3}, s, {}}, {{3, 3}, s, {}},
                                                {{1, 2, 2}, s, {}}, {{2, 4}, s, {}}},
                                               50);
  CHECK(rep.pairs == 6);
  CHECK(rep.allDistinct());
  CHECK_THROWS_AS(pairwiseDistinctItineraries({{{2, 3}, s, {}}, {{2, 3}, s, {}}}, 50), Error);
}

TEST_CASE("stage selection") {
  const Parameter p = misiurewicz();
  const auto s = *p.singularAddress;
  CertificateConfig cfg;
  const double T0 = 12.0;
  const StageRecord a = selectNextStage(p, s, {{}, s, {}}, 1, T0, 60, cfg);
  CHECK(a.j == 1);
  CHECK(a.t <= T0);
  CHECK(a.stageAbsG > 1.0);
  CHECK(a.absG >= 1.0);
  CHECK(a.n >= 1);
  CHECK(std::find(a.feasible.begin(), a.feasible.end(), a.n) != a.feasible.end());
  CHECK(a.attempts.size() == cfg.attemptCap);

  const StageRecord b = selectNextStage(p, s, {{}, s, {}}, 1, T0, 60, cfg);
  CHECK(b.t == a.t);
  CHECK(b.absG == a.absG);
  CHECK(b.n == a.n);

  const StageRecord c = selectNextStage(p, s, {{a.n}, s, {}}, 2, T0, 60, cfg, a.t);
  CHECK(c.t < a.t);
  CHECK(c.n > a.n);

  CHECK_THROWS_AS(selectNextStage(p, s, {{}, s, {}}, 1, T0, 0, cfg), Error);
  CHECK_THROWS_AS(selectNextStage(p, s, {{}, s, {}}, 0, T0, 60, cfg), Error);
  CHECK_THROWS_AS(selectNextStage(p, s, {{}, s, {}}, 2, T0, 60, cfg), Error);
}

TEST_CASE("certificate construction") {
  const Parameter p = misiurewicz();
  CertificateConfig cfg;
  cfg.grid = 80;
  const auto cert = buildCertificate(p, *p.singularAddress, 2, cfg);
  CHECK(cert.stages.size() == 2);
  CHECK(certificateViolations(cert).empty());
  CHECK(cert.T0 == Approx(2 * std::log1p(2 * std::numbers::pi) +
                          std::log(std::abs(p.kappa)) + 8));
  std::vector<Entry> prefix{2};
  for (const auto& st : cert.stages) {
    auto b = stageBlock(*p.singularAddress, st.n);
    prefix.insert(prefix.end(), b.begin(), b.end());
  }
  CHECK(cert.finalPrefix == prefix);
  for (Entry e : cert.finalPrefix) CHECK(e <= 3);

  CHECK_THROWS_AS(buildCertificate(p, *p.singularAddress, 0, cfg), Error);

  auto broken = cert;
  broken.stages[1].t = broken.stages[0].t;
  broken.stages[0].absG = 0.5;
  CHECK(certificateViolations(broken).size() == 2);
}

TEST_CASE("infeasible construction keeps the completed stages") {
  const Parameter p = misiurewicz();
  CertificateConfig cfg;
  cfg.grid = 2;
  cfg.gridRefinements = 0;
  try {
    buildCertificate(p, *p.singularAddress, 5, cfg);
    FAIL("expected CertificateError");
  } catch (const CertificateError& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
    CHECK_FALSE(e.partial().stages.empty());
    CHECK(e.partial().stages.size() < 5);
    CHECK(certificateViolations(e.partial()).empty());
  }
}

TEST_CASE("Sturmian addresses and the X set") {
  const auto s = sturmianAddress(goldenMean());
  CHECK(expand(s, 8) == std::vector<Entry>{1, 0, 1, 1, 0, 1, 0, 1});
  const double th = goldenMean();
  const auto e = expand(s, 200);
  for (std::size_t k = 1; k <= 200; ++k)
    CHECK(e[k - 1] == static_cast<Entry>(std::floor((k + 1) * th) - std::floor(k * th)));
  for (const auto& u : kneading(s, 40).entries) CHECK(u == ItineraryEntry::integer(0));

  CHECK(xSetMember(s, s, 40));
  CHECK(xSetMember(prepend(0, s), s, 40));
  CHECK_FALSE(xSetMember(parseAddress("(5)"), s, 40));
  CHECK_THROWS_AS(xSetMember(s, parseAddress("(0)"), 40), Error);
  CHECK_THROWS_AS(sturmianAddress(1.5), Error);
}

}
