#include <doctest.h>

#include <cmath>
#include <numbers>

#include "expdyn/growth.hpp"
#include "expdyn/ray_engine.hpp"

using namespace expdyn;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

// Root of f on [a, b] by bisection.
template <class F>
double bisect(F f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b), fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double repellingFixedPoint() {
  return bisect([](double x) { return std::exp(x) - 2.0 - x; }, 0.0, 3.0);
}
double attractingFixedPoint() {
  return bisect([](double x) { return std::exp(x) - 2.0 - x; }, -3.0, 0.0);
}

Parameter misiurewicz() { return knownParameter(Parameter::Label::MisiurewiczExample); }
Parameter attracting() { return knownParameter(Parameter::Label::AttractingExample); }

}  // namespace

TEST_SUITE("ray-engine") {

TEST_CASE("known parameters") {
  const Parameter m = misiurewicz();
  CHECK(m.kappa.real() == Approx(std::log(2 * kPi)).epsilon(1e-15));
  CHECK(m.kappa.imag() == Approx(kPi / 2).epsilon(1e-15));
  CHECK(m.kappa.real() == Approx(1.83788).epsilon(1e-5));
  REQUIRE(m.singularAddress.has_value());
  CHECK(*m.singularAddress == parseAddress("0,(1)"));

  const Parameter s = knownParameter(Parameter::Label::Siegel, goldenMean());
  CHECK(goldenMean() == Approx((std::sqrt(5.0) - 1) / 2));
  CHECK(s.kappa.real() == Approx(0.73737).epsilon(1e-5));
  CHECK(s.kappa.imag() == Approx(4.55871).epsilon(1e-5));
  const Complex z0{0.0, 2 * kPi * goldenMean()};
  CHECK(std::abs(std::exp(z0) + s.kappa - z0) < 1e-13);
  CHECK(std::abs(std::exp(z0) - std::polar(1.0, 2 * kPi * goldenMean())) < 1e-13);

  const Parameter a = attracting();
  CHECK(a.kappa == Complex(-2.0, 0.0));
  const double x = attractingFixedPoint();
  CHECK(x == Approx(-1.84141).epsilon(1e-5));
  CHECK(std::exp(x) == Approx(0.15859).epsilon(1e-4));

  CHECK(parseParameterLabel("siegel-golden").kappa == s.kappa);
  CHECK(parseParameterLabel("siegel:0.25").theta == 0.25);
  CHECK(parameterLabelName(m) == "misiurewicz-example");
  CHECK_THROWS_AS(parseParameterLabel("nonsense"), Error);
  CHECK_THROWS_AS(customParameter({NAN, 0.0}), Error);
}

TEST_CASE("bigTee") {
  CHECK(bigTee(parseAddress("(0)"), {-2, 0}) == Approx(std::log(2.0) + 4).epsilon(1e-15));
  CHECK(bigTee(parseAddress("(0)"), {-2, 0}) == Approx(4.6931).epsilon(1e-4));
  CHECK(bigTee(parseAddress("0,(1)"), misiurewicz().kappa) == Approx(8.8537).epsilon(1e-4));
  CHECK(bigTee(parseAddress("(0)"), {0, 0}) == 4.0);
  const auto wild = ExternalAddress::generated(
      [](std::size_t k) -> std::optional<Entry> {
        const double v = modelGrowthIterate(1.0, k);
        if (!(v < 9e18)) return std::nullopt;
        return static_cast<Entry>(std::llround(v));
      },
      64);
  CHECK_THROWS_AS(bigTee(wild, {-2, 0}), Error);
}

TEST_CASE("tracePoint sits within the asymptotic bound") {
  const RaySample a = tracePoint(attracting(), parseAddress("(0)"), 12.0, 1e-12);
  CHECK(std::abs(a.z - 12.0) < std::exp(-6.0));
  CHECK(a.z.imag() == 0.0);

  const RaySample m = tracePoint(misiurewicz(), parseAddress("0,(1)"), 12.0, 1e-12);
  CHECK(std::abs(m.z - 12.0) < std::exp(-6.0));
  const RaySample deep = tracePoint(misiurewicz(), parseAddress("0,(1)"), 12.0, 1e-15);
  CHECK(deep.depth >= m.depth);
  CHECK(std::abs(m.z - deep.z) < 1e-10);
}

TEST_CASE("seeding accuracy does not depend on depth") {
  const double eps = 1e-10;
  for (const char* s : {"(0)", "0,(1)", "3,(1)", "1,(0,2)"})
    for (double t : {0.7, 2.0, 6.0}) {
      const auto a = tracePoint(misiurewicz(), parseAddress(s), t, eps);
      const auto b = tracePoint(misiurewicz(), parseAddress(s), t, eps / 1e4);
      CAPTURE(s);
      CAPTURE(t);
      CHECK(b.depth >= a.depth);
      CHECK(std::abs(a.z - b.z) < 100 * eps);
    }
}

TEST_CASE("rejects degenerate inputs") {
  CHECK_THROWS_AS(tracePoint(attracting(), parseAddress("(0)"), 0.0, 1e-12), Error);
  CHECK_THROWS_AS(tracePoint(attracting(), parseAddress("(0)"), -1.0, 1e-12), Error);
  CHECK_THROWS_AS(tracePoint(attracting(), parseAddress("1/2,inf"), 1.0, 1e-12), Error);
  CHECK_THROWS_AS(traceRay(attracting(), parseAddress("(0)"), 1.0, 2.0, 10, 1e-12), Error);
  CHECK_THROWS_AS(traceRay(attracting(), parseAddress("(0)"), 2.0, 1.0, 1, 1e-12), Error);
}

TEST_CASE("real ray of the attracting example") {
  const RayTrace tr = traceRay(attracting(), parseAddress("(0)"), 12.0, 0.5, 200, 1e-12);
  REQUIRE(tr.samples.size() >= 200);
  CHECK_FALSE(tr.truncation.has_value());
  CHECK(tr.samples.front().t == 12.0);
  CHECK(tr.samples.back().t == Approx(0.5));
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].z.imag() == 0.0);
    if (i > 0) {
      CHECK(tr.samples[i].t < tr.samples[i - 1].t);
      CHECK(tr.samples[i].z.real() < tr.samples[i - 1].z.real());
    }
  }
}

TEST_CASE("the ray at (0) for kappa = -2 lands at the repelling fixed point") {
  const RayTrace tr = traceRay(attracting(), parseAddress("(0)"), 12.0, 0.01, 300, 1e-12);
  const TailReport tail = tailDiagnostic(tr);
  CHECK(tail.verdict == TailReport::Verdict::LandsFinite);
  REQUIRE(tail.limit.has_value());
  CHECK(tail.limit->imag() == 0.0);
  CHECK(std::abs(*tail.limit - repellingFixedPoint()) < 1e-3);
  CHECK(repellingFixedPoint() == Approx(1.14619).epsilon(1e-5));
}

TEST_CASE("the ray at addr(kappa) lands at the singular value") {
  const Parameter p = misiurewicz();
  const RayTrace tr = traceRay(p, parseAddress("0,(1)"), 12.0, 0.05, 200, 1e-12);
  const TailReport tail = tailDiagnostic(tr);
  CHECK(tail.verdict == TailReport::Verdict::LandsFinite);
  REQUIRE(tail.limit.has_value());
  CHECK(std::abs(*tail.limit - p.kappa) < 1e-2);
  CHECK(tail.evidence.diameter < 1e-4);
}

TEST_CASE("the preimage ray escapes to the left") {
  const RayTrace tr = traceRay(misiurewicz(), parseAddress("2,0,(1)"), 12.0, 0.15, 200, 1e-12);
  const TailReport tail = tailDiagnostic(tr);
  CHECK(tail.verdict == TailReport::Verdict::EscapesLeft);
  CHECK(tr.samples.back().z.real() < -10.0);
  CHECK(tail.evidence.reDecreasing);
  CHECK_FALSE(tail.stripEstimates.empty());
}

TEST_CASE("short window is inconclusive") {
  const RayTrace tr = traceRay(attracting(), parseAddress("(0)"), 12.0, 0.5, 100, 1e-12);
  CHECK(tailDiagnostic(tr).verdict == TailReport::Verdict::Inconclusive);
}

TEST_CASE("functional equation residual") {
  for (const Parameter& p : {attracting(), misiurewicz()}) {
    const RayTrace tr = traceRay(p, parseAddress(p.kappa.imag() == 0 ? "(0)" : "0,(1)"), 5.0,
                                 1.0, 50, 1e-14);
    const FunctionalResidual r = functionalResidual(tr);
    CHECK(r.evaluated == tr.samples.size());
    CHECK(r.maxResidual < 1e-9);
  }
  RayTrace empty = traceRay(attracting(), parseAddress("(0)"), 2.0, 1.0, 2, 1e-12);
  empty.samples.clear();
  CHECK_THROWS_AS(functionalResidual(empty), Error);
}

TEST_CASE("asymptotic residual") {
  const Parameter p = misiurewicz();
  const auto s = parseAddress("0,(1)");
  const double T = bigTee(s, p.kappa);
  RayTrace tr = traceRay(p, s, T + 10, T - 2, 13, 1e-14);
  const AsymptoticReport rep = asymptoticResidual(tr);
  CHECK(rep.bigTee == Approx(T));
  CHECK_FALSE(rep.excluded.empty());
  CHECK(rep.checks.size() + rep.excluded.size() == tr.samples.size());
  CHECK(rep.allPositive());

  tr.samples.front().z += Complex(1e-3, 0.0);
  CHECK_FALSE(asymptoticResidual(tr).allPositive());
}

TEST_CASE("continuity between rays") {
  const Parameter p = attracting();
  const auto s = parseAddress("(0)");
  auto tail = [](std::size_t n0) {
    return ExternalAddress::periodic(std::vector<Entry>(n0, 0), {1});
  };
  CHECK(continuityGap(p, s, s, 1.0, 20, 2.0, 1e-14) == 0.0);
  CHECK(inContinuityFamily(s, tail(5), 1.0, 5));
  CHECK_FALSE(inContinuityFamily(s, tail(5), 1.0, 6));
  CHECK_FALSE(inContinuityFamily(s, parseAddress("(3)"), 1.0, 0));
  CHECK_THROWS_AS(continuityGap(p, s, tail(5), 1.0, 10, 2.0, 1e-14), Error);

  for (double t0 : {0.08, 2.0}) {
    double prev = INFINITY;
    for (std::size_t n0 : {5u, 10u, 15u, 20u}) {
      const double g = continuityGap(p, s, tail(n0), 1.0, n0, t0, 1e-14);
      CAPTURE(t0);
      CAPTURE(n0);
      CHECK(g <= prev);
      if (t0 < 1.0) CHECK(g < prev);
      if (n0 == 20) CHECK(g < 1e-6);
      prev = g;
    }
  }
}

TEST_CASE("vertical translation and conjugation symmetry") {
  const Parameter m = misiurewicz();
  const Parameter a = attracting();
  for (const auto& [s, sUp, sNeg] :
       std::vector<std::tuple<const char*, const char*, const char*>>{
           {"0,(1)", "1,(1)", "0,(-1)"}, {"(2,0)", "3,(0,2)", "(-2,0)"}, {"1,(0)", "2,(0)", "-1,(0)"}})
    for (double t : {1.5, 4.0}) {
      const double tMax = std::max(t, bigTee(parseAddress(s), m.kappa)) + 1;
      const auto up = traceRay(m, parseAddress(sUp), tMax, t, 30, 1e-14).samples.back();
      const auto base = traceRay(m, parseAddress(s), tMax, t, 30, 1e-14).samples.back();
      CHECK(std::abs(up.z - (base.z + Complex(0, 2 * kPi))) < 1e-10);

      const double tMaxA = std::max(t, bigTee(parseAddress(s), a.kappa)) + 1;
      const auto pos = traceRay(a, parseAddress(s), tMaxA, t, 30, 1e-14).samples.back();
      const auto neg = traceRay(a, parseAddress(sNeg), tMaxA, t, 30, 1e-14).samples.back();
      CHECK(std::abs(neg.z - std::conj(pos.z)) < 1e-10);
    }
}

TEST_CASE("branch corrections are logged for the spiralling preimage ray") {
  const RayTrace tr = traceRay(misiurewicz(), parseAddress("2,0,(1)"), 12.0, 0.15, 200, 1e-12);
  for (const auto& c : tr.branchLog) {
    CHECK(c.offset != 0);
    CHECK(c.sample < tr.samples.size());
  }
}

}
