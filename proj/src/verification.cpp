#include "expdyn/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "expdyn/json_io.hpp"
#include "expdyn/nonlanding.hpp"
#include "expdyn/ray_engine.hpp"
#include "expdyn/render.hpp"

namespace expdyn {

namespace {

using L = Parameter::Label;

struct Outcome {
  Outcome() = default;
  Outcome(bool ok, std::string text, std::optional<double> span = std::nullopt)
      : passed(ok), detail(std::move(text)), seconds(span) {}
  bool passed = false;
  std::string detail;
  std::optional<double> seconds;  // budgeted span when not the whole check
};

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

std::vector<std::pair<Parameter, ExternalAddress>> standardPairs() {
  std::vector<std::pair<Parameter, ExternalAddress>> out;
  for (L label : {L::AttractingExample, L::MisiurewiczExample})
    for (const char* a : {"(0)", "0,(1)", "3,(1)"})
      out.emplace_back(knownParameter(label), parseAddress(a));
  return out;
}

Outcome asymptotics(const Tolerances& tol) {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  for (const auto& [p, s] : standardPairs()) {
    const double T = bigTee(s, p.kappa);
    const double im = kTwoPi * static_cast<double>(s.at(1));
    for (int i = 0; i <= 10; ++i) {
      const double t = T + i;
      const Complex z = tracePoint(p, s, t, 1e-14).z;
      worst = std::min(worst, std::exp(-t / 2.0) - std::abs(z - Complex(t, im)));
      ++checked;
    }
  }
  return {worst > tol.asymptoticMargin,
          std::to_string(checked) + " samples, smallest margin " + num(worst)};
}

Outcome semiconjugacy(const Tolerances& tol) {
  double worst = 0.0;
  std::size_t evaluated = 0;
  for (const auto& [p, s] : standardPairs()) {
    const RayTrace tr = traceRay(p, s, 5.0, 1.0, 50, 1e-14);
    if (tr.samples.size() != 50)
      return {false, "trace of " + formatAddress(s) + " stopped early"};
    const FunctionalResidual r = functionalResidual(tr);
    worst = std::max(worst, r.maxResidual);
    evaluated += r.evaluated;
  }
  return {worst < tol.semiconjugacy,
          std::to_string(evaluated) + " samples, max residual " + num(worst)};
}

Outcome continuity(const Tolerances& tol) {
  const Parameter p = knownParameter(L::AttractingExample);
  const ExternalAddress s = ExternalAddress::constant(0);
  auto gaps = [&](double t0) {
    std::vector<double> out;
    for (std::size_t n0 : {5, 10, 15, 20}) {
      const ExternalAddress st =
          ExternalAddress::periodic(std::vector<Entry>(n0, 0), {1});
      out.push_back(continuityGap(p, s, st, 1.0, n0, t0, 1e-14));
    }
    return out;
  };
  // At t0 = 2 the perturbation lies below double resolution, so strict
  // decrease is checked where the gaps are resolved.
  const std::vector<double> low = gaps(0.08);
  const std::vector<double> high = gaps(2.0);
  bool strict = true, monotone = true;
  for (std::size_t i = 1; i < low.size(); ++i) {
    strict = strict && low[i] < low[i - 1];
    monotone = monotone && high[i] <= high[i - 1];
  }
  const bool small = high.back() < tol.continuityGap && low.back() < tol.continuityGap;
  std::string detail = "t0=0.08 gaps";
  for (double g : low) detail += " " + num(g);
  detail += "; t0=2 gaps";
  for (double g : high) detail += " " + num(g);
  return {strict && monotone && small, detail};
}

Outcome certificate(const Tolerances&) {
  const Parameter p = knownParameter(L::MisiurewiczExample);
  const AccumulationCertificate a = buildCertificate(p, *p.singularAddress, 4);
  const AccumulationCertificate b = buildCertificate(p, *p.singularAddress, 4);
  const auto violations = certificateViolations(a);
  const bool identical = dumpJson(toJson(a)) == dumpJson(toJson(b));
  std::string detail = "n =";
  for (const StageRecord& st : a.stages)
    detail += " " + std::to_string(st.n);
  detail += ", |g(t_j)| =";
  for (const StageRecord& st : a.stages) detail += " " + num(st.absG);
  if (!violations.empty()) detail += ", " + violations.front();
  if (!identical) detail += ", rerun differs";
  return {a.stages.size() == 4 && violations.empty() && identical, detail};
}

std::vector<StagePlan> randomPlans(const ExternalAddress& s, std::size_t count) {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<std::size_t> pick(1, 5);
  std::set<std::vector<std::size_t>> seen;
  std::vector<StagePlan> plans;
  while (plans.size() < count) {
    std::vector<std::size_t> ns(5);
    for (auto& n : ns) n = pick(rng);
    if (seen.insert(ns).second) plans.push_back({ns, s, {}});
  }
  return plans;
}

Outcome mismatchWitnesses(const Tolerances&) {
  const ExternalAddress s = parseAddress("0,(1)");
  const std::vector<StagePlan> plans = randomPlans(s, 100);
  std::size_t missing = 0;
  for (const StagePlan& plan : plans) {
    const Claim2Report rep = claim2Check(plan, 30);
    for (const Claim2Witness& w : rep.witnesses)
      if (!w.k) ++missing;
  }
  const PairwiseItineraryReport pairs = pairwiseDistinctItineraries(plans, 50);
  return {missing == 0 && pairs.allDistinct(),
          "100 plans, " + std::to_string(missing) + " missing witnesses, " +
              std::to_string(pairs.distinct) + "/" + std::to_string(pairs.pairs) +
              " pairs distinct"};
}

std::vector<ExternalAddress> smallPeriodic() {
  std::vector<ExternalAddress> out;
  for (std::size_t len = 1; len <= 3; ++len) {
    std::vector<Entry> w(len, 0);
    for (;;) {
      ExternalAddress a = ExternalAddress::periodic({}, w);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
      std::size_t i = 0;
      while (i < len && w[i] == 2) w[i++] = 0;
      if (i == len) break;
      ++w[i];
    }
  }
  return out;
}

Outcome sharedItineraries(const Tolerances&) {
  const std::vector<ExternalAddress> all = smallPeriodic();
  std::size_t triples = 0, passed = 0;
  for (const ExternalAddress& s : all) {
    std::vector<Itinerary> its;
    for (const ExternalAddress& r : all) its.push_back(itinerary(r, s, 12));
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (its[i] != its[j]) continue;
        ++triples;
        if (sharedItineraryConsequence(all[i], all[j], s, 12).allPassed()) ++passed;
      }
  }
  return {triples > 0 && passed == triples,
          std::to_string(all.size()) + " addresses, " + std::to_string(passed) + "/" +
              std::to_string(triples) + " sharing triples pass"};
}

Outcome preimageTail(const Tolerances& tol) {
  const Parameter p = knownParameter(L::MisiurewiczExample);
  const RayTrace tr = traceRay(p, parseAddress("2,0,(1)"), 12.0, 0.15, 200, 1e-12);
  RayConfig cfg;
  cfg.reFloor = tol.preimageRe;
  const TailReport tail = tailDiagnostic(tr, cfg);
  const double re = tr.samples.back().z.real();
  return {tail.verdict == TailReport::Verdict::EscapesLeft && re < tol.preimageRe,
          std::string(verdictName(tail.verdict)) + ", terminal Re z " + num(re) +
              ", " + std::to_string(tr.branchLog.size()) + " branch corrections"};
}

Outcome figure(const Tolerances& tol) {
  const auto start = std::chrono::steady_clock::now();
  const Figure a = figure1();
  const Orbit orbit = singularOrbit(a.parameter, 10000);
  const double timed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double maxAbs = 0.0;
  for (Complex z : orbit.points) maxAbs = std::max(maxAbs, std::abs(z));
  const bool bounded =
      !orbit.overflowed && orbit.points.size() == 10000 && maxAbs < tol.orbitBound;
  // The rerun only establishes determinism and is not part of the budget.
  const auto rerunStart = std::chrono::steady_clock::now();
  const Figure b = figure1();
  const bool identical = encodePng(a.image) == encodePng(b.image) &&
                         encodePpm(a.image) == encodePpm(b.image);
  const double rerun =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - rerunStart).count();
  return {identical && bounded && a.image.width == 800 && a.image.height == 800,
          std::string(identical ? "deterministic" : "rerun differs") +
              " 800x800 image, max |E^n(kappa)| " + num(maxAbs) + ", rerun " +
              num(rerun) + " s",
          timed};
}

Outcome symmetry(const Tolerances& tol) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> entry(-3, 3), len(0, 2), clen(1, 3);
  std::uniform_real_distribution<double> pot(1.0, 6.0);
  const Parameter misiurewicz = knownParameter(L::MisiurewiczExample);
  const Parameter real = knownParameter(L::AttractingExample);
  auto end = [](const Parameter& p, const ExternalAddress& s, double t) {
    const double top = std::max(t, bigTee(s, p.kappa)) + 1.0;
    const RayTrace tr = traceRay(p, s, top, t, 40, 1e-14);
    if (tr.truncation) throw Error(ErrorCode::SingularFloor, "probe trace truncated");
    return tr.samples.back().z;
  };
  double worstShift = 0.0, worstConj = 0.0;
  for (int probe = 0; probe < 20; ++probe) {
    std::vector<Entry> prefix(static_cast<std::size_t>(len(rng))), cycle(clen(rng));
    for (auto& e : prefix) e = entry(rng);
    for (auto& e : cycle) e = entry(rng);
    const ExternalAddress s = ExternalAddress::periodic(prefix, cycle);
    const double t = pot(rng);
    const ExternalAddress up = prepend(s.at(1) + 1, shift(s));
    worstShift = std::max(worstShift,
                          std::abs(end(misiurewicz, up, t) -
                                   (end(misiurewicz, s, t) + Complex(0.0, kTwoPi))));
    for (auto& e : prefix) e = -e;
    for (auto& e : cycle) e = -e;
    const ExternalAddress neg = ExternalAddress::periodic(prefix, cycle);
    worstConj = std::max(worstConj,
                         std::abs(end(real, neg, t) - std::conj(end(real, s, t))));
  }
  return {worstShift < tol.symmetry && worstConj < tol.symmetry,
          "20 probes, translation " + num(worstShift) + ", conjugation " +
              num(worstConj)};
}

struct Criterion {
  int id;
  const char* group;
  double budget;
  Outcome (*run)(const Tolerances&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "asymptotics", 1.0, asymptotics},
      {2, "semiconjugacy", 1.0, semiconjugacy},
      {3, "continuity", 5.0, continuity},
      {4, "certificate", 60.0, certificate},
      {5, "witness", 5.0, mismatchWitnesses},
      {6, "shared-itinerary", 30.0, sharedItineraries},
      {7, "preimage-tail", 5.0, preimageTail},
      {8, "figure1", 30.0, figure},
      {9, "symmetry", 2.0, symmetry},
  };
  return list;
}

}  // namespace

void applyToleranceOverride(Tolerances& tol, const std::string& name, double value) {
  static const std::map<std::string, double Tolerances::*> fields{
      {"asymptotic-margin", &Tolerances::asymptoticMargin},
      {"semiconjugacy", &Tolerances::semiconjugacy},
      {"continuity", &Tolerances::continuityGap},
      {"symmetry", &Tolerances::symmetry},
      {"orbit-bound", &Tolerances::orbitBound},
      {"preimage-re", &Tolerances::preimageRe},
      {"budget-scale", &Tolerances::budgetScale},
  };
  auto it = fields.find(name);
  if (it == fields.end())
    throw Error(ErrorCode::InvalidArgument, "unknown tolerance '" + name + "'");
  tol.*(it->second) = value;
}

const std::vector<std::string>& verificationGroups() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Criterion& c : criteria()) out.emplace_back(c.group);
    return out;
  }();
  return names;
}

std::vector<CriterionResult> runVerification(const VerifyOptions& opts) {
  for (const std::string& g : opts.only)
    if (std::find(verificationGroups().begin(), verificationGroups().end(), g) ==
        verificationGroups().end())
      throw Error(ErrorCode::InvalidArgument, "unknown verification group '" + g + "'");
  std::vector<CriterionResult> out;
  for (const Criterion& c : criteria()) {
    if (!opts.only.empty() &&
        std::find(opts.only.begin(), opts.only.end(), c.group) == opts.only.end())
      continue;
    CriterionResult r;
    r.id = c.id;
    r.group = c.group;
    r.budget = c.budget * opts.tol.budgetScale;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(opts.tol);
    } catch (const Error& e) {
      o = {false, std::string(errorCodeName(e.code())) + ": " + e.what()};
    }
    r.seconds = o.seconds.value_or(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    r.passed = o.passed && r.seconds < r.budget;
    r.detail = o.detail;
    if (o.passed && !r.passed) r.detail += ", over runtime budget";
    out.push_back(std::move(r));
  }
  return out;
}

std::string formatResult(const CriterionResult& r) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(3);
  ss << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.group << ": " << r.detail
     << " (" << r.seconds << " s of " << r.budget << " s)";
  return ss.str();
}

}  // namespace expdyn
