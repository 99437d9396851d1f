#include "expdyn/nonlanding.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace expdyn {

namespace {

void requireInfiniteBase(const ExternalAddress& s) {
  if (!s.isInfinite())
    throw Error(ErrorCode::Precondition, "base address must be infinite");
}

void validatePlan(const StagePlan& plan) {
  requireInfiniteBase(plan.base);
  for (std::size_t n : plan.ns)
    if (n == 0)
      throw Error(ErrorCode::InvalidArgument, "stage values n_j must be >= 1");
}

std::vector<Entry> stagePrefix(const StagePlan& plan, std::size_t blocks) {
  std::vector<Entry> out{teeSequence(plan.base, 1)};
  for (std::size_t i = 0; i < blocks; ++i) {
    auto block = stageBlock(plan.base, plan.ns[i]);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

// Entry k of r(n_1, n_2, ...) with n_j supplied by `stage`.
std::optional<Entry> familyEntry(const ExternalAddress& s,
                                 const std::function<std::size_t(std::size_t)>& stage,
                                 std::size_t k) {
  auto tee = [&](std::size_t n) -> std::optional<Entry> {
    Entry best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      auto e = s.entry(i);
      if (!e) return std::nullopt;
      best = i == 1 ? *e : std::max(best, *e);
    }
    return best + 2;
  };
  if (k == 1) return tee(1);
  std::size_t end = 1;  // index of the last T written so far
  for (std::size_t j = 1;; ++j) {
    const std::size_t n = stage(j);
    if (n == 0) return std::nullopt;
    if (k <= end + n) {
      const std::size_t i = k - end;
      return i < n ? s.entry(i) : tee(n);
    }
    end += n;
  }
}

}  // namespace

Entry teeSequence(const ExternalAddress& s, std::size_t n) {
  requireInfiniteBase(s);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "T_n needs n >= 1");
  Entry best = s.at(1);
  for (std::size_t k = 2; k <= n; ++k) best = std::max(best, s.at(k));
  return best + 2;
}

std::vector<Entry> stageBlock(const ExternalAddress& s, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "block length must be >= 1");
  std::vector<Entry> out;
  out.reserve(n);
  for (std::size_t i = 1; i < n; ++i) out.push_back(s.at(i));
  out.push_back(teeSequence(s, n));
  return out;
}

ExternalAddress candidateAddress(const StagePlan& plan, Tail tail,
                                 std::size_t resolutionCap) {
  validatePlan(plan);
  const ExternalAddress& s = plan.base;
  if (tail == Tail::LoopToBase) {
    std::vector<Entry> prefix = stagePrefix(plan, plan.ns.size());
    if (s.isExact()) {
      prefix.insert(prefix.end(), s.prefix().begin(), s.prefix().end());
      return ExternalAddress::periodic(std::move(prefix), s.cycle());
    }
    auto base = std::make_shared<const ExternalAddress>(s);
    return ExternalAddress::generated(
        [base](std::size_t k) { return base->entry(k); }, s.resolutionCap(),
        std::move(prefix));
  }

  if (!plan.continuation && s.isExact()) {
    const std::size_t J = plan.ns.size();
    std::vector<Entry> prefix = stagePrefix(plan, J == 0 ? 0 : J - 1);
    return ExternalAddress::periodic(std::move(prefix),
                                     stageBlock(s, J == 0 ? 1 : plan.ns.back()));
  }
  auto ns = plan.ns;
  auto next = plan.continuation;
  auto base = std::make_shared<const ExternalAddress>(s);
  std::function<std::size_t(std::size_t)> stage =
      [ns, next](std::size_t j) -> std::size_t {
    if (j <= ns.size()) return ns[j - 1];
    if (next) return next(j);
    return ns.empty() ? 1 : ns.back();
  };
  return ExternalAddress::generated(
      [base, stage](std::size_t k) { return familyEntry(*base, stage, k); },
      resolutionCap);
}

Claim1Report claim1Report(const ExternalAddress& r, const ExternalAddress& s,
                          Complex kappa) {
  Claim1Report rep;
  rep.tStarR = growthBounds(r).tStar;
  rep.tStarS = growthBounds(s).tStar;
  rep.bound = rep.tStarS + 2.0;
  rep.boundHolds = rep.tStarR <= rep.bound;
  rep.firstTerm = kTwoPi * std::abs(static_cast<double>(r.at(1)));
  rep.T0 = 2.0 * rep.tStarS + logPlus(std::abs(kappa)) + 8.0;
  rep.bigTeeR = 2.0 * rep.tStarR + logPlus(std::abs(kappa)) + 4.0;
  rep.bigTeeBelowT0 = rep.bigTeeR <= rep.T0;
  return rep;
}

bool Claim2Report::allFound() const {
  return std::all_of(witnesses.begin(), witnesses.end(),
                     [](const Claim2Witness& w) { return w.k.has_value(); });
}

Claim2Report claim2Check(const StagePlan& plan, std::size_t depth,
                         std::size_t searchLimit) {
  if (depth == 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  const ExternalAddress r = candidateAddress(plan, Tail::ContinueFamily);
  const ExternalAddress& s = plan.base;

  std::size_t horizon = depth + searchLimit;
  if (s.isExact()) horizon += s.prefix().size() + s.cycle().size();
  std::vector<Entry> tee{0};  // tee[k] = T_k
  for (std::size_t k = 1; k <= horizon; ++k)
    tee.push_back(k == 1 ? s.at(1) + 2 : std::max(tee.back(), s.at(k) + 2));

  const Itinerary u = kneading(s, searchLimit);
  const Itinerary ut = itinerary(r, s, depth + searchLimit);

  Claim2Report rep;
  rep.depth = depth;
  for (std::size_t m = 1; m <= depth; ++m) {
    Claim2Witness w;
    w.m = m;
    for (std::size_t k = 1; k <= searchLimit && m + k <= ut.depth(); ++k) {
      const Entry e = r.at(m + k);
      if (e < s.at(k) + 2) continue;
      std::size_t kPrime = 0;
      for (std::size_t kp = k; kp <= horizon; ++kp)
        if (tee[kp] == e) {
          kPrime = kp;
          break;
        }
      if (kPrime == 0 || u[k] == ut[m + k]) continue;
      w.k = k;
      w.kPrime = kPrime;
      w.entry = e;
      break;
    }
    rep.witnesses.push_back(w);
  }
  return rep;
}

PairwiseItineraryReport pairwiseDistinctItineraries(
    const std::vector<StagePlan>& plans, std::size_t depth) {
  std::vector<ExternalAddress> members;
  std::vector<Itinerary> its;
  for (const StagePlan& plan : plans) {
    members.push_back(candidateAddress(plan, Tail::ContinueFamily));
    its.push_back(itinerary(members.back(), plan.base, depth));
  }
  PairwiseItineraryReport rep;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    for (std::size_t j = i + 1; j < plans.size(); ++j) {
      if (compareLex(members[i], members[j]) == Ordering::Equal)
        throw Error(ErrorCode::Precondition,
                    "plans " + std::to_string(i) + " and " + std::to_string(j) +
                        " give the same address");
      ++rep.pairs;
      if (its[i] != its[j])
        ++rep.distinct;
      else if (!rep.firstCollision)
        rep.firstCollision = std::make_pair(i, j);
    }
  }
  return rep;
}

StageRecord selectNextStage(const Parameter& p, const ExternalAddress& s,
                            const StagePlan& prefixPlan, std::size_t j,
                            double T0, std::size_t grid,
                            const CertificateConfig& cfg,
                            std::optional<double> previousT) {
  if (j == 0) throw Error(ErrorCode::InvalidArgument, "stage index must be >= 1");
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
  if (prefixPlan.ns.size() + 1 != j)
    throw Error(ErrorCode::InvalidArgument,
                "stage " + std::to_string(j) + " needs " + std::to_string(j - 1) +
                    " chosen values");
  if (!(T0 > cfg.tMin))
    throw Error(ErrorCode::InvalidArgument, "T0 must exceed the trace floor");

  StagePlan plan = prefixPlan;
  plan.base = s;
  const ExternalAddress stageAddress = candidateAddress(plan, Tail::LoopToBase);
  const double level = static_cast<double>(j);

  StageRecord rec;
  rec.j = j;
  std::size_t index = 0;
  bool found = false;
  std::size_t g = grid;
  for (std::size_t attempt = 0; attempt <= cfg.gridRefinements && !found;
       ++attempt, g *= 2) {
    const RayTrace trace =
        traceRay(p, stageAddress, T0, cfg.tMin, g, cfg.eps, cfg.ray);
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
      const RaySample& smp = trace.samples[i];
      if (previousT && !(smp.t < *previousT)) continue;
      if (std::abs(smp.z) > level) {
        rec.t = smp.t;
        rec.stageAbsG = std::abs(smp.z);
        rec.grid = g;
        index = i;
        found = true;
        break;
      }
    }
  }
  if (!found)
    throw Error(ErrorCode::Infeasible,
                "stage " + std::to_string(j) + ": no traced potential below " +
                    std::to_string(previousT.value_or(T0)) + " has |g| > " +
                    std::to_string(j));

  const std::size_t start = prefixPlan.ns.empty() ? 1 : prefixPlan.ns.back() + 1;
  for (std::size_t n = start; n < start + cfg.attemptCap; ++n) {
    StagePlan candidate = plan;
    candidate.ns.push_back(n);
    const ExternalAddress r = candidateAddress(candidate, Tail::ContinueFamily);
    Complex z;
    if (index == 0) {
      z = tracePoint(p, r, rec.t, cfg.eps, cfg.ray).z;
    } else {
      const RayTrace tr =
          traceRay(p, r, T0, rec.t, index + 1, cfg.eps, cfg.ray);
      if (tr.truncation) {
        rec.attempts.push_back({n, 0.0, false});
        continue;
      }
      z = tr.samples.back().z;
    }
    const double absG = std::abs(z);
    const bool ok = absG >= level;
    rec.attempts.push_back({n, absG, ok});
    if (ok) rec.feasible.push_back(n);
  }
  if (rec.feasible.empty())
    throw Error(ErrorCode::Infeasible,
                "stage " + std::to_string(j) + ": no n in [" +
                    std::to_string(start) + ", " +
                    std::to_string(start + cfg.attemptCap - 1) +
                    "] gives |g_r(t_j)| >= " + std::to_string(j));
  rec.n = rec.feasible.front();
  for (const StageAttempt& a : rec.attempts)
    if (a.n == rec.n) rec.absG = a.absG;
  return rec;
}

AccumulationCertificate buildCertificate(const Parameter& p,
                                         const ExternalAddress& s,
                                         std::size_t J,
                                         const CertificateConfig& cfg) {
  if (J == 0) throw Error(ErrorCode::InvalidArgument, "stage count must be >= 1");
  requireInfiniteBase(s);
  AccumulationCertificate cert{p.kappa, s, 0.0, cfg.grid, cfg.tMin, cfg.eps, {}, {}};
  cert.T0 = cfg.T0.value_or(2.0 * growthBounds(s).tStar +
                            logPlus(std::abs(p.kappa)) + 8.0);
  StagePlan plan{{}, s, {}};
  cert.finalPrefix = stagePrefix(plan, 0);
  std::optional<double> previousT;
  for (std::size_t j = 1; j <= J; ++j) {
    StageRecord rec;
    try {
      rec = selectNextStage(p, s, plan, j, cert.T0, cfg.grid, cfg, previousT);
    } catch (const Error& e) {
      throw CertificateError(e, cert);
    }
    plan.ns.push_back(rec.n);
    previousT = rec.t;
    auto block = stageBlock(s, rec.n);
    cert.finalPrefix.insert(cert.finalPrefix.end(), block.begin(), block.end());
    cert.stages.push_back(std::move(rec));
  }
  return cert;
}

std::vector<std::string> certificateViolations(
    const AccumulationCertificate& cert) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < cert.stages.size(); ++i) {
    const StageRecord& st = cert.stages[i];
    const std::string tag = "stage " + std::to_string(st.j) + ": ";
    if (st.j != i + 1) out.push_back(tag + "out of order");
    if (!(st.absG >= static_cast<double>(st.j)))
      out.push_back(tag + "|g(t_j)| = " + std::to_string(st.absG) + " < j");
    if (!(st.t <= cert.T0)) out.push_back(tag + "t_j exceeds T0");
    if (i > 0 && !(st.t < cert.stages[i - 1].t))
      out.push_back(tag + "t_j not strictly decreasing");
  }
  return out;
}

ExternalAddress sturmianAddress(double theta, std::size_t resolutionCap) {
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorCode::InvalidArgument, "rotation number must lie in (0, 1)");
  return ExternalAddress::generated(
      [theta](std::size_t k) -> std::optional<Entry> {
        const double x = static_cast<double>(k);
        return static_cast<Entry>(std::floor((x + 1.0) * theta) -
                                  std::floor(x * theta));
      },
      resolutionCap);
}

bool xSetMember(const ExternalAddress& r, const ExternalAddress& s,
                std::size_t depth, std::size_t depthCap) {
  requireInfiniteBase(s);
  if (s.isExact() && s.prefix().empty())
    throw Error(ErrorCode::Precondition, "base address must not be periodic");
  const Itinerary k = kneading(s, depth, depthCap);
  for (std::size_t i = 1; i <= k.depth(); ++i)
    if (k[i] != ItineraryEntry::integer(0))
      throw Error(ErrorCode::Precondition,
                  "kneading sequence is not 000... (entry " + std::to_string(i) +
                      " is " + formatEntry(k[i]) + ")");
  const Itinerary it = itinerary(r, s, depth, depthCap);
  return std::all_of(it.entries.begin(), it.entries.end(),
                     [](const ItineraryEntry& e) { return adjacent(0, e); });
}

}  // namespace expdyn
