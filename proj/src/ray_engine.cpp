#include "expdyn/ray_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace expdyn {

namespace {

constexpr Complex kI{0.0, 1.0};

bool compatible(const PullbackPath& prev, const PullbackPath& next,
                double tolerance) {
  const std::size_t common = std::min(prev.stages.size(), next.stages.size());
  for (std::size_t k = 1; k < common; ++k)
    if (std::abs(next.stages[k].imag() - prev.stages[k].imag()) > tolerance)
      return false;
  return true;
}

void requireTraceable(const ExternalAddress& s, const RayConfig& cfg) {
  if (!s.isInfinite())
    throw Error(ErrorCode::Precondition,
                "rays exist for infinite addresses only");
  if (!growthBounds(s, cfg.depthCap).expBounded)
    throw Error(ErrorCode::Precondition,
                "address " + formatAddress(s) + " is not exponentially bounded");
}

}  // namespace

double goldenMean() { return (std::sqrt(5.0) - 1.0) / 2.0; }

Parameter knownParameter(Parameter::Label label, double theta) {
  Parameter p;
  p.label = label;
  switch (label) {
    case Parameter::Label::MisiurewiczExample:
      p.kappa = Complex(std::log(kTwoPi), std::numbers::pi / 2.0);
      p.singularAddress = ExternalAddress::periodic({0}, {1});
      break;
    case Parameter::Label::Siegel: {
      if (!(theta > 0.0 && theta < 1.0))
        throw Error(ErrorCode::InvalidArgument,
                    "Siegel rotation number must lie in (0, 1)");
      const Complex fixed = kI * (kTwoPi * theta);
      p.kappa = fixed - std::exp(fixed);
      p.theta = theta;
      break;
    }
    case Parameter::Label::AttractingExample:
      p.kappa = Complex(-2.0, 0.0);
      break;
    case Parameter::Label::Custom:
      throw Error(ErrorCode::InvalidArgument,
                  "custom parameters are built with customParameter");
  }
  return p;
}

Parameter customParameter(Complex kappa) {
  if (!std::isfinite(kappa.real()) || !std::isfinite(kappa.imag()))
    throw Error(ErrorCode::InvalidArgument, "kappa must be finite");
  Parameter p;
  p.kappa = kappa;
  return p;
}

Parameter parseParameterLabel(std::string_view label) {
  using L = Parameter::Label;
  if (label == "misiurewicz-example") return knownParameter(L::MisiurewiczExample);
  if (label == "attracting-example") return knownParameter(L::AttractingExample);
  if (label == "siegel-golden") return knownParameter(L::Siegel, goldenMean());
  if (label.substr(0, 7) == "siegel:") {
    const std::string rest(label.substr(7));
    std::size_t used = 0;
    double theta = 0.0;
    try {
      theta = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || rest.empty())
      throw Error(ErrorCode::InvalidArgument,
                  "cannot read rotation number '" + rest + "'");
    return knownParameter(L::Siegel, theta);
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown parameter label '" + std::string(label) + "'");
}

std::string parameterLabelName(const Parameter& p) {
  switch (p.label) {
    case Parameter::Label::MisiurewiczExample: return "misiurewicz-example";
    case Parameter::Label::AttractingExample: return "attracting-example";
    case Parameter::Label::Siegel: return "siegel(" + std::to_string(p.theta) + ")";
    case Parameter::Label::Custom: return "custom";
  }
  return "custom";
}

double logPlus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

double bigTee(const ExternalAddress& s, Complex kappa, std::size_t depthCap) {
  const GrowthBounds g = growthBounds(s, depthCap);
  if (!g.expBounded)
    throw Error(ErrorCode::Precondition,
                "address " + formatAddress(s) + " is not exponentially bounded");
  return 2.0 * g.tStar + logPlus(std::abs(kappa)) + 4.0;
}

std::size_t seedDepth(const ExternalAddress& s, Complex kappa, double t,
                      double eps, const RayConfig& cfg) {
  const double epsFloor = 2.0 * std::log(1.0 / eps);
  ExternalAddress tail = shift(s);
  double ft = modelGrowth(t);
  for (std::size_t n = 1; n <= cfg.maxDepth; ++n) {
    if (!std::isfinite(ft) || ft > 1e300)
      throw Error(ErrorCode::Overflow,
                  "seed F^" + std::to_string(n) + "(t) leaves the double range");
    if (ft >= epsFloor && ft >= bigTee(tail, kappa, cfg.depthCap)) return n;
    ft = modelGrowth(ft);
    tail = shift(tail);
  }
  throw Error(ErrorCode::Overflow,
              "potential t = " + std::to_string(t) + " needs more than " +
                  std::to_string(cfg.maxDepth) + " pullbacks");
}

PullbackPath tracePath(const Parameter& p, const ExternalAddress& s, double t,
                       double eps, const RayConfig& cfg,
                       const std::vector<Complex>* reference) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw Error(ErrorCode::InvalidArgument, "potential t must be positive");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  requireTraceable(s, cfg);

  const std::size_t n = seedDepth(s, p.kappa, t, eps, cfg);
  const double ft = modelGrowthIterate(t, n);

  PullbackPath path;
  path.stages.assign(n + 2, Complex{});
  path.contractions.reserve(n);
  Complex z(ft, kTwoPi * static_cast<double>(s.at(n + 1)));
  path.stages[n + 1] = z;
  double amplification = 1.0;
  for (std::size_t k = n; k >= 1; --k) {
    const Complex w = z - p.kappa;
    const double r = std::abs(w);
    if (r < cfg.pullbackFloor)
      throw Error(ErrorCode::SingularFloor,
                  "pullback at t = " + std::to_string(t) +
                      " reached the singular value (stage " + std::to_string(k) +
                      ")");
    Complex next = std::log(w) + kI * (kTwoPi * static_cast<double>(s.at(k)));
    if (reference && k < reference->size()) {
      const double gap = (*reference)[k].imag() - next.imag();
      const auto m = static_cast<long long>(std::llround(gap / kTwoPi));
      if (m != 0) {
        next += kI * (kTwoPi * static_cast<double>(m));
        path.corrections.emplace_back(k, m);
      }
    }
    path.contractions.push_back(1.0 / r);
    amplification /= r;
    z = next;
    path.stages[k] = z;
  }
  path.sample = {t, z, n, std::exp(-ft / 2.0) * amplification};
  return path;
}

RaySample tracePoint(const Parameter& p, const ExternalAddress& s, double t,
                     double eps, const RayConfig& cfg) {
  return tracePath(p, s, t, eps, cfg).sample;
}

namespace {

struct Tracer {
  const Parameter& p;
  const ExternalAddress& s;
  double eps;
  const RayConfig& cfg;
  RayTrace& out;
  PullbackPath prev;

  void accept(PullbackPath&& path) {
    const std::size_t index = out.samples.size();
    for (auto [stage, offset] : path.corrections)
      out.branchLog.push_back({index, path.sample.t, stage, offset});
    out.samples.push_back(path.sample);
    prev = std::move(path);
  }

  void truncate(const std::string& reason, double t) {
    out.truncation = reason;
    out.truncatedAt = t;
  }

  // Extends the trace from prev (at tPrev) to tNext; false once truncated.
  bool advance(double tPrev, double tNext, const PullbackPath* guess,
               std::size_t level) {
    const double tolerance = cfg.branchJump / 2.0;
    if (guess && compatible(prev, *guess, tolerance)) {
      PullbackPath copy = *guess;
      accept(std::move(copy));
      return true;
    }
    PullbackPath cand;
    try {
      cand = tracePath(p, s, tNext, eps, cfg, &prev.stages);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularFloor ||
          e.code() == ErrorCode::Overflow) {
        truncate(std::string(errorCodeName(e.code())), tNext);
        return false;
      }
      throw;
    }
    if (compatible(prev, cand, tolerance)) {
      accept(std::move(cand));
      return true;
    }
    if (level >= cfg.refinementCap) {
      truncate("refinement-cap", tNext);
      return false;
    }
    ++out.refinements;
    const double mid = std::sqrt(tPrev * tNext);
    return advance(tPrev, mid, nullptr, level + 1) &&
           advance(mid, tNext, nullptr, level + 1);
  }
};

}  // namespace

RayTrace traceRay(const Parameter& p, const ExternalAddress& s, double tMax,
                  double tMinHint, std::size_t nSamples, double eps,
                  const RayConfig& cfg) {
  if (!(tMinHint > 0.0) || !(tMax > tMinHint))
    throw Error(ErrorCode::InvalidArgument,
                "trace range needs tMax > tMinHint > 0");
  if (nSamples < 2)
    throw Error(ErrorCode::InvalidArgument, "a trace needs at least 2 samples");
  requireTraceable(s, cfg);

  std::vector<double> grid(nSamples);
  const double ratio = tMinHint / tMax;
  for (std::size_t i = 0; i < nSamples; ++i)
    grid[i] = tMax * std::pow(ratio, static_cast<double>(i) /
                                         static_cast<double>(nSamples - 1));
  grid.front() = tMax;
  grid.back() = tMinHint;

  // Principal-branch pass; samples are independent.
  std::vector<std::optional<PullbackPath>> principal(nSamples);
  std::vector<std::optional<Error>> failures(nSamples);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(nSamples); ++i) {
    try {
      principal[i] = tracePath(p, s, grid[i], eps, cfg);
    } catch (const Error& e) {
      failures[i] = e;
    }
  }
  if (!principal[0]) throw *failures[0];

  RayTrace out{p, s, eps, {}, {}, 0, std::nullopt, std::nullopt};
  Tracer tracer{p, s, eps, cfg, out, {}};
  tracer.accept(std::move(*principal[0]));
  for (std::size_t i = 1; i < nSamples; ++i) {
    const PullbackPath* guess = principal[i] ? &*principal[i] : nullptr;
    if (!tracer.advance(grid[i - 1], grid[i], guess, 0)) break;
  }
  return out;
}

FunctionalResidual functionalResidual(const RayTrace& trace,
                                      const RayConfig& cfg) {
  if (trace.samples.empty())
    throw Error(ErrorCode::InvalidArgument, "functional residual of empty trace");
  const ExternalAddress next = shift(trace.address);
  if (!next.isInfinite())
    throw Error(ErrorCode::Precondition, "shifted address must be infinite");
  FunctionalResidual r;
  for (const RaySample& sample : trace.samples) {
    const double ft = modelGrowth(sample.t);
    if (!std::isfinite(ft) || ft > 1e300) {
      ++r.skipped;
      continue;
    }
    const Complex lhs = std::exp(sample.z) + trace.parameter.kappa;
    const Complex rhs = tracePoint(trace.parameter, next, ft, trace.eps, cfg).z;
    r.maxResidual = std::max(r.maxResidual, std::abs(lhs - rhs));
    ++r.evaluated;
  }
  return r;
}

bool AsymptoticReport::allPositive() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AsymptoticCheck& c) { return c.margin > 0.0; });
}

AsymptoticReport asymptoticResidual(const RayTrace& trace) {
  AsymptoticReport report;
  report.bigTee = bigTee(trace.address, trace.parameter.kappa);
  const double im = kTwoPi * static_cast<double>(trace.address.at(1));
  for (const RaySample& sample : trace.samples) {
    if (sample.t < report.bigTee) {
      report.excluded.push_back(sample.t);
      continue;
    }
    const double deviation = std::abs(sample.z - Complex(sample.t, im));
    report.checks.push_back({sample.t, std::exp(-sample.t / 2.0) - deviation});
  }
  return report;
}

bool inContinuityFamily(const ExternalAddress& s, const ExternalAddress& sTilde,
                        double K, std::size_t n0, std::size_t depthCap) {
  if (!s.isInfinite() || !sTilde.isInfinite()) return false;
  std::size_t horizon = depthCap;
  if (s.isExact() && sTilde.isExact()) {
    const std::size_t ps = s.prefix().size(), pt = sTilde.prefix().size();
    const std::size_t ls = s.cycle().size(), lt = sTilde.cycle().size();
    horizon = std::max({ps, pt, n0}) + std::lcm(ls, lt) + std::max(ls, lt);
  }
  horizon = std::min({horizon, s.resolutionCap(), sTilde.resolutionCap()});
  if (horizon < n0) return false;
  double runningMax = 0.0;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const Entry a = s.at(k), b = sTilde.at(k);
    if (k <= n0 && a != b) return false;
    runningMax = std::max(runningMax, std::abs(static_cast<double>(a)));
    if (std::abs(static_cast<double>(b)) > K + runningMax) return false;
  }
  return true;
}

double continuityGap(const Parameter& p, const ExternalAddress& s,
                     const ExternalAddress& sTilde, double K, std::size_t n0,
                     double t0, double eps, const RayConfig& cfg,
                     std::size_t gridPoints) {
  if (gridPoints < 2)
    throw Error(ErrorCode::InvalidArgument, "continuity grid needs 2 points");
  if (!inContinuityFamily(s, sTilde, K, n0, cfg.depthCap))
    throw Error(ErrorCode::Precondition,
                formatAddress(sTilde) + " is not in S(s, K, n0) for s = " +
                    formatAddress(s));
  double gap = 0.0;
  for (std::size_t i = 0; i < gridPoints; ++i) {
    const double t = t0 + 10.0 * static_cast<double>(i) /
                              static_cast<double>(gridPoints - 1);
    const Complex a = tracePoint(p, s, t, eps, cfg).z;
    const Complex b = tracePoint(p, sTilde, t, eps, cfg).z;
    gap = std::max(gap, std::abs(a - b));
  }
  return gap;
}

std::string_view verdictName(TailReport::Verdict v) {
  switch (v) {
    case TailReport::Verdict::LandsFinite: return "LANDS_FINITE";
    case TailReport::Verdict::EscapesLeft: return "ESCAPES_LEFT";
    case TailReport::Verdict::UnboundedOther: return "UNBOUNDED_OTHER";
    case TailReport::Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

TailReport tailDiagnostic(const RayTrace& trace, const RayConfig& cfg) {
  TailReport report;
  const auto& samples = trace.samples;
  if (samples.size() < cfg.tailWindow || cfg.tailWindow == 0) {
    report.evidence.window = samples.size();
    return report;
  }
  const auto first = samples.end() - static_cast<long>(cfg.tailWindow);
  TailEvidence& ev = report.evidence;
  ev.window = cfg.tailWindow;
  ev.last = samples.back().z;
  ev.minAbs = ev.minRe = ev.minIm = std::numeric_limits<double>::infinity();
  ev.maxAbs = ev.maxRe = ev.maxIm = -std::numeric_limits<double>::infinity();
  ev.reDecreasing = true;
  for (auto it = first; it != samples.end(); ++it) {
    const Complex z = it->z;
    ev.minAbs = std::min(ev.minAbs, std::abs(z));
    ev.maxAbs = std::max(ev.maxAbs, std::abs(z));
    ev.minRe = std::min(ev.minRe, z.real());
    ev.maxRe = std::max(ev.maxRe, z.real());
    ev.minIm = std::min(ev.minIm, z.imag());
    ev.maxIm = std::max(ev.maxIm, z.imag());
    if (it != first && !(z.real() < (it - 1)->z.real())) ev.reDecreasing = false;
    for (auto jt = first; jt != it; ++jt)
      ev.diameter = std::max(ev.diameter, std::abs(z - jt->z));
    report.stripEstimates.push_back(
        static_cast<long long>(std::llround(z.imag() / kTwoPi)));
  }
  report.diameterBound = ev.diameter;
  using V = TailReport::Verdict;
  if (ev.reDecreasing && ev.last.real() < cfg.reFloor) {
    report.verdict = V::EscapesLeft;
  } else if (ev.diameter < cfg.cloudDiameter && ev.maxAbs < cfg.ceiling) {
    report.verdict = V::LandsFinite;
    report.limit = ev.last;
  } else if (ev.maxAbs > cfg.ceiling) {
    report.verdict = V::UnboundedOther;
  }
  return report;
}

}  // namespace expdyn
