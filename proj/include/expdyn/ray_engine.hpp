#ifndef EXPDYN_RAY_ENGINE_HPP
#define EXPDYN_RAY_ENGINE_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expdyn/address.hpp"
#include "expdyn/growth.hpp"

namespace expdyn {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Parameter of E_kappa(z) = exp(z) + kappa.
struct Parameter {
  enum class Label { Custom, MisiurewiczExample, Siegel, AttractingExample };

  Complex kappa;
  Label label = Label::Custom;
  double theta = 0.0;  // rotation number for Label::Siegel
  /// addr(kappa) when it is known for the parameter.
  std::optional<ExternalAddress> singularAddress;
};

double goldenMean();

/// misiurewicz-example: kappa = log(2 pi) + i pi/2 with addr(kappa) = 0,(1).
/// siegel(theta): kappa = 2 pi i theta - exp(2 pi i theta), so that 2 pi i
/// theta is a fixed point of multiplier exp(2 pi i theta).
/// attracting-example: kappa = -2.
Parameter knownParameter(Parameter::Label label, double theta = 0.0);
Parameter customParameter(Complex kappa);
/// Accepts "misiurewicz-example", "attracting-example", "siegel-golden" and
/// "siegel:<theta>".
Parameter parseParameterLabel(std::string_view label);
std::string parameterLabelName(const Parameter& p);

/// Tolerances of the ray engine, kept in one record.
struct RayConfig {
  double cloudDiameter = 1e-4;  // terminal cloud diameter for LANDS_FINITE
  double reFloor = -10.0;       // terminal real part for ESCAPES_LEFT
  double ceiling = 1e6;         // |z| above this is UNBOUNDED_OTHER
  double branchJump = std::numbers::pi;
  double pullbackFloor = 1e-10;  // |z - kappa| below this stops a pullback
  std::size_t maxDepth = 20000;
  std::size_t refinementCap = 12;  // bisection levels per grid interval
  std::size_t tailWindow = 20;
  std::size_t depthCap = 512;  // resolution used for generator-backed growth
};

struct RaySample {
  double t = 0.0;
  Complex z;
  std::size_t depth = 0;
  double errBound = 0.0;
};

/// Full backward orbit behind one sample. stages[k] approximates
/// g_{sigma^{k-1}(s)}(F^{k-1}(t)) for 1 <= k <= depth + 1 (stages[0] unused).
struct PullbackPath {
  RaySample sample;
  std::vector<Complex> stages;
  std::vector<double> contractions;  // 1/|z_k - kappa| per pullback
  /// (stage, offset) pairs where continuity moved the logarithm branch.
  std::vector<std::pair<std::size_t, long long>> corrections;
};

struct BranchCorrection {
  std::size_t sample = 0;
  double t = 0.0;
  std::size_t stage = 0;
  long long offset = 0;  // multiples of 2 pi i added to the principal branch
};

struct RayTrace {
  Parameter parameter;
  ExternalAddress address;
  double eps = 0.0;
  std::vector<RaySample> samples;  // strictly decreasing t
  std::vector<BranchCorrection> branchLog;
  std::size_t refinements = 0;
  /// Why the trace stopped above tMinHint, when it did.
  std::optional<std::string> truncation;
  std::optional<double> truncatedAt;
};

/// log^+|z|
double logPlus(double x);

/// T_s = 2 t_s^* + log^+|kappa| + 4.
double bigTee(const ExternalAddress& s, Complex kappa,
              std::size_t depthCap = kDefaultDepthCap);

/// Minimal n >= 1 with F^n(t) >= max(T_{sigma^n(s)}, 2 log(1/eps)).
std::size_t seedDepth(const ExternalAddress& s, Complex kappa, double t,
                      double eps, const RayConfig& cfg = {});

/// Backward iteration z <- log(z - kappa) + 2 pi i s_k from the seed
/// F^n(t) + 2 pi i s_{n+1}. With a reference path each logarithm is placed on
/// the branch nearest the reference value of the same stage.
PullbackPath tracePath(const Parameter& p, const ExternalAddress& s, double t,
                       double eps, const RayConfig& cfg = {},
                       const std::vector<Complex>* reference = nullptr);

RaySample tracePoint(const Parameter& p, const ExternalAddress& s, double t,
                     double eps, const RayConfig& cfg = {});

/// Samples on a geometric grid from tMax down to tMinHint with branch
/// continuity enforced between neighbours. Stops with `truncation` set when
/// a pullback hits the singular floor or refinement exceeds its cap.
RayTrace traceRay(const Parameter& p, const ExternalAddress& s, double tMax,
                  double tMinHint, std::size_t nSamples, double eps,
                  const RayConfig& cfg = {});

struct FunctionalResidual {
  double maxResidual = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // F(t) outside the double range
};

/// max |E_kappa(g_s(t)) - g_{sigma(s)}(F(t))| with the right-hand side
/// recomputed by tracePoint.
FunctionalResidual functionalResidual(const RayTrace& trace,
                                      const RayConfig& cfg = {});

struct AsymptoticCheck {
  double t = 0.0;
  double margin = 0.0;  // exp(-t/2) - |g(t) - (t + 2 pi i s_1)|
};

struct AsymptoticReport {
  double bigTee = 0.0;
  std::vector<AsymptoticCheck> checks;
  std::vector<double> excluded;  // sample t below T_s
  bool allPositive() const;
};

AsymptoticReport asymptoticResidual(const RayTrace& trace);

/// True iff sTilde agrees with s in the first n0 entries and
/// |sTilde_n| <= K + max_{k<=n} |s_k| for every n.
bool inContinuityFamily(const ExternalAddress& s, const ExternalAddress& sTilde,
                        double K, std::size_t n0,
                        std::size_t depthCap = kDefaultDepthCap);

/// sup of |g_s(t) - g_sTilde(t)| over a uniform grid on [t0, t0 + 10].
double continuityGap(const Parameter& p, const ExternalAddress& s,
                     const ExternalAddress& sTilde, double K, std::size_t n0,
                     double t0, double eps, const RayConfig& cfg = {},
                     std::size_t gridPoints = 41);

struct TailEvidence {
  std::size_t window = 0;
  double minAbs = 0, maxAbs = 0;
  double minRe = 0, maxRe = 0;
  double minIm = 0, maxIm = 0;
  double diameter = 0;
  bool reDecreasing = false;
  Complex last;
};

struct TailReport {
  enum class Verdict { LandsFinite, EscapesLeft, UnboundedOther, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Complex> limit;  // LandsFinite only
  double diameterBound = 0.0;
  TailEvidence evidence;
  std::vector<long long> stripEstimates;  // round(Im z / 2 pi), terminal samples
};

std::string_view verdictName(TailReport::Verdict v);

/// Heuristic classification of the low-potential end of a trace.
TailReport tailDiagnostic(const RayTrace& trace, const RayConfig& cfg = {});

}  // namespace expdyn

#endif  // EXPDYN_RAY_ENGINE_HPP
