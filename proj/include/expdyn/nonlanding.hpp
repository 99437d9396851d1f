#ifndef EXPDYN_NONLANDING_HPP
#define EXPDYN_NONLANDING_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "expdyn/address.hpp"
#include "expdyn/itinerary.hpp"
#include "expdyn/ray_engine.hpp"

namespace expdyn {

/// T_n = 2 + max_{k<=n} s_k.
Entry teeSequence(const ExternalAddress& s, std::size_t n);

/// Stage data (n_1, ..., n_J) of the family
///   r(n_1, n_2, ...) = T_1 s_1 ... s_{n_1-1} T_{n_1} s_1 ... s_{n_2-1} T_{n_2} ...
struct StagePlan {
  std::vector<std::size_t> ns;
  ExternalAddress base;
  /// n_j for j > ns.size(). Unset means "repeat the last n" (1 if ns is
  /// empty), which keeps the family member eventually periodic.
  std::function<std::size_t(std::size_t)> continuation;
};

/// The block s_1 ... s_{n-1} T_n.
std::vector<Entry> stageBlock(const ExternalAddress& s, std::size_t n);

enum class Tail { ContinueFamily, LoopToBase };

/// ContinueFamily: the family member r(n_1, ..., n_J, ...).
/// LoopToBase: the preimage T_1 s_1 ... T_{n_J} s of the base address.
ExternalAddress candidateAddress(const StagePlan& plan, Tail tail,
                                 std::size_t resolutionCap = kDefaultDepthCap);

struct Claim1Report {
  double tStarR = 0.0;
  double tStarS = 0.0;
  double bound = 0.0;        // t_s^* + 2
  bool boundHolds = false;   // tStarR <= bound, reported only
  double firstTerm = 0.0;    // 2 pi |r_1|
  double T0 = 0.0;           // 2 t_s^* + log^+|kappa| + 8
  double bigTeeR = 0.0;      // T_r, an upper bound for t_r^kappa
  bool bigTeeBelowT0 = false;
};

Claim1Report claim1Report(const ExternalAddress& r, const ExternalAddress& s,
                          Complex kappa);

/// Mismatch witness for one m: r_{m+k} = T_{k'} with k' >= k,
/// r_{m+k} >= 2 + s_k and u_k != u~_{m+k}.
struct Claim2Witness {
  std::size_t m = 0;
  std::optional<std::size_t> k;
  std::size_t kPrime = 0;
  Entry entry = 0;
};

struct Claim2Report {
  std::size_t depth = 0;
  std::vector<Claim2Witness> witnesses;
  bool allFound() const;
};

Claim2Report claim2Check(const StagePlan& plan, std::size_t depth,
                         std::size_t searchLimit = 256);

struct PairwiseItineraryReport {
  std::size_t pairs = 0;
  std::size_t distinct = 0;
  /// First pair (i, j) whose itineraries agree to the depth.
  std::optional<std::pair<std::size_t, std::size_t>> firstCollision;
  bool allDistinct() const { return distinct == pairs; }
};

/// Throws Error(Precondition) when two plans give the same family member.
PairwiseItineraryReport pairwiseDistinctItineraries(
    const std::vector<StagePlan>& plans, std::size_t depth);

struct StageAttempt {
  std::size_t n = 0;
  double absG = 0.0;
  bool feasible = false;
};

struct StageRecord {
  std::size_t j = 0;
  std::size_t n = 0;
  double t = 0.0;
  double absG = 0.0;       // |g_r(t_j)| of the chosen family member
  double stageAbsG = 0.0;  // |g_{r^j}(t_j)|
  std::size_t grid = 0;    // grid size that located t_j
  std::vector<StageAttempt> attempts;
  std::vector<std::size_t> feasible;
};

struct CertificateConfig {
  std::optional<double> T0;  // defaults to 2 t_s^* + log^+|kappa| + 8
  std::size_t grid = 200;
  double tMin = 0.05;
  double eps = 1e-12;
  std::size_t attemptCap = 64;
  std::size_t gridRefinements = 3;  // grid doublings before giving up
  RayConfig ray;
};

/// Stage j of the construction. `prefixPlan` holds n_1 ... n_{j-1};
/// t_j is the largest grid potential below `previousT` (at most T0 when
/// previousT is unset) with |g_{r^j}| > j.
StageRecord selectNextStage(const Parameter& p, const ExternalAddress& s,
                            const StagePlan& prefixPlan, std::size_t j,
                            double T0, std::size_t grid,
                            const CertificateConfig& cfg,
                            std::optional<double> previousT = std::nullopt);

struct AccumulationCertificate {
  Complex kappa;
  ExternalAddress base;
  double T0 = 0.0;
  std::size_t grid = 0;
  double tMin = 0.0;
  double eps = 0.0;
  std::vector<StageRecord> stages;
  std::vector<Entry> finalPrefix;
};

/// Thrown by buildCertificate with the stages completed so far.
class CertificateError : public Error {
 public:
  CertificateError(const Error& cause, AccumulationCertificate partial)
      : Error(cause.code(), cause.what()), partial_(std::move(partial)) {}
  const AccumulationCertificate& partial() const noexcept { return partial_; }

 private:
  AccumulationCertificate partial_;
};

AccumulationCertificate buildCertificate(const Parameter& p,
                                         const ExternalAddress& s,
                                         std::size_t J,
                                         const CertificateConfig& cfg = {});

/// Invariant violations of a certificate, empty when it is sound.
std::vector<std::string> certificateViolations(
    const AccumulationCertificate& cert);

/// The Sturmian address s_k = floor((k+1) theta) - floor(k theta).
ExternalAddress sturmianAddress(double theta,
                                std::size_t resolutionCap = kDefaultDepthCap);

/// True iff every entry of itin_s(r) up to depth is adjacent to 0.
/// Requires s not periodic with K(s) = 000... to depth.
bool xSetMember(const ExternalAddress& r, const ExternalAddress& s,
                std::size_t depth, std::size_t depthCap = kDefaultDepthCap);

}  // namespace expdyn

#endif  // EXPDYN_NONLANDING_HPP
