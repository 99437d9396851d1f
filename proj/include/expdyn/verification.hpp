#ifndef EXPDYN_VERIFICATION_HPP
#define EXPDYN_VERIFICATION_HPP

#include <map>
#include <string>
#include <vector>

namespace expdyn {

/// Pinned tolerances of the acceptance suite. Names are the keys accepted
/// by applyToleranceOverride.
struct Tolerances {
  double asymptoticMargin = 0.0;  // every margin must exceed this
  double semiconjugacy = 1e-9;
  double continuityGap = 1e-6;
  double symmetry = 1e-10;
  double orbitBound = 50.0;
  double preimageRe = -10.0;
  double budgetScale = 1.0;  // multiplies every runtime budget
};

/// Sets one tolerance by name ("semiconjugacy", "symmetry", ...).
/// Throws Error(InvalidArgument) for unknown names.
void applyToleranceOverride(Tolerances& tol, const std::string& name, double value);

struct CriterionResult {
  int id = 0;
  std::string group;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;
};

struct VerifyOptions {
  std::vector<std::string> only;  // empty runs every group
  Tolerances tol;
};

/// Group names in criterion order.
const std::vector<std::string>& verificationGroups();

std::vector<CriterionResult> runVerification(const VerifyOptions& opts = {});

/// "PASS 3 continuity: ... (0.12 s of 5 s)"
std::string formatResult(const CriterionResult& r);

}  // namespace expdyn

#endif  // EXPDYN_VERIFICATION_HPP
