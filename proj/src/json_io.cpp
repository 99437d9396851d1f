#include "expdyn/json_io.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace expdyn {

void writeFileAtomic(const std::string& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorCode::Io, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move output into place at " + path);
  }
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json complexJson(Complex z) { return Json::array({z.real(), z.imag()}); }

Json toJson(const TailReport& tail) {
  const TailEvidence& e = tail.evidence;
  Json j;
  j["verdict"] = verdictName(tail.verdict);
  j["limit"] = tail.limit ? complexJson(*tail.limit) : Json(nullptr);
  j["diameterBound"] = tail.diameterBound;
  j["evidence"] = {{"window", e.window},
                   {"minAbs", e.minAbs}, {"maxAbs", e.maxAbs},
                   {"minRe", e.minRe},   {"maxRe", e.maxRe},
                   {"minIm", e.minIm},   {"maxIm", e.maxIm},
                   {"diameter", e.diameter},
                   {"reDecreasing", e.reDecreasing},
                   {"last", complexJson(e.last)}};
  j["stripEstimates"] = tail.stripEstimates;
  return j;
}

Json toJson(const RayTrace& trace, const std::optional<TailReport>& tail) {
  Json j;
  j["kappa"] = complexJson(trace.parameter.kappa);
  j["parameter"] = parameterLabelName(trace.parameter);
  j["address"] = formatAddress(trace.address);
  j["eps"] = trace.eps;
  Json samples = Json::array();
  for (const RaySample& s : trace.samples)
    samples.push_back({{"t", s.t}, {"z", complexJson(s.z)}, {"depth", s.depth},
                       {"err", s.errBound}});
  j["samples"] = std::move(samples);
  Json log = Json::array();
  for (const BranchCorrection& c : trace.branchLog)
    log.push_back({{"sample", c.sample}, {"t", c.t}, {"stage", c.stage},
                   {"offset", c.offset}});
  j["branchLog"] = std::move(log);
  j["refinements"] = trace.refinements;
  j["truncation"] = trace.truncation ? Json(*trace.truncation) : Json(nullptr);
  j["truncatedAt"] = trace.truncatedAt ? Json(*trace.truncatedAt) : Json(nullptr);
  if (tail) j["tail"] = toJson(*tail);
  return j;
}

Json toJson(const Itinerary& it) {
  Json entries = Json::array();
  for (const ItineraryEntry& e : it.entries) {
    switch (e.kind) {
      case ItineraryEntry::Kind::Int:
        entries.push_back({{"kind", "int"}, {"value", e.value}});
        break;
      case ItineraryEntry::Kind::Boundary:
        entries.push_back({{"kind", "boundary"}, {"value", e.value}});
        break;
      case ItineraryEntry::Kind::Star:
        entries.push_back({{"kind", "star"}});
        break;
    }
  }
  return {{"depth", it.depth()}, {"text", formatItinerary(it)}, {"entries", entries}};
}

Json toJson(const AccumulationCertificate& cert) {
  Json j;
  j["kappa"] = complexJson(cert.kappa);
  j["baseAddress"] = formatAddress(cert.base);
  j["T0"] = cert.T0;
  j["grid"] = cert.grid;
  j["tMin"] = cert.tMin;
  j["eps"] = cert.eps;
  Json stages = Json::array();
  for (const StageRecord& s : cert.stages) {
    Json attempts = Json::array();
    for (const StageAttempt& a : s.attempts)
      attempts.push_back({{"n", a.n}, {"absG", a.absG}, {"feasible", a.feasible}});
    stages.push_back({{"j", s.j},
                      {"n", s.n},
                      {"t", s.t},
                      {"absG", s.absG},
                      {"stageAbsG", s.stageAbsG},
                      {"grid", s.grid},
                      {"attempts", attempts},
                      {"feasible", s.feasible}});
  }
  j["stages"] = std::move(stages);
  j["finalPrefix"] = cert.finalPrefix;
  return j;
}

AccumulationCertificate certificateFromJson(const Json& j) {
  try {
    AccumulationCertificate c{
        {j.at("kappa").at(0).get<double>(), j.at("kappa").at(1).get<double>()},
        parseAddress(j.at("baseAddress").get<std::string>()),
        j.at("T0").get<double>(),
        j.at("grid").get<std::size_t>(),
        j.at("tMin").get<double>(),
        j.at("eps").get<double>(),
        {},
        j.at("finalPrefix").get<std::vector<Entry>>()};
    for (const Json& s : j.at("stages")) {
      StageRecord r;
      r.j = s.at("j").get<std::size_t>();
      r.n = s.at("n").get<std::size_t>();
      r.t = s.at("t").get<double>();
      r.absG = s.at("absG").get<double>();
      r.stageAbsG = s.value("stageAbsG", 0.0);
      r.grid = s.value("grid", c.grid);
      if (s.contains("attempts"))
        for (const Json& a : s["attempts"])
          r.attempts.push_back({a.at("n").get<std::size_t>(), a.at("absG").get<double>(),
                                a.at("feasible").get<bool>()});
      if (s.contains("feasible")) r.feasible = s["feasible"].get<std::vector<std::size_t>>();
      c.stages.push_back(std::move(r));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Syntax, std::string("certificate: ") + e.what());
  }
}

std::string dumpJson(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace expdyn
