// expdyn: dynamic rays, itineraries, non-landing certificates and renders
// for exp(z) + kappa.
//
// Exit codes: 0 success, 1 usage, 2 numerical failure or partial result,
// 3 verification failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "expdyn/json_io.hpp"
#include "expdyn/nonlanding.hpp"
#include "expdyn/ray_engine.hpp"
#include "expdyn/render.hpp"
#include "expdyn/verification.hpp"

using namespace expdyn;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

// Reads --config files: a JSON object whose nested objects are subcommand
// sections, e.g. {"threads": 2, "ray": {"t-max": 8}, "nonlanding": {"build":
// {"stages": 4}}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto next = parents;
        next.push_back(it.key());
        flatten(*it, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array())
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(*it));
      items.push_back(std::move(item));
    }
  }
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exitFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Precondition:
    case ErrorCode::Io:
      return kUsage;
    default:
      return kNumerical;
  }
}

void report(std::string_view code, const std::string& message) {
  std::cerr << "error[" << code << "]: " << message << "\n";
}

void requirePositive(const char* name, double v) {
  if (!std::isfinite(v) || !(v > 0.0))
    throw UsageError(std::string("--") + name + " must be positive and finite");
}

Complex parseComplex(const std::string& text, const char* name) {
  const auto comma = text.find(',');
  try {
    std::size_t a = 0, b = 0;
    const std::string re = text.substr(0, comma);
    const double x = std::stod(re, &a);
    double y = 0.0;
    if (comma != std::string::npos) {
      const std::string im = text.substr(comma + 1);
      y = std::stod(im, &b);
      if (b != im.size()) throw std::invalid_argument(im);
    }
    if (a != re.size() || !std::isfinite(x) || !std::isfinite(y))
      throw std::invalid_argument(re);
    return {x, y};
  } catch (const std::exception&) {
    throw UsageError(std::string("--") + name + " expects 're,im', got '" + text + "'");
  }
}

struct ParameterFlags {
  std::string param;
  std::string kappa;

  void add(CLI::App* app) {
    app->add_option("--param", param,
                    "misiurewicz-example, attracting-example, siegel-golden or "
                    "siegel:<theta>");
    app->add_option("--kappa", kappa, "custom parameter as re,im");
  }

  Parameter resolve() const {
    if (!param.empty() && !kappa.empty())
      throw UsageError("--param and --kappa are mutually exclusive");
    if (!kappa.empty()) return customParameter(parseComplex(kappa, "kappa"));
    if (param.empty()) throw UsageError("one of --param or --kappa is required");
    return parseParameterLabel(param);
  }
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    writeFileAtomic(out, text);
}

// Address grammar, or "sturmian:<theta>" for the generator-backed Sturmian
// address of a rotation number.
ExternalAddress requireAddress(const std::string& text, const char* flag,
                               std::size_t cap = kDefaultDepthCap) {
  if (text.empty()) throw UsageError(std::string("--") + flag + " is required");
  constexpr std::string_view kSturmian = "sturmian:";
  if (text.starts_with(kSturmian)) {
    double theta = 0.0;
    try {
      theta = std::stod(text.substr(kSturmian.size()));
    } catch (const std::exception&) {
      throw UsageError(std::string("--") + flag + ": bad rotation number in '" + text + "'");
    }
    return sturmianAddress(theta, cap);
  }
  return parseAddress(text);
}

// ray ---------------------------------------------------------------------

struct RayFlags {
  ParameterFlags parameter;
  std::string address;
  double tMax = 12.0;
  double tMin = 0.05;
  std::size_t samples = 200;
  double eps = 1e-12;
  std::string out;
};

int runRay(const RayFlags& f) {
  const Parameter p = f.parameter.resolve();
  const ExternalAddress s = requireAddress(f.address, "address");
  requirePositive("t-max", f.tMax);
  requirePositive("t-min", f.tMin);
  requirePositive("eps", f.eps);
  if (!(f.tMin < f.tMax)) throw UsageError("--t-min must be below --t-max");
  if (f.samples < 2) throw UsageError("--samples must be at least 2");
  if (!(f.eps < 1.0)) throw UsageError("--eps must be below 1");

  const RayTrace trace = traceRay(p, s, f.tMax, f.tMin, f.samples, f.eps);
  const TailReport tail = tailDiagnostic(trace);
  emit(f.out, dumpJson(toJson(trace, tail)));
  std::cerr << "samples " << trace.samples.size() << ", tail "
            << verdictName(tail.verdict) << "\n";
  if (trace.truncation && *trace.truncation != "singular-floor") {
    report(*trace.truncation, "trace truncated at t = " +
                                  std::to_string(trace.truncatedAt.value_or(0.0)));
    return kNumerical;
  }
  return kOk;
}

// itin / kneading -----------------------------------------------------------

struct ItinFlags {
  std::string address;
  std::string base;
  std::size_t depth = 20;
  std::size_t depthCap = kDefaultDepthCap;
  std::string json;
};

int runItin(const ItinFlags& f, bool kneadingOnly) {
  if (f.depth == 0) throw UsageError("--depth must be at least 1");
  if (f.depthCap == 0) throw UsageError("--depth-cap must be at least 1");
  const ExternalAddress s = requireAddress(f.address, "address", f.depthCap);
  const ExternalAddress r = kneadingOnly ? s : requireAddress(f.base, "base", f.depthCap);
  Itinerary it;
  int code = kOk;
  try {
    it = itinerary(s, r, f.depth, f.depthCap);
  } catch (const ItineraryUndecided& e) {
    it = e.partial();
    report("undecided", e.what());
    code = kNumerical;
  }
  std::cout << formatItinerary(it) << "\n";
  if (!f.json.empty()) {
    Json j = toJson(it);
    j["address"] = formatAddress(s);
    j["base"] = formatAddress(r);
    j["complete"] = code == kOk;
    writeFileAtomic(f.json, dumpJson(j));
  }
  return code;
}

// nonlanding ----------------------------------------------------------------

struct BuildFlags {
  ParameterFlags parameter;
  std::string base;
  std::size_t stages = 4;
  std::size_t grid = 200;
  double tMin = 0.05;
  double t0 = 0.0;
  double eps = 1e-12;
  std::size_t attemptCap = 64;
  std::string out;
};

int runBuild(const BuildFlags& f) {
  const Parameter p = f.parameter.resolve();
  if (f.stages == 0) throw UsageError("--stages must be at least 1");
  if (f.grid < 2) throw UsageError("--grid must be at least 2");
  if (f.attemptCap == 0) throw UsageError("--attempt-cap must be at least 1");
  requirePositive("t-min", f.tMin);
  requirePositive("eps", f.eps);
  if (f.t0 != 0.0) requirePositive("t0", f.t0);
  ExternalAddress s = ExternalAddress::constant(0);
  if (!f.base.empty())
    s = requireAddress(f.base, "base");
  else if (p.singularAddress)
    s = *p.singularAddress;
  else
    throw UsageError("--base is required for parameters without a known addr(kappa)");

  CertificateConfig cfg;
  cfg.grid = f.grid;
  cfg.tMin = f.tMin;
  cfg.eps = f.eps;
  cfg.attemptCap = f.attemptCap;
  if (f.t0 != 0.0) cfg.T0 = f.t0;
  try {
    const AccumulationCertificate cert = buildCertificate(p, s, f.stages, cfg);
    emit(f.out, dumpJson(toJson(cert)));
    const auto violations = certificateViolations(cert);
    for (const auto& v : violations) report("verification", v);
    return violations.empty() ? kOk : kVerification;
  } catch (const CertificateError& e) {
    emit(f.out, dumpJson(toJson(e.partial())));
    report(errorCodeName(e.code()), std::string(e.what()) + " (partial certificate written)");
    return kNumerical;
  }
}

struct CertifyFlags {
  std::string in;
  bool recompute = true;
  double tolerance = 1e-9;
};

int runCertify(const CertifyFlags& f) {
  if (f.in.empty()) throw UsageError("--in is required");
  Json j;
  try {
    j = Json::parse(readFile(f.in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Syntax, std::string("certificate: ") + e.what());
  }
  const AccumulationCertificate cert = certificateFromJson(j);
  std::vector<std::string> problems = certificateViolations(cert);

  StagePlan plan{{}, cert.base, {}};
  std::vector<Entry> prefix{teeSequence(cert.base, 1)};
  for (const StageRecord& st : cert.stages) {
    plan.ns.push_back(st.n);
    auto block = stageBlock(cert.base, st.n);
    prefix.insert(prefix.end(), block.begin(), block.end());
    if (!f.recompute) continue;
    const Parameter p = customParameter(cert.kappa);
    const ExternalAddress r = candidateAddress(plan, Tail::ContinueFamily);
    // Reproduce the stage grid down to t_j.
    const double ratio = std::log(cert.tMin / cert.T0);
    const std::size_t g = st.grid ? st.grid : cert.grid;
    const double pos = std::log(st.t / cert.T0) / ratio * static_cast<double>(g - 1);
    const auto index = static_cast<std::size_t>(std::llround(pos));
    const Complex z =
        index == 0 ? tracePoint(p, r, st.t, cert.eps).z
                   : traceRay(p, r, cert.T0, st.t, index + 1, cert.eps).samples.back().z;
    const double absG = std::abs(z);
    if (std::abs(absG - st.absG) > f.tolerance * std::max(1.0, st.absG))
      problems.push_back("stage " + std::to_string(st.j) + ": recomputed |g| " +
                         std::to_string(absG) + " differs from " +
                         std::to_string(st.absG));
  }
  if (prefix != cert.finalPrefix) problems.push_back("finalPrefix does not match the stages");
  for (const auto& msg : problems) report("verification", msg);
  std::cout << (problems.empty() ? "certificate ok" : "certificate rejected") << ": "
            << cert.stages.size() << " stages\n";
  return problems.empty() ? kOk : kVerification;
}

// render --------------------------------------------------------------------

void writeImage(const RgbImage& img, const std::string& out, const std::string& format) {
  if (out.empty()) throw UsageError("--out is required");
  std::string fmt = format;
  if (fmt.empty())
    fmt = out.size() >= 4 && out.substr(out.size() - 4) == ".ppm" ? "ppm" : "png";
  if (fmt == "ppm")
    writePpm(img, out);
  else if (fmt == "png")
    writePng(img, out);
  else
    throw UsageError("--format must be png or ppm");
}

Style loadStyle(const std::string& path) {
  return path.empty() ? Style{} : parseStyle(readFile(path));
}

struct JuliaFlags {
  ParameterFlags parameter;
  std::string center = "0,0";
  double width = 8.0;
  int pxWidth = 800;
  int pxHeight = 800;
  int maxIter = 512;
  double escapeRe = 50.0;
  std::vector<std::string> rays;
  std::size_t orbit = 0;
  std::string style;
  std::string out;
  std::string format;
};

int runJulia(const JuliaFlags& f) {
  const Parameter p = f.parameter.resolve();
  if (f.pxWidth <= 0 || f.pxHeight <= 0) throw UsageError("image needs at least one pixel");
  if (f.maxIter < 1) throw UsageError("--max-iter must be at least 1");
  requirePositive("width", f.width);
  if (!std::isfinite(f.escapeRe)) throw UsageError("--escape-re must be finite");
  if (f.out.empty()) throw UsageError("--out is required");
  const Viewport v = Viewport::square(parseComplex(f.center, "center"), f.width,
                                      f.pxWidth, f.pxHeight);
  const Style style = loadStyle(f.style);
  std::vector<RayTrace> traces;
  for (const std::string& a : f.rays)
    traces.push_back(traceRay(p, requireAddress(a, "ray"), 12.0, 0.05, 300, 1e-12));
  std::vector<std::vector<Complex>> orbits;
  if (f.orbit > 0) orbits.push_back(singularOrbit(p, f.orbit).points);
  const ImageField field = escapeField(p, v, f.maxIter, f.escapeRe);
  writeImage(renderComposite(field, traces, orbits, style), f.out, f.format);
  return kOk;
}

struct FigureFlags {
  double theta = 0.0;
  int px = 800;
  std::string style;
  std::string out;
  std::string format;
};

int runFigure(const FigureFlags& f) {
  if (f.px <= 0) throw UsageError("--px must be positive");
  if (f.theta != 0.0 && !(f.theta > 0.0 && f.theta < 1.0))
    throw UsageError("--theta must lie in (0, 1)");
  if (f.out.empty()) throw UsageError("--out is required");
  FigureRecipe recipe;
  recipe.theta = f.theta;
  recipe.pxWidth = recipe.pxHeight = f.px;
  recipe.style = loadStyle(f.style);
  const Figure fig = figure1(recipe);
  writeImage(fig.image, f.out, f.format);
  std::cerr << "singular orbit " << fig.singular.points.size() << " points"
            << (fig.singular.overflowed ? " (overflowed)" : "") << "\n";
  return kOk;
}

// verify --------------------------------------------------------------------

struct VerifyFlags {
  std::vector<std::string> only;
  std::vector<std::string> tolerances;
  std::string json;
};

int runVerify(const VerifyFlags& f) {
  VerifyOptions opts;
  for (const std::string& item : f.only) {
    std::stringstream ss(item);
    std::string g;
    while (std::getline(ss, g, ','))
      if (!g.empty()) opts.only.push_back(g);
  }
  for (const std::string& t : f.tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("--tolerance expects name=value");
    double value = 0.0;
    try {
      value = std::stod(t.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--tolerance value in '" + t + "' is not a number");
    }
    applyToleranceOverride(opts.tol, t.substr(0, eq), value);
  }
  const auto results = runVerification(opts);
  bool all = true;
  Json rows = Json::array();
  for (const CriterionResult& r : results) {
    std::cout << formatResult(r) << "\n";
    all = all && r.passed;
    rows.push_back({{"id", r.id}, {"group", r.group}, {"passed", r.passed},
                    {"detail", r.detail}, {"seconds", r.seconds}, {"budget", r.budget}});
  }
  if (!f.json.empty())
    writeFileAtomic(f.json, dumpJson({{"passed", all}, {"criteria", rows}}));
  return all ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic rays and symbolic dynamics of exp(z) + kappa"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of option values (explicit flags win)");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: all)");

  RayFlags ray;
  auto* rayCmd = app.add_subcommand("ray", "trace a dynamic ray to JSON");
  ray.parameter.add(rayCmd);
  rayCmd->add_option("--address", ray.address, "external address");
  rayCmd->add_option("--t-max", ray.tMax, "largest potential");
  rayCmd->add_option("--t-min", ray.tMin, "smallest potential to attempt");
  rayCmd->add_option("--samples", ray.samples, "grid points");
  rayCmd->add_option("--eps", ray.eps, "seeding accuracy");
  rayCmd->add_option("--out", ray.out, "output file (default stdout)");

  ItinFlags itin;
  auto* itinCmd = app.add_subcommand("itin", "itinerary of an address");
  itinCmd->add_option("--address", itin.address, "address s");
  itinCmd->add_option("--base", itin.base, "base address r");
  itinCmd->add_option("--depth", itin.depth, "entries to compute");
  itinCmd->add_option("--depth-cap", itin.depthCap, "comparison depth cap");
  itinCmd->add_option("--json", itin.json, "also write JSON here");

  ItinFlags knead;
  auto* kneadCmd = app.add_subcommand("kneading", "kneading sequence K(s)");
  kneadCmd->add_option("--address", knead.address, "address s");
  kneadCmd->add_option("--depth", knead.depth, "entries to compute");
  kneadCmd->add_option("--depth-cap", knead.depthCap, "comparison depth cap");
  kneadCmd->add_option("--json", knead.json, "also write JSON here");

  auto* nonCmd = app.add_subcommand("nonlanding", "non-landing ray construction");
  nonCmd->require_subcommand(1);
  BuildFlags build;
  auto* buildCmd = nonCmd->add_subcommand("build", "build an accumulation certificate");
  build.parameter.add(buildCmd);
  buildCmd->add_option("--base", build.base, "addr(kappa) (default: bundled)");
  buildCmd->add_option("--stages", build.stages, "number of stages J");
  buildCmd->add_option("--grid", build.grid, "potential grid size");
  buildCmd->add_option("--t-min", build.tMin, "bottom of the potential grid");
  buildCmd->add_option("--t0", build.t0, "override T0");
  buildCmd->add_option("--eps", build.eps, "seeding accuracy");
  buildCmd->add_option("--attempt-cap", build.attemptCap, "candidates per stage");
  buildCmd->add_option("--out", build.out, "output file (default stdout)");
  CertifyFlags certify;
  auto* certifyCmd = nonCmd->add_subcommand("certify", "re-check a certificate");
  certifyCmd->add_option("--in", certify.in, "certificate JSON");
  certifyCmd->add_flag("--recompute,!--no-recompute", certify.recompute,
                       "retrace |g_r(t_j)| for every stage");
  certifyCmd->add_option("--tolerance", certify.tolerance, "relative |g| tolerance");

  auto* renderCmd = app.add_subcommand("render", "escape-time images");
  renderCmd->require_subcommand(1);
  JuliaFlags julia;
  auto* juliaCmd = renderCmd->add_subcommand("julia", "escape-time field with overlays");
  julia.parameter.add(juliaCmd);
  juliaCmd->add_option("--center", julia.center, "viewport centre re,im");
  juliaCmd->add_option("--width", julia.width, "viewport width");
  juliaCmd->add_option("--px-width", julia.pxWidth, "pixels across");
  juliaCmd->add_option("--px-height", julia.pxHeight, "pixels down");
  juliaCmd->add_option("--max-iter", julia.maxIter, "iteration cap");
  juliaCmd->add_option("--escape-re", julia.escapeRe, "escape threshold on Re z");
  juliaCmd->add_option("--ray", julia.rays, "address of a ray to overlay (repeatable)");
  juliaCmd->add_option("--orbit", julia.orbit, "singular orbit points to plot");
  juliaCmd->add_option("--style", julia.style, "style JSON file");
  juliaCmd->add_option("--out", julia.out, "image file");
  juliaCmd->add_option("--format", julia.format, "png or ppm (default from --out)");
  FigureFlags figure;
  auto* figureCmd = renderCmd->add_subcommand("figure1", "Siegel disk picture");
  figureCmd->add_option("--theta", figure.theta, "rotation number (default golden mean)");
  figureCmd->add_option("--px", figure.px, "image size in pixels");
  figureCmd->add_option("--style", figure.style, "style JSON file");
  figureCmd->add_option("--out", figure.out, "image file");
  figureCmd->add_option("--format", figure.format, "png or ppm (default from --out)");

  VerifyFlags verify;
  auto* verifyCmd = app.add_subcommand("verify", "run the acceptance suite");
  verifyCmd->add_option("--only", verify.only, "groups to run (repeatable or comma list)");
  verifyCmd->add_option("--tolerance", verify.tolerances, "override name=value");
  verifyCmd->add_option("--json", verify.json, "write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return kUsage;
  }

  try {
    if (threads < 0) throw UsageError("--threads must be positive");
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    if (*rayCmd) return runRay(ray);
    if (*itinCmd) return runItin(itin, false);
    if (*kneadCmd) return runItin(knead, true);
    if (*buildCmd) return runBuild(build);
    if (*certifyCmd) return runCertify(certify);
    if (*juliaCmd) return runJulia(julia);
    if (*figureCmd) return runFigure(figure);
    if (*verifyCmd) return runVerify(verify);
  } catch (const UsageError& e) {
    report("usage", e.what());
    return kUsage;
  } catch (const Error& e) {
    report(errorCodeName(e.code()), e.what());
    return exitFor(e.code());
  } catch (const std::exception& e) {
    report("internal", e.what());
    return kNumerical;
  }
  return kUsage;
}
