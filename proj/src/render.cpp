#include "expdyn/render.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "expdyn/json_io.hpp"
#include "expdyn/nonlanding.hpp"

namespace expdyn {

Viewport Viewport::make(Complex center, double width, double height,
                        int pxWidth, int pxHeight) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) ||
      !std::isfinite(height))
    throw Error(ErrorCode::InvalidArgument, "viewport extents must be positive");
  if (pxWidth <= 0 || pxHeight <= 0)
    throw Error(ErrorCode::InvalidArgument, "viewport needs at least one pixel");
  const double planeAspect = width / height;
  const double pixelAspect = static_cast<double>(pxWidth) / pxHeight;
  if (std::abs(planeAspect - pixelAspect) > 1e-12 * pixelAspect)
    throw Error(ErrorCode::InvalidArgument,
                "plane aspect does not match pixel aspect");
  return {center, width, height, pxWidth, pxHeight};
}

Viewport Viewport::square(Complex center, double width, int pxWidth,
                          int pxHeight) {
  if (pxWidth <= 0 || pxHeight <= 0)
    throw Error(ErrorCode::InvalidArgument, "viewport needs at least one pixel");
  return make(center, width, width * pxHeight / pxWidth, pxWidth, pxHeight);
}

Complex Viewport::pixelCenter(int x, int y) const {
  return {center.real() - width / 2.0 + (x + 0.5) * width / pxWidth,
          center.imag() + height / 2.0 - (y + 0.5) * height / pxHeight};
}

std::array<double, 2> Viewport::toPixel(Complex z) const {
  return {(z.real() - (center.real() - width / 2.0)) * pxWidth / width,
          ((center.imag() + height / 2.0) - z.imag()) * pxHeight / height};
}

namespace {

inline Complex escapeStep(Complex kappa, Complex z) {
  const double m = std::exp(z.real());
  double im = z.imag();
  if (std::abs(im) > std::numbers::pi) im -= kTwoPi * std::nearbyint(im / kTwoPi);
  return {m * std::cos(im) + kappa.real(), m * std::sin(im) + kappa.imag()};
}

inline bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Several pixels advanced in lockstep so that independent exp/sincos chains
// overlap; each lane performs exactly the operations of escapeCount.
constexpr int kLanes = 8;

void escapeRow(Complex kappa, const Viewport& v, int y, int maxIter,
               double escapeRe, int* out) {
  for (int x0 = 0; x0 < v.pxWidth; x0 += kLanes) {
    const int lanes = std::min(kLanes, v.pxWidth - x0);
    Complex z[kLanes];
    bool live[kLanes] = {};
    int remaining = lanes;
    for (int i = 0; i < lanes; ++i) {
      z[i] = v.pixelCenter(x0 + i, y);
      live[i] = true;
      out[x0 + i] = kNotEscaped;
    }
    for (int n = 0; remaining > 0; ++n) {
      for (int i = 0; i < lanes; ++i) {
        if (!live[i]) continue;
        if (z[i].real() > escapeRe) {
          out[x0 + i] = n;
        } else if (n == maxIter) {
          out[x0 + i] = kNotEscaped;
        } else {
          z[i] = escapeStep(kappa, z[i]);
          if (finite(z[i])) continue;
          out[x0 + i] = n + 1;
        }
        live[i] = false;
        --remaining;
      }
    }
  }
}

}  // namespace

int escapeCount(Complex kappa, Complex z, int maxIter, double escapeRe) {
  for (int n = 0;; ++n) {
    if (z.real() > escapeRe) return n;
    if (n == maxIter) return kNotEscaped;
    z = escapeStep(kappa, z);
    if (!finite(z)) return n + 1;
  }
}

ImageField escapeField(const Parameter& p, const Viewport& v, int maxIter,
                       double escapeRe) {
  if (maxIter < 1) throw Error(ErrorCode::InvalidArgument, "maxIter must be >= 1");
  ImageField f{v, {}, maxIter, escapeRe};
  f.counts.assign(static_cast<std::size_t>(v.pxWidth) * v.pxHeight, kNotEscaped);
#pragma omp parallel for schedule(dynamic, 4)
  for (int y = 0; y < v.pxHeight; ++y)
    escapeRow(p.kappa, v, y, maxIter, escapeRe,
              f.counts.data() + static_cast<std::size_t>(y) * v.pxWidth);
  return f;
}

Orbit forwardOrbit(const Parameter& p, Complex z, std::size_t N) {
  Orbit o;
  o.points.reserve(N);
  for (std::size_t n = 0; n < N; ++n) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      o.overflowed = true;
      break;
    }
    o.points.push_back(z);
    z = std::exp(z) + p.kappa;
  }
  return o;
}

Orbit singularOrbit(const Parameter& p, std::size_t N) {
  return forwardOrbit(p, std::exp(p.kappa) + p.kappa, N);
}

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Rgb RgbImage::get(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

const std::vector<Rgb>& defaultRamp() {
  static const std::vector<Rgb> ramp{
      {12, 7, 60},    {25, 20, 100},  {38, 45, 140},  {44, 78, 170},
      {40, 112, 190}, {35, 145, 200}, {52, 175, 196}, {95, 198, 180},
      {148, 214, 158}, {196, 224, 136}, {232, 220, 112}, {248, 196, 88},
      {246, 158, 66}, {232, 116, 52}, {204, 76, 48},  {160, 44, 52},
  };
  return ramp;
}

namespace {

Rgb readColor(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::InvalidArgument,
                std::string("style: ") + key + " must be [r, g, b]");
  Rgb c;
  std::uint8_t* slots[3] = {&c.r, &c.g, &c.b};
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 255)
      throw Error(ErrorCode::InvalidArgument,
                  std::string("style: ") + key + " components must be 0..255");
    *slots[i] = static_cast<std::uint8_t>(j[i].get<int>());
  }
  return c;
}

// Liang-Barsky clip of the segment a-b to [0, w] x [0, h].
bool clip(double& x0, double& y0, double& x1, double& y1, double w, double h) {
  double lo = 0.0, hi = 1.0;
  const double dx = x1 - x0, dy = y1 - y0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x0, w - x0, y0, h - y0};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0)
      lo = std::max(lo, r);
    else
      hi = std::min(hi, r);
    if (lo > hi) return false;
  }
  x1 = x0 + hi * dx;
  y1 = y0 + hi * dy;
  x0 += lo * dx;
  y0 += lo * dy;
  return true;
}

void drawSegment(RgbImage& img, std::array<double, 2> a, std::array<double, 2> b,
                 Rgb c) {
  for (double v : {a[0], a[1], b[0], b[1]})
    if (!std::isfinite(v) || std::abs(v) > 1e9) return;
  if (!clip(a[0], a[1], b[0], b[1], img.width, img.height)) return;
  const double steps =
      std::ceil(std::max(std::abs(b[0] - a[0]), std::abs(b[1] - a[1])));
  const int n = static_cast<int>(steps);
  for (int i = 0; i <= n; ++i) {
    const double u = n == 0 ? 0.0 : static_cast<double>(i) / n;
    img.set(static_cast<int>(std::floor(a[0] + u * (b[0] - a[0]))),
            static_cast<int>(std::floor(a[1] + u * (b[1] - a[1]))), c);
  }
}

void drawDot(RgbImage& img, std::array<double, 2> p, int radius, Rgb c) {
  if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return;
  if (std::abs(p[0]) > 1e9 || std::abs(p[1]) > 1e9) return;
  const int cx = static_cast<int>(std::floor(p[0]));
  const int cy = static_cast<int>(std::floor(p[1]));
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) img.set(cx + dx, cy + dy, c);
}

void appendChunk(std::string& out, const char* type, const std::string& data) {
  auto be32 = [&](std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((v >> s) & 0xff));
  };
  be32(static_cast<std::uint32_t>(data.size()));
  const std::string body = std::string(type, 4) + data;
  out += body;
  be32(static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size()))));
}

void requireNonEmpty(const RgbImage& image) {
  if (image.width <= 0 || image.height <= 0)
    throw Error(ErrorCode::InvalidArgument, "image has no pixels");
}

}  // namespace

Style parseStyle(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Syntax, std::string("style: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "style must be an object");
  Style s;
  if (j.contains("ramp")) {
    s.ramp.clear();
    for (const auto& c : j["ramp"]) s.ramp.push_back(readColor(c, "ramp"));
    if (s.ramp.empty()) throw Error(ErrorCode::InvalidArgument, "style: empty ramp");
  }
  if (j.contains("rayColor")) s.rayColor = readColor(j["rayColor"], "rayColor");
  if (j.contains("orbitColor")) s.orbitColor = readColor(j["orbitColor"], "orbitColor");
  if (j.contains("interiorColor"))
    s.interiorColor = readColor(j["interiorColor"], "interiorColor");
  if (j.contains("dotRadiusPx")) {
    if (!j["dotRadiusPx"].is_number_integer() || j["dotRadiusPx"].get<int>() < 0)
      throw Error(ErrorCode::InvalidArgument, "style: dotRadiusPx must be >= 0");
    s.dotRadiusPx = j["dotRadiusPx"].get<int>();
  }
  if (j.contains("viewport")) {
    const auto& v = j["viewport"];
    s.viewport = Viewport::make({v.at("center").at(0).get<double>(),
                                 v.at("center").at(1).get<double>()},
                                v.at("width").get<double>(), v.at("height").get<double>(),
                                v.at("pxWidth").get<int>(), v.at("pxHeight").get<int>());
  }
  return s;
}

RgbImage renderComposite(const ImageField& field,
                         const std::vector<RayTrace>& rays,
                         const std::vector<std::vector<Complex>>& orbits,
                         const Style& style) {
  const Viewport& v = field.viewport;
  if (style.viewport && !(*style.viewport == v))
    throw Error(ErrorCode::InvalidArgument, "style viewport differs from the field");
  if (style.ramp.empty()) throw Error(ErrorCode::InvalidArgument, "empty colour ramp");
  RgbImage img(v.pxWidth, v.pxHeight);
  for (int y = 0; y < v.pxHeight; ++y)
    for (int x = 0; x < v.pxWidth; ++x) {
      const int c = field.at(x, y);
      img.set(x, y, c == kNotEscaped ? style.interiorColor
                                     : style.ramp[static_cast<std::size_t>(c) %
                                                  style.ramp.size()]);
    }
  for (const RayTrace& ray : rays)
    for (std::size_t i = 1; i < ray.samples.size(); ++i)
      drawSegment(img, v.toPixel(ray.samples[i - 1].z), v.toPixel(ray.samples[i].z),
                  style.rayColor);
  for (const auto& orbit : orbits)
    for (Complex z : orbit) drawDot(img, v.toPixel(z), style.dotRadiusPx, style.orbitColor);
  return img;
}

std::string encodePpm(const RgbImage& image) {
  requireNonEmpty(image);
  std::string out = "P6\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

std::string encodePng(const RgbImage& image) {
  requireNonEmpty(image);
  std::string raw;
  const std::size_t row = static_cast<std::size_t>(image.width) * 3;
  raw.reserve((row + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(image.pixels.data()) + y * row, row);
  }
  uLongf size = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &size,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw Error(ErrorCode::Io, "zlib compression failed");
  packed.resize(size);

  std::string ihdr;
  for (std::uint32_t v : {static_cast<std::uint32_t>(image.width),
                          static_cast<std::uint32_t>(image.height)})
    for (int s = 24; s >= 0; s -= 8) ihdr.push_back(static_cast<char>((v >> s) & 0xff));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB, no interlace

  std::string out("\x89PNG\r\n\x1a\n", 8);
  appendChunk(out, "IHDR", ihdr);
  appendChunk(out, "IDAT", packed);
  appendChunk(out, "IEND", "");
  return out;
}

void writePpm(const RgbImage& image, const std::string& path) {
  writeFileAtomic(path, encodePpm(image));
}

void writePng(const RgbImage& image, const std::string& path) {
  writeFileAtomic(path, encodePng(image));
}

Figure figure1(const FigureRecipe& recipe) {
  const double theta = recipe.theta == 0.0 ? goldenMean() : recipe.theta;
  Figure fig;
  fig.parameter = knownParameter(Parameter::Label::Siegel, theta);
  const Viewport v =
      Viewport::square(recipe.center, recipe.width, recipe.pxWidth, recipe.pxHeight);
  fig.field = escapeField(fig.parameter, v, recipe.maxIter, recipe.escapeRe);

  const ExternalAddress s = sturmianAddress(theta);
  for (const ExternalAddress& a : {s, shift(s)})
    fig.rays.push_back(traceRay(fig.parameter, a, recipe.rayTMax, recipe.rayTMin,
                                recipe.raySamples, 1e-12));

  fig.singular = singularOrbit(fig.parameter, recipe.orbitPoints);
  const Complex fixed(0.0, kTwoPi * theta);
  fig.disk = forwardOrbit(fig.parameter, fixed + 0.6 * (fig.parameter.kappa - fixed),
                          recipe.diskPoints);
  fig.image = renderComposite(fig.field, fig.rays,
                              {fig.singular.points, fig.disk.points}, recipe.style);
  return fig;
}

}  // namespace expdyn
