#ifndef EXPDYN_RENDER_HPP
#define EXPDYN_RENDER_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expdyn/ray_engine.hpp"

namespace expdyn {

/// Rectangular window of the plane; pixel (0, 0) is the top left corner.
struct Viewport {
  Complex center;
  double width = 0.0;
  double height = 0.0;
  int pxWidth = 0;
  int pxHeight = 0;

  /// Validates extents and that width/height matches pxWidth/pxHeight.
  static Viewport make(Complex center, double width, double height,
                       int pxWidth, int pxHeight);
  /// Square-pixel viewport of the given plane width.
  static Viewport square(Complex center, double width, int pxWidth,
                         int pxHeight);

  Complex pixelCenter(int x, int y) const;
  /// Continuous pixel coordinates of z (pixel centers at integer + 0.5).
  std::array<double, 2> toPixel(Complex z) const;
  bool operator==(const Viewport&) const = default;
};

inline constexpr int kNotEscaped = -1;

struct ImageField {
  Viewport viewport;
  std::vector<int> counts;  // row-major, kNotEscaped or 0..maxIter
  int maxIter = 512;
  double escapeRe = 50.0;

  int at(int x, int y) const {
    return counts[static_cast<std::size_t>(y) * viewport.pxWidth + x];
  }
};

/// Iterations of z -> exp(z) + kappa until Re z > escapeRe; 0 when z
/// already satisfies it, kNotEscaped after maxIter iterations.
int escapeCount(Complex kappa, Complex z, int maxIter, double escapeRe);

ImageField escapeField(const Parameter& p, const Viewport& v,
                       int maxIter = 512, double escapeRe = 50.0);

struct Orbit {
  std::vector<Complex> points;
  bool overflowed = false;  // stopped before N points
};

/// E(kappa), ..., E^N(kappa).
Orbit singularOrbit(const Parameter& p, std::size_t N);
/// z, E(z), ..., E^{N-1}(z).
Orbit forwardOrbit(const Parameter& p, Complex z, std::size_t N);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {});
  Rgb get(int x, int y) const;
  void set(int x, int y, Rgb c);
};

/// The escape-time palette shipped with the library.
const std::vector<Rgb>& defaultRamp();

struct Style {
  std::vector<Rgb> ramp = defaultRamp();
  Rgb rayColor{255, 255, 255};
  Rgb orbitColor{255, 64, 64};
  Rgb interiorColor{0, 0, 0};
  int dotRadiusPx = 1;
  std::optional<Viewport> viewport;  // must match the field when set
};

/// Parses the style JSON {ramp, rayColor, orbitColor, dotRadiusPx,
/// interiorColor?, viewport?}; missing keys keep their defaults.
Style parseStyle(const std::string& json);

RgbImage renderComposite(const ImageField& field,
                         const std::vector<RayTrace>& rays,
                         const std::vector<std::vector<Complex>>& orbits,
                         const Style& style = {});

std::string encodePpm(const RgbImage& image);
std::string encodePng(const RgbImage& image);
void writePpm(const RgbImage& image, const std::string& path);
void writePng(const RgbImage& image, const std::string& path);

struct FigureRecipe {
  double theta = 0.0;  // 0 selects the golden mean
  Complex center{0.4, 3.9};
  double width = 9.0;
  int pxWidth = 800;
  int pxHeight = 800;
  int maxIter = 512;
  double escapeRe = 50.0;
  std::size_t orbitPoints = 10000;
  std::size_t diskPoints = 2000;
  std::size_t raySamples = 400;
  double rayTMax = 12.0;
  double rayTMin = 0.02;
  Style style;
};

struct Figure {
  Parameter parameter;
  ImageField field;
  std::vector<RayTrace> rays;
  Orbit singular;
  Orbit disk;
  RgbImage image;
};

/// Siegel parameter with the escape-time field, the rays at the Sturmian
/// address of theta and its shift, the singular orbit and one orbit inside
/// the Siegel disk.
Figure figure1(const FigureRecipe& recipe = {});

}  // namespace expdyn

#endif  // EXPDYN_RENDER_HPP
