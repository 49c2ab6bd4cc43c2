#pragma once

// Escape-time classification for the model f_l on |z| > r, graymap rendering,
// and box-counting dimension estimates.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypdim/corefn.hpp"
#include "hypdim/pressure.hpp"
#include "hypdim/tractgeom.hpp"

namespace hypdim {

enum class OrbitTag { InJulia, Escaped, Undecided };

struct Classification {
  OrbitTag tag = OrbitTag::Escaped;
  int step = 0;
  bool flagged = false;  // escape forced by a domain error in the lift

  bool operator==(const Classification&) const = default;
};

// Iterates zeta -> Log f_l(e^zeta) from zeta_0 = Log z0.
//   |z0| <= r                                  -> Escaped(0)
//   z_n off the principal tract (|Im u| >= pi/2) -> Escaped(n + 1)
//   Re zeta_n <= log r                         -> Escaped(n)
//   Log f_l(z_n) not representable             -> Undecided(n + 1)
//   n_max steps survived                       -> InJulia(n_max)
// Off the tract E_l is bounded by C < r, so such points leave D*_r at the
// next step.
//
// With footprint > 0 the orbit stands for the disc of that radius about z0:
// an escape whose margin is below footprint times the derivative of the
// escape quantity with respect to z0 is reported as Undecided, since part of
// the disc may stay.
Classification classify(Complex z0, const ModelParams& params, const RadiusConfig& cfg, int n_max,
                        double footprint = 0.0);

struct Window {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = -0.5;
  double y_max = 0.5;
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 at y_max
};

// Pixel value for a classification: InJulia 0, Undecided 64, Escaped(n)
// from 255 (n = 0) down to 96.
std::uint8_t shade(const Classification& c);

// Near part of the tract: the square centred on the real axis spanning
// l + x_r to l + x_rep, where f(x_r) = r and log f(x_rep) = kExpThreshold.
Window default_julia_window(const ModelParams& params, const RadiusConfig& cfg);

// Pixel classifications (centre orbit, footprint = half the pixel diagonal),
// row-major with row 0 at y_max.  With supersample each pixel takes the most
// persistent of four sub-pixel orbits (InJulia, then Undecided, then the
// latest escape).
std::vector<Classification> classify_window(const Window& window, int width, int height,
                                            const ModelParams& params, const RadiusConfig& cfg,
                                            int n_max, unsigned workers = 1,
                                            bool supersample = false);

GrayImage render(const Window& window, int width, int height, const ModelParams& params,
                 const RadiusConfig& cfg, int n_max, unsigned workers = 1,
                 bool supersample = false);

// Binary portable graymap (P5).
void write_pgm(const std::string& path, const GrayImage& image);

struct BoxFit {
  double dimension = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
};

// Least squares slope of log N against log(1/size).
BoxFit fit_box_dimension(const std::vector<double>& sizes, const std::vector<double>& counts);

// Boxes of side s pixels (aligned to the origin of the mask) that contain at
// least one set pixel, for each s in box_pixels.
std::vector<double> box_counts(const std::vector<std::uint8_t>& mask, int width, int height,
                               const std::vector<int>& box_pixels);

struct BoxCountReport {
  std::vector<double> scales;  // box sizes in plane units
  std::vector<int> box_pixels;
  std::vector<double> counts_upper;  // InJulia or Undecided
  std::vector<double> counts_lower;  // InJulia only
  DimEstimate fitted_dim;            // spans the available variants
  BoxFit upper;
  std::optional<BoxFit> lower;       // absent when no pixel is InJulia
  double undecided_fraction = 0.0;
  double in_julia_fraction = 0.0;
};

// Box-counting over the pixel classifications of a square window.  Needs at
// least 4 box sizes spanning 2 octaves; throws DomainError when no pixel
// belongs to the upper variant.
BoxCountReport box_dimension(const Window& window, int resolution, const ModelParams& params,
                             const RadiusConfig& cfg, int n_max, const std::vector<int>& box_pixels,
                             unsigned workers = 1, bool supersample = false);

} // namespace hypdim
