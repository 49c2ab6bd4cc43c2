#pragma once

// Geometry of the regions
//
//   G_{x0,kappa} = { x + iy : x > x0, |y| < kappa * pi * x / ((1+p) (log x)^p) },
//
// membership in the tract Omega_{f_l,r} = f_l^{-1}({|w| > r}), and calibration
// of the constants C, D, r0 (plus the distortion constants K and Kcal) that the
// approximation and comparison statements only assert to exist.

#include <cstdint>
#include <string>
#include <vector>

#include "hypdim/corefn.hpp"

namespace hypdim {

class TractRegion {
public:
  TractRegion(double x0, double kappa, double p);

  double x0() const { return x0_; }
  double kappa() const { return kappa_; }
  double p() const { return p_; }

  // kappa * pi * x / ((1+p) (log x)^p) and its x-derivative.
  double half_width(double x) const;
  double half_width_deriv(double x) const;

  // Arc parameter bounds of boundary_point: the contour from the far end of
  // the lower branch (at abscissa x_end) to the far end of the upper branch.
  double arc_extent(double x_end) const { return half_width(x0_) + (x_end - x0_); }

private:
  double x0_;
  double kappa_;
  double p_;
};

bool in_G(Complex z, const TractRegion& region);

// Continuous parameterisation of the boundary of G_{x0,kappa}:
//   |s| <= w(x0):  x0 + i s                       (the vertical segment)
//   s  >  w(x0):  x + i w(x),  x = x0 + s - w(x0)  (upper branch)
//   s  < -w(x0):  conjugate of boundary_point(-s)  (lower branch)
// Increasing s runs clockwise around the region.
Complex boundary_point(double s, const TractRegion& region);
// d boundary_point / ds.
Complex boundary_tangent(double s, const TractRegion& region);

// Euclidean distance from z to the boundary of G_{x0,kappa} (numerical).
double distance_to_boundary(Complex z, const TractRegion& region);

struct CalibratedConstants {
  double p = 1.0;
  double C = 0.0;     // bound on |E - f|, |E' - f'| in G_D and on |E| off G_D
  double D = 0.0;     // region cutoff
  double r0 = 0.0;    // base radius, r0 > 4 C
  double K = 1.0;     // distortion of phi' over vertical 2 pi windows
  double Kcal = 1.0;  // entire/model transfer-operator comparability constant
  // Sampling record, so that runs are reproducible.
  std::string grid_description;
  std::vector<std::pair<std::string, double>> diagnostics;

  void validate() const;
};

// Working radius r >= r0/2 together with the cutoff D it was derived from.
class RadiusConfig {
public:
  RadiusConfig(double r, const CalibratedConstants& constants);

  double r() const { return r_; }
  double log_r() const;
  double D() const { return D_; }
  // l_r = max{0, r - D}.
  double l_min() const;

private:
  double r_;
  double D_;
};

// z lies in the tract Omega_{f_l,r}: the inner exponent u = (Log(z-l))^{1+p}
// satisfies |Im u| < pi/2 (the principal lobe, the only component inside G)
// and Re e^u = log|f_l(z)| > log r.  Overflow of e^u counts as inside.
bool in_omega(Complex z, const ModelParams& params, const RadiusConfig& cfg);

double min_l_for_disjoint(const RadiusConfig& cfg);

// Smallest point of the scan 5 * 2^{k/2} at which exp(-e^{(log x)^{1+p}/2}/2)
// drops below `threshold`.  Beyond this abscissa the integrand of the Cauchy
// representations is negligible.
double decay_cutoff(double p, double threshold = 1e-12);

// log of the a-priori majorant exp(-e^{(log x)^{1+p}/2}/2) of |f| on the
// strip between the 5/6 and 7/6 boundary curves.
double log_decay_majorant(double x, double p);

struct CalibrationBudget {
  int grid = 200;            // grid x grid points per sampled region
  int koebe_samples = 1000;  // random (xi, y) pairs for K
  int kcal_points = 24;      // base points w for Kcal
  int kcal_branches = 6;     // preimage indices |k| <= kcal_branches per w
  double quad_tol = 1e-10;
  unsigned workers = 1;
  std::uint64_t seed = 20240607;
};

CalibratedConstants calibrate(double p, const CalibrationBudget& budget);

} // namespace hypdim
