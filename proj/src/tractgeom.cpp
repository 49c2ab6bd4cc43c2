#include "hypdim/tractgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypdim {

TractRegion::TractRegion(double x0, double kappa, double p) : x0_(x0), kappa_(kappa), p_(p) {
  if (!(x0 > 1.0) || !std::isfinite(x0)) {
    throw DomainError("TractRegion: x0 must exceed 1");
  }
  if (!(kappa > 0.0 && kappa <= 2.0)) {
    throw DomainError("TractRegion: kappa must lie in (0, 2]");
  }
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("TractRegion: p must be positive");
  }
}

double TractRegion::half_width(double x) const {
  return kappa_ * kPi * x / ((1.0 + p_) * std::pow(std::log(x), p_));
}

double TractRegion::half_width_deriv(double x) const {
  const double L = std::log(x);
  return kappa_ * kPi / (1.0 + p_) * (std::pow(L, -p_) - p_ * std::pow(L, -p_ - 1.0));
}

bool in_G(Complex z, const TractRegion& region) {
  const double x = z.real();
  if (!(x > region.x0())) {
    return false;
  }
  return std::abs(z.imag()) < region.half_width(x);
}

Complex boundary_point(double s, const TractRegion& region) {
  const double w0 = region.half_width(region.x0());
  if (std::abs(s) <= w0) {
    return {region.x0(), s};
  }
  if (s > w0) {
    const double x = region.x0() + (s - w0);
    return {x, region.half_width(x)};
  }
  return std::conj(boundary_point(-s, region));
}

Complex boundary_tangent(double s, const TractRegion& region) {
  const double w0 = region.half_width(region.x0());
  if (std::abs(s) <= w0) {
    return {0.0, 1.0};
  }
  const double x = region.x0() + (std::abs(s) - w0);
  const double slope = region.half_width_deriv(x);
  if (s > 0.0) {
    return {1.0, slope};
  }
  return {-1.0, slope};
}

double distance_to_boundary(Complex z, const TractRegion& region) {
  const double a = z.real();
  const double b = std::abs(z.imag());
  const double x0 = region.x0();
  const double w0 = region.half_width(x0);
  double best = std::hypot(a - x0, std::max(0.0, b - w0));

  // Upper branch only: by symmetry the lower branch is never closer to |Im z|.
  auto dist2 = [&](double x) {
    const double dy = region.half_width(x) - b;
    return (x - a) * (x - a) + dy * dy;
  };
  const double x_hi = std::max(x0, a) + best + 1.0;
  constexpr int kSamples = 256;
  int best_i = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  const double h = (x_hi - x0) / kSamples;
  for (int i = 0; i <= kSamples; ++i) {
    const double d2 = dist2(x0 + h * i);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_i = i;
    }
  }
  // Golden-section refinement on the bracketing cells.
  double lo = x0 + h * std::max(0, best_i - 1);
  double hi = x0 + h * std::min(kSamples, best_i + 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  for (int it = 0; it < 80; ++it) {
    if (dist2(c) < dist2(d)) {
      hi = d;
    } else {
      lo = c;
    }
    c = hi - g * (hi - lo);
    d = lo + g * (hi - lo);
  }
  best_d2 = std::min({best_d2, dist2(0.5 * (lo + hi))});
  return std::min(best, std::sqrt(best_d2));
}

void CalibratedConstants::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!(positive(p) && positive(C) && positive(D) && positive(r0) && positive(K) &&
        positive(Kcal))) {
    throw DomainError("CalibratedConstants: all constants must be positive and finite");
  }
  if (!(D > 3.0)) {
    throw DomainError("CalibratedConstants: D must exceed 3");
  }
  if (!(r0 > 4.0 * C)) {
    throw DomainError("CalibratedConstants: r0 must exceed 4 C");
  }
  if (K < 1.0 || Kcal < 1.0) {
    throw DomainError("CalibratedConstants: K and Kcal must be at least 1");
  }
}

RadiusConfig::RadiusConfig(double r, const CalibratedConstants& constants)
    : r_(r), D_(constants.D) {
  constants.validate();
  if (!(std::isfinite(r) && r >= 0.5 * constants.r0 * (1.0 - 1e-12))) {
    throw DomainError("RadiusConfig: r must be at least r0/2");
  }
}

double RadiusConfig::log_r() const { return std::log(r_); }

double RadiusConfig::l_min() const { return std::max(0.0, r_ - D_); }

bool in_omega(Complex z, const ModelParams& params, const RadiusConfig& cfg) {
  const Complex y = z - params.l();
  if ((y.imag() == 0.0 && y.real() <= 0.0) || std::abs(y) <= 1.0) {
    return false;
  }
  const Complex u = tau_inner(z, params);
  if (!(std::abs(u.imag()) < 0.5 * kPi)) {
    return false;
  }
  if (u.real() > kExpThreshold) {
    return true;
  }
  return std::exp(u.real()) * std::cos(u.imag()) > cfg.log_r();
}

double min_l_for_disjoint(const RadiusConfig& cfg) { return cfg.l_min(); }

double log_decay_majorant(double x, double p) {
  return -0.5 * std::exp(0.5 * std::pow(std::log(x), 1.0 + p));
}

double decay_cutoff(double p, double threshold) {
  if (!(p > 0.0) || !(threshold > 0.0 && threshold < 1.0)) {
    throw DomainError("decay_cutoff: need p > 0 and threshold in (0, 1)");
  }
  const double target = std::log(threshold);
  for (int k = 0; k < 400; ++k) {
    const double x = 5.0 * std::exp2(0.5 * k);
    if (log_decay_majorant(x, p) < target) {
      return x;
    }
  }
  throw DomainError("decay_cutoff: scan exhausted");
}

} // namespace hypdim
