#pragma once

// The entire function E and its derivative from Cauchy-integral representations
// over boundaries of G_{x0,kappa}, oriented clockwise:
//
//   E(z) = 1/(2 pi i) \int_{dG_{D+1,5/6}} f(t)/(t - z) dt           z outside G_D
//   E(z) = f(z) + 1/(2 pi i) \int_{dG_{D-1,7/6}} f(t)/(t - z) dt    z inside G_D
//
// and E_l(z) = E(z - l).  The branches are truncated at an abscissa where the
// doubly exponential majorant of |f| makes the remainder negligible; the
// remainder bound is added to the error estimate.

#include <functional>
#include <optional>
#include <stdexcept>

#include "hypdim/corefn.hpp"
#include "hypdim/numerics.hpp"
#include "hypdim/tractgeom.hpp"

namespace hypdim {

// Truncated clockwise boundary of a region.
struct ContourSpec {
  TractRegion region;
  double truncation_x;

  ContourSpec(TractRegion region, double truncation_x);
};

struct QuadResult {
  Complex value;
  double err_est = 0.0;
  int panels = 0;
};

class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, QuadResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadResult& best() const { return best_; }

private:
  QuadResult best_;
};

class ConditioningError : public DomainError {
public:
  using DomainError::DomainError;
};

inline constexpr double kMinContourDistance = 1e-3;
inline constexpr int kMaxQuadDepth = 30;

// A value and a derivative carried through one quadrature pass.
struct ValueDeriv {
  Complex value;
  Complex deriv;
};
inline ValueDeriv operator+(ValueDeriv a, ValueDeriv b) { return {a.value + b.value, a.deriv + b.deriv}; }
inline ValueDeriv operator-(ValueDeriv a, ValueDeriv b) { return {a.value - b.value, a.deriv - b.deriv}; }
inline ValueDeriv operator*(ValueDeriv a, double s) { return {a.value * s, a.deriv * s}; }
inline double magnitude(const ValueDeriv& a) { return std::max(std::abs(a.value), std::abs(a.deriv)); }

// Breakpoints of the contour parameter: the two corners and a geometric
// subdivision of each branch.
std::vector<double> contour_breakpoints(const ContourSpec& contour);

// 1/(2 pi i) times the clockwise integral of integrand(t) dt over the contour.
template <class V, class K>
num::AdaptiveResult<V> integrate_contour(K&& integrand, const ContourSpec& contour, double tol) {
  const TractRegion& region = contour.region;
  const Complex inv_two_pi_i = 1.0 / Complex(0.0, kTwoPi);
  auto g = [&](double s) -> V {
    const Complex t = boundary_point(s, region);
    const Complex dt = boundary_tangent(s, region) * inv_two_pi_i;
    return integrand(t, dt);
  };
  const auto bp = contour_breakpoints(contour);
  return num::integrate_adaptive<V>(g, bp, tol, kMaxQuadDepth);
}

// Adaptive Gauss-Kronrod quadrature of 1/(2 pi i) \int kernel(t) dt over the
// truncated clockwise contour.  Throws NonConvergenceError (carrying the best
// value) when the error target cannot be met.
QuadResult quad_cauchy(const std::function<Complex(Complex)>& kernel, const ContourSpec& contour,
                       double tol);

// f(t) = exp(exp((Log t)^{1+p})) for contour points, where it is representable.
Complex model_f(Complex t, double p);

// Contours used for points outside / inside G_D.
ContourSpec outer_contour(const CalibratedConstants& constants, double truncation_x);
ContourSpec inner_contour(const CalibratedConstants& constants, double truncation_x);

// Where each representation is usable: outside the closed region bounded by
// the outer contour, resp. inside the region bounded by the inner contour,
// with distance at least kMinContourDistance.
bool outer_formula_valid(Complex y, const CalibratedConstants& constants);
bool inner_formula_valid(Complex y, const CalibratedConstants& constants);

// E_l(z) by the outer formula.  Requires z - l outside G_{D+1,5/6}.
QuadResult eval_E(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                  double tol);

struct TractEval {
  LogComplex log_f;       // f_l(z) in log form
  QuadResult correction;  // E_l(z) - f_l(z)
  // f_l(z) + correction when |f_l(z)| is representable.
  std::optional<Complex> value() const;
};

// E_l(z) by the inner formula.  Requires z - l inside G_{D-1,7/6}.
TractEval eval_E_in_tract(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                          double tol);

struct DerivEval {
  bool in_tract = false;
  std::optional<Complex> model_deriv;  // f_l'(z) (in tract, when representable)
  QuadResult correction;               // the integral term
  std::optional<Complex> value() const;
};

// E_l'(z): outer formula for z - l outside G_D, f_l' plus inner integral inside.
DerivEval eval_E_deriv(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                       double tol);

// E_l and E_l' together, choosing the representation by membership in G_D + l.
struct EntirePoint {
  Complex value;
  Complex deriv;
  // E - f and E' - f' (zero model part off the tract).
  Complex value_correction;
  Complex deriv_correction;
  bool in_tract = false;
  double err_est = 0.0;
};
// Throws DomainError when f_l(z) is not representable inside the tract.
EntirePoint eval_entire(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                        double tol);

struct RefinedPreimage {
  Complex z;
  EntirePoint at;
  int iterations = 0;
  double residual = 0.0;  // |E_l(z) - w| / |w|
  bool converged = false;
};

// Newton iteration for E_l(z) = w seeded at a model preimage.
RefinedPreimage refine_preimage(Complex w, Complex seed, const ModelParams& params,
                                const CalibratedConstants& constants, double tol,
                                int max_iterations = 30);

} // namespace hypdim
