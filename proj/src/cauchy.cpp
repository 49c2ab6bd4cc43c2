#include "hypdim/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hypdim {

ContourSpec::ContourSpec(TractRegion region_, double truncation_x_)
    : region(region_), truncation_x(truncation_x_) {
  if (!(truncation_x > region.x0())) {
    throw DomainError("ContourSpec: truncation abscissa must exceed x0");
  }
}

std::vector<double> contour_breakpoints(const ContourSpec& contour) {
  const TractRegion& region = contour.region;
  const double w0 = region.half_width(region.x0());
  const double span = contour.truncation_x - region.x0();
  std::vector<double> upper;
  for (double d = 0.25; d < span; d *= 2.0) {
    upper.push_back(w0 + d);
  }
  upper.push_back(w0 + span);
  std::vector<double> bp;
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) {
    bp.push_back(-*it);
  }
  for (int j = -2; j <= 2; ++j) {
    bp.push_back(0.5 * w0 * j);
  }
  bp.insert(bp.end(), upper.begin(), upper.end());
  return bp;
}

QuadResult quad_cauchy(const std::function<Complex(Complex)>& kernel, const ContourSpec& contour,
                       double tol) {
  if (!(tol > 0.0)) {
    throw DomainError("quad_cauchy: tol must be positive");
  }
  auto res = integrate_contour<Complex>([&](Complex t, Complex dt) { return kernel(t) * dt; },
                                        contour, tol);
  QuadResult out{res.value, res.err, res.panels};
  if (!res.converged) {
    throw NonConvergenceError("quad_cauchy: error target not met (err " +
                                  std::to_string(res.err) + ")",
                              out);
  }
  return out;
}

Complex model_f(Complex t, double p) {
  const Complex u = principal_pow(principal_log(t), 1.0 + p);
  if (u.real() > kExpThreshold) {
    throw DomainError("model_f: tau not representable");
  }
  const Complex tau = std::exp(u);
  if (tau.real() > kExpThreshold) {
    throw DomainError("model_f: f not representable");
  }
  return std::exp(tau);
}

ContourSpec outer_contour(const CalibratedConstants& constants, double truncation_x) {
  return {TractRegion(constants.D + 1.0, 5.0 / 6.0, constants.p), truncation_x};
}

ContourSpec inner_contour(const CalibratedConstants& constants, double truncation_x) {
  return {TractRegion(constants.D - 1.0, 7.0 / 6.0, constants.p), truncation_x};
}

bool outer_formula_valid(Complex y, const CalibratedConstants& constants) {
  const TractRegion region(constants.D + 1.0, 5.0 / 6.0, constants.p);
  return !in_G(y, region) && distance_to_boundary(y, region) >= kMinContourDistance;
}

bool inner_formula_valid(Complex y, const CalibratedConstants& constants) {
  const TractRegion region(constants.D - 1.0, 7.0 / 6.0, constants.p);
  return in_G(y, region) && distance_to_boundary(y, region) >= kMinContourDistance;
}

namespace {

struct Truncation {
  double x;
  double tail;  // bound on the discarded part, for kernels 1/(t-y)^m, m >= 1
};

// Beyond x the branches satisfy |f| <= B(x) = exp(-g(x)), g convex increasing,
// so the discarded integral is at most (1/pi) (1 + max|w'|) B(X) / g'(X) once
// the kernel denominator is at least 1, i.e. X >= Re y + 1.
Truncation choose_truncation(Complex y, const ContourSpec& base, double p, double tol,
                             int kernel_order = 1) {
  const double kappa = base.region.kappa();
  double x = std::max(base.region.x0() + 1.0, 4.0);
  // the dropped tails are bounded with |t - y| >= min(1, dist(y, contour))
  const double near =
      std::pow(std::min(1.0, distance_to_boundary(y, base.region)), kernel_order);
  for (int it = 0; it < 2000; ++it) {
    const double L = std::log(x);
    const double g = 0.5 * std::exp(0.5 * std::pow(L, 1.0 + p));
    const double gprime = g * 0.5 * (1.0 + p) * std::pow(L, p) / x;
    const double slope = 1.0 + kappa * kPi / ((1.0 + p) * std::pow(L, p));
    const double tail = slope * std::exp(-g) / (gprime * kPi * near);
    if (tail < 0.1 * tol) {
      return {x, tail};
    }
    x *= 1.05;
  }
  throw DomainError("choose_truncation: no admissible truncation abscissa");
}

template <class V, class K>
QuadResult run(K&& integrand, const ContourSpec& contour, double tol, double tail, const char* who) {
  auto res = integrate_contour<V>(integrand, contour, 0.9 * tol);
  QuadResult out;
  if constexpr (std::is_same_v<V, Complex>) {
    out.value = res.value;
  } else {
    out.value = res.value.value;
  }
  out.err_est = res.err + tail;
  out.panels = res.panels;
  if (!res.converged) {
    throw NonConvergenceError(std::string(who) + ": quadrature did not converge", out);
  }
  return out;
}

void require_outer(Complex y, const CalibratedConstants& constants, const char* who) {
  const TractRegion region(constants.D + 1.0, 5.0 / 6.0, constants.p);
  if (in_G(y, region)) {
    throw DomainError(std::string(who) + ": point inside the outer contour region");
  }
  if (distance_to_boundary(y, region) < kMinContourDistance) {
    throw ConditioningError(std::string(who) + ": point too close to the contour");
  }
}

void require_inner(Complex y, const CalibratedConstants& constants, const char* who) {
  const TractRegion region(constants.D - 1.0, 7.0 / 6.0, constants.p);
  if (!in_G(y, region)) {
    throw DomainError(std::string(who) + ": point outside the inner contour region");
  }
  if (distance_to_boundary(y, region) < kMinContourDistance) {
    throw ConditioningError(std::string(who) + ": point too close to the contour");
  }
}

} // namespace

QuadResult eval_E(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                  double tol) {
  const Complex y = z - params.l();
  require_outer(y, constants, "eval_E");
  const double p = constants.p;
  const auto base = outer_contour(constants, constants.D + 2.0);
  const Truncation trunc = choose_truncation(y, base, p, tol);
  const auto contour = outer_contour(constants, trunc.x);
  return run<Complex>(
      [&](Complex t, Complex dt) { return model_f(t, p) / (t - y) * dt; }, contour, tol,
      trunc.tail, "eval_E");
}

std::optional<Complex> TractEval::value() const {
  const auto f = log_f.to_complex();
  if (!f) {
    return std::nullopt;
  }
  return *f + correction.value;
}

TractEval eval_E_in_tract(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                          double tol) {
  const Complex y = z - params.l();
  require_inner(y, constants, "eval_E_in_tract");
  const auto lf = log_f(z, params);
  if (!lf) {
    throw DomainError("eval_E_in_tract: log f not representable");
  }
  const double p = constants.p;
  const auto base = inner_contour(constants, constants.D + 2.0);
  const Truncation trunc = choose_truncation(y, base, p, tol);
  const auto contour = inner_contour(constants, trunc.x);
  TractEval out;
  out.log_f = *lf;
  out.correction = run<Complex>(
      [&](Complex t, Complex dt) { return model_f(t, p) / (t - y) * dt; }, contour, tol,
      trunc.tail, "eval_E_in_tract");
  return out;
}

std::optional<Complex> DerivEval::value() const {
  if (!in_tract) {
    return correction.value;
  }
  if (!model_deriv) {
    return std::nullopt;
  }
  return *model_deriv + correction.value;
}

namespace {

std::optional<Complex> model_derivative(Complex z, const ModelParams& params) {
  const auto lf = log_f(z, params);
  if (!lf) {
    return std::nullopt;
  }
  const Complex dtau = tau_deriv(z, params);
  const double log_mod = lf->log_mod + std::log(std::abs(dtau));
  if (log_mod > kExpThreshold) {
    return std::nullopt;
  }
  return std::polar(std::exp(lf->log_mod), lf->arg) * dtau;
}

} // namespace

DerivEval eval_E_deriv(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                       double tol) {
  const Complex y = z - params.l();
  const double p = constants.p;
  DerivEval out;
  out.in_tract = in_G(y, TractRegion(constants.D, 1.0, p));
  auto kernel = [&](Complex t, Complex dt) {
    const Complex d = t - y;
    return model_f(t, p) / (d * d) * dt;
  };
  if (out.in_tract) {
    require_inner(y, constants, "eval_E_deriv");
    const Truncation trunc = choose_truncation(y, inner_contour(constants, constants.D + 2.0), p, tol, 2);
    out.model_deriv = model_derivative(z, params);
    out.correction = run<Complex>(kernel, inner_contour(constants, trunc.x), tol, trunc.tail,
                                  "eval_E_deriv");
  } else {
    require_outer(y, constants, "eval_E_deriv");
    const Truncation trunc = choose_truncation(y, outer_contour(constants, constants.D + 2.0), p, tol, 2);
    out.correction = run<Complex>(kernel, outer_contour(constants, trunc.x), tol, trunc.tail,
                                  "eval_E_deriv");
  }
  return out;
}

EntirePoint eval_entire(Complex z, const ModelParams& params, const CalibratedConstants& constants,
                        double tol) {
  const Complex y = z - params.l();
  const double p = constants.p;
  EntirePoint out;
  out.in_tract = in_G(y, TractRegion(constants.D, 1.0, p));
  auto kernel = [&](Complex t, Complex dt) {
    const Complex d = t - y;
    const Complex fd = model_f(t, p) / d * dt;
    return ValueDeriv{fd, fd / d};
  };
  const ContourSpec base = out.in_tract ? inner_contour(constants, constants.D + 2.0)
                                        : outer_contour(constants, constants.D + 2.0);
  if (out.in_tract) {
    require_inner(y, constants, "eval_entire");
  } else {
    require_outer(y, constants, "eval_entire");
  }
  const Truncation trunc = choose_truncation(y, base, p, tol, 2);
  const ContourSpec contour(base.region, trunc.x);
  auto res = integrate_contour<ValueDeriv>(kernel, contour, 0.9 * tol);
  out.err_est = res.err + trunc.tail;
  if (!res.converged) {
    throw NonConvergenceError("eval_entire: quadrature did not converge",
                              QuadResult{res.value.value, out.err_est, res.panels});
  }
  out.value_correction = res.value.value;
  out.deriv_correction = res.value.deriv;
  out.value = res.value.value;
  out.deriv = res.value.deriv;
  if (out.in_tract) {
    const auto lf = log_f(z, params);
    if (!lf || lf->log_mod > kExpThreshold) {
      throw DomainError("eval_entire: f_l(z) not representable");
    }
    const auto df = model_derivative(z, params);
    if (!df) {
      throw DomainError("eval_entire: f_l'(z) not representable");
    }
    out.value += std::polar(std::exp(lf->log_mod), lf->arg);
    out.deriv += *df;
  }
  return out;
}

RefinedPreimage refine_preimage(Complex w, Complex seed, const ModelParams& params,
                                const CalibratedConstants& constants, double tol,
                                int max_iterations) {
  RefinedPreimage out;
  out.z = seed;
  const double scale = std::abs(w);
  for (int it = 0; it <= max_iterations; ++it) {
    out.at = eval_entire(out.z, params, constants, tol);
    const Complex F = out.at.value - w;
    out.residual = std::abs(F) / scale;
    out.iterations = it;
    if (out.residual <= 1e-12 || (out.residual <= 1e-10 && it > 0)) {
      out.converged = true;
      return out;
    }
    if (it == max_iterations) {
      break;
    }
    out.z -= F / out.at.deriv;
  }
  out.converged = out.residual <= 1e-8;
  return out;
}

} // namespace hypdim
