#include "hypdim/corefn.hpp"

#include <cmath>

namespace hypdim {

ModelParams::ModelParams(double p, double l) : p_(p), l_(l) {
  if (!(std::isfinite(p) && p > 0.0)) {
    throw DomainError("ModelParams: p must be positive and finite");
  }
  if (!(std::isfinite(l) && l >= 0.0)) {
    throw DomainError("ModelParams: l must be nonnegative and finite");
  }
}

LogComplex LogComplex::from_log(Complex log_value) {
  return {log_value.real(), wrap_angle(log_value.imag())};
}

std::optional<Complex> LogComplex::to_complex() const {
  if (log_mod > kExpThreshold) {
    return std::nullopt;
  }
  return std::polar(std::exp(log_mod), arg);
}

double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) {
    r += kTwoPi;
  }
  return r;
}

Complex principal_log(Complex z) {
  if (z == Complex(0.0, 0.0)) {
    throw DomainError("principal_log: zero argument");
  }
  Complex w = std::log(z);
  if (w.imag() <= -kPi) {
    w.imag(kPi);
  }
  return w;
}

Complex principal_pow(Complex w, double a) {
  if (w == Complex(0.0, 0.0)) {
    if (a > 0.0) {
      return {0.0, 0.0};
    }
    throw DomainError("principal_pow: zero base with nonpositive exponent");
  }
  return std::exp(a * principal_log(w));
}

namespace {

void require_half_plane(Complex xi, const char* who) {
  if (!(xi.real() > 1.0) || !std::isfinite(xi.imag())) {
    throw DomainError(std::string(who) + ": requires Re xi > 1");
  }
}

// Log(z - l) for the closed-form routes, with the branch-cut checks.
Complex shifted_log_checked(Complex z, double l, const char* who) {
  const Complex y = z - l;
  if (y.imag() == 0.0 && y.real() <= 0.0) {
    throw DomainError(std::string(who) + ": z - l on the branch cut");
  }
  if (std::abs(y) <= 1.0) {
    throw DomainError(std::string(who) + ": requires |z - l| > 1");
  }
  return principal_log(y);
}

} // namespace

Complex phi(Complex xi, const ModelParams& params) {
  require_half_plane(xi, "phi");
  const Complex s = principal_pow(principal_log(xi), 1.0 / (1.0 + params.p()));
  return std::exp(s) + params.l();
}

Complex phi_deriv(Complex xi, const ModelParams& params) {
  require_half_plane(xi, "phi_deriv");
  const double q = 1.0 / (1.0 + params.p());
  const Complex L = principal_log(xi);
  const Complex s = principal_pow(L, q);
  return std::exp(s) * q * principal_pow(L, -params.p() * q) / xi;
}

Complex tau_inner(Complex z, const ModelParams& params) {
  const Complex L = shifted_log_checked(z, params.l(), "tau_inner");
  return principal_pow(L, 1.0 + params.p());
}

Complex tau_deriv(Complex z, const ModelParams& params) {
  const Complex L = shifted_log_checked(z, params.l(), "tau_deriv");
  const Complex u = principal_pow(L, 1.0 + params.p());
  if (u.real() > kExpThreshold) {
    throw DomainError("tau_deriv: tau not representable");
  }
  return std::exp(u) * (1.0 + params.p()) * principal_pow(L, params.p()) / (z - params.l());
}

std::optional<double> log_abs_f(Complex z, const ModelParams& params) {
  const Complex u = tau_inner(z, params);
  if (u.real() > kExpThreshold) {
    return std::nullopt;
  }
  return std::exp(u.real()) * std::cos(u.imag());
}

std::optional<LogComplex> log_f(Complex z, const ModelParams& params) {
  const Complex u = tau_inner(z, params);
  if (u.real() > kExpThreshold) {
    return std::nullopt;
  }
  return LogComplex::from_log(std::exp(u));
}

Complex log_phi_l_deriv(Complex xi, const ModelParams& params) {
  require_half_plane(xi, "log_phi_l_deriv");
  const double q = 1.0 / (1.0 + params.p());
  const Complex L = principal_log(xi);
  const Complex s = principal_pow(L, q);
  // phi / (phi + l) written so that it never forms a large phi.
  const Complex ratio = 1.0 / (1.0 + params.l() * std::exp(-s));
  return ratio * q * principal_pow(L, -params.p() * q) / xi;
}

Complex log1m_series(Complex x) {
  // |x| < 1/2 needs at most ~50 terms for full double precision.
  Complex sum(0.0, 0.0);
  Complex power = x;
  for (int n = 1; n <= 64; ++n) {
    const Complex term = power / static_cast<double>(n);
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) {
      break;
    }
    power *= x;
  }
  return -sum;
}

Complex log_shifted(Complex zeta, double l) {
  if (l == 0.0) {
    return {zeta.real(), wrap_angle(zeta.imag())};
  }
  const Complex x = l * std::exp(-zeta);
  if (std::abs(x) < 0.5) {
    const Complex y = zeta + log1m_series(x);
    return {y.real(), wrap_angle(y.imag())};
  }
  const Complex d = std::exp(zeta) - l;
  if (d.imag() == 0.0 && d.real() <= 0.0) {
    throw DomainError("log_lift_step: 1 - l e^{-zeta} on the branch cut");
  }
  return principal_log(d);
}

LiftStep log_lift_step(Complex zeta, const ModelParams& params) {
  const Complex y = log_shifted(zeta, params.l());
  const Complex u = principal_pow(y, 1.0 + params.p());
  if (u.real() > kExpThreshold) {
    return LiftOverflow{u};
  }
  const Complex tau = std::exp(u);
  return LiftValue{{tau.real(), wrap_angle(tau.imag())}, u};
}

} // namespace hypdim
