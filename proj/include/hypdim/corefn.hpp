#pragma once

// Overflow-safe evaluation of the model maps
//
//   f_l(z)   = exp(exp((Log(z - l))^{1+p}))
//   tau_l(z) = exp((Log(z - l))^{1+p})          (so f_l = e^{tau_l} on the tract)
//   phi_l(xi) = exp((Log xi)^{1/(1+p)}) + l     (inverse of tau_l on Re xi > log r)
//
// Every power w^a is exp(a * Log w) with the principal logarithm, which makes
// (Log z)^{1+p} real for real z > 1.  Values of f itself overflow doubles almost
// immediately, so f is only ever handled through log|f| or through its logarithm.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace hypdim {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Outer exponents above this are reported as overflow instead of saturating.
inline constexpr double kExpThreshold = 700.0;

class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Growth exponent p > 0 and horizontal translation l >= 0.
class ModelParams {
public:
  ModelParams(double p, double l);

  double p() const { return p_; }
  double l() const { return l_; }

  ModelParams with_l(double l) const { return {p_, l}; }

private:
  double p_;
  double l_;
};

// A complex number stored as (log|w|, Arg w), Arg in (-pi, pi].
struct LogComplex {
  double log_mod = 0.0;
  double arg = 0.0;

  static LogComplex from_log(Complex log_value);
  // Returns nullopt when the modulus is not representable.
  std::optional<Complex> to_complex() const;
};

// One step of the dynamics in logarithmic coordinates.
struct LiftValue {
  Complex next;  // principal Log f_l(z)
  Complex inner; // u = (Log(z - l))^{1+p}; |Im u| < pi/2 on the tract
};
struct LiftOverflow {
  Complex inner; // u, whose real part exceeded kExpThreshold
};
using LiftStep = std::variant<LiftValue, LiftOverflow>;

// Reduces an angle to (-pi, pi].
double wrap_angle(double a);

Complex principal_log(Complex z);
// w^a := exp(a Log w).
Complex principal_pow(Complex w, double a);

// phi_l(xi) = exp((Log xi)^{1/(1+p)}) + l, defined for Re xi > 1.
Complex phi(Complex xi, const ModelParams& params);
// phi'(xi); independent of l.
Complex phi_deriv(Complex xi, const ModelParams& params);

// u = (Log(z - l))^{1+p}, so that tau_l(z) = e^u and f_l(z) = e^{e^u}.
Complex tau_inner(Complex z, const ModelParams& params);
// tau_l'(z) = e^u (1+p) (Log(z-l))^p / (z-l).
Complex tau_deriv(Complex z, const ModelParams& params);

// log|f_l(z)| = e^{Re u} cos(Im u); nullopt when Re u > kExpThreshold.
std::optional<double> log_abs_f(Complex z, const ModelParams& params);
// Log f_l(z) as a LogComplex (log|f|, Arg f); nullopt on overflow.
std::optional<LogComplex> log_f(Complex z, const ModelParams& params);

// (log phi_l)'(xi) = phi'(xi) / (phi(xi) + l).  Its modulus is 1/|f_l'(z)|_1 at
// z = phi_l(xi).
Complex log_phi_l_deriv(Complex xi, const ModelParams& params);

// -Log(1 - x) - sum_{n>=1} x^n/n, valid for |x| < 1; used for |x| < 1/2.
Complex log1m_series(Complex x);

// Log(z - l) from zeta = Log z without forming z when |z| is large.
Complex log_shifted(Complex zeta, double l);

// Next logarithmic coordinate Log f_l(z) from zeta = Log z.
LiftStep log_lift_step(Complex zeta, const ModelParams& params);

} // namespace hypdim
