#include <doctest.h>

#include <quadmath.h>

#include <cmath>
#include <random>

#include "hypdim/corefn.hpp"

using namespace hypdim;

namespace {

const double e = std::exp(1.0);

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// log|f(z)| = Re exp((Log z)^{1+p}) in quadruple precision, from polar form.
double log_abs_f_quad(Complex z, double p) {
  const __float128 x = z.real(), y = z.imag();
  const __float128 lr = logq(sqrtq(x * x + y * y));
  const __float128 th = atan2q(y, x);
  const __float128 m = sqrtq(lr * lr + th * th);
  const __float128 a = atan2q(th, lr);
  const __float128 q = 1 + (__float128)p;
  const __float128 um = powq(m, q);
  const __float128 ur = um * cosq(q * a), ui = um * sinq(q * a);
  return static_cast<double>(expq(ur) * cosq(ui));
}

} // namespace

TEST_CASE("principal_log conventions") {
  CHECK(std::abs(principal_log(1.0)) == 0.0);
  CHECK(principal_log(e * e).real() == doctest::Approx(2.0).epsilon(1e-15));
  const Complex m = principal_log(-1.0);
  CHECK(m.real() == doctest::Approx(0.0));
  CHECK(m.imag() == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(principal_log(Complex(-1.0, -0.0)).imag() == doctest::Approx(kPi));
  CHECK_THROWS_AS(principal_log(0.0), DomainError);
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
}

TEST_CASE("ModelParams validation") {
  CHECK_THROWS_AS(ModelParams(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(ModelParams(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(ModelParams(NAN, 0.0), DomainError);
  CHECK(ModelParams(1.0, 2.0).with_l(5.0).l() == 5.0);
}

TEST_CASE("phi closed forms") {
  for (double p : {0.5, 1.0, 2.0}) {
    CHECK(rel(phi(e, ModelParams(p, 0.0)), e) < 1e-15);
  }
  CHECK(rel(phi(std::exp(4.0), ModelParams(1.0, 0.0)), e * e) < 1e-14);
  CHECK(rel(phi(std::exp(4.0), ModelParams(1.0, 100.0)), e * e + 100.0) < 1e-14);
  CHECK_THROWS_AS(phi(Complex(0.5, 3.0), ModelParams(1.0, 0.0)), DomainError);
  const Complex v = phi(Complex(5.0, 0.0), ModelParams(1.0, 3.0));
  CHECK(v.imag() == 0.0);
  CHECK(v.real() > e + 3.0);
}

TEST_CASE("tau_inner closed forms and finite difference") {
  const ModelParams m(1.0, 0.0);
  CHECK(rel(tau_inner(e * e, m), 4.0) < 1e-14);
  for (double p : {0.5, 1.0, 2.0}) {
    for (double l : {0.0, 7.0, 1e3}) {
      CHECK(rel(tau_inner(e + l, ModelParams(p, l)), 1.0) < 1e-12);
    }
  }
  const double x = e * e * (1.0 + 1e-6);
  const double h = 1e-5;
  const Complex fd = (tau_inner(x + h, m) - tau_inner(x - h, m)) / (2.0 * h);
  // du/dz = (1+p) (Log z)^p / z
  const Complex exact = 2.0 * principal_log(x) / x;
  CHECK(rel(fd, exact) < 1e-6);
  CHECK(rel(tau_deriv(x, m), std::exp(tau_inner(x, m)) * exact) < 1e-12);
  CHECK_THROWS_AS(tau_inner(-5.0, m), DomainError);
  CHECK_THROWS_AS(tau_inner(Complex(0.5, 0.2), m), DomainError);
}

TEST_CASE("log_abs_f closed forms, overflow sentinel and quad oracle") {
  const ModelParams m(1.0, 0.0);
  CHECK(*log_abs_f(e * e, m) == doctest::Approx(std::exp(4.0)).epsilon(1e-14));
  CHECK(*log_abs_f(e + 5.0, ModelParams(1.0, 5.0)) == doctest::Approx(e).epsilon(1e-13));
  CHECK_FALSE(log_abs_f(std::exp(40.0), m).has_value());
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ux(4.0, 12.0), uy(-1.0, 1.0);
  for (double p : {0.5, 1.0, 2.0}) {
    for (int i = 0; i < 200; ++i) {
      const Complex z(ux(gen), uy(gen));
      const auto v = log_abs_f(z, ModelParams(p, 0.0));
      if (!v) {
        continue;
      }
      const double q = log_abs_f_quad(z, p);
      CHECK(std::abs(*v - q) <= 1e-10 * std::max(1.0, std::abs(q)));
    }
  }
}

TEST_CASE("log_f is consistent with log_abs_f") {
  const ModelParams m(1.0, 2.0);
  const Complex z(9.0, 0.4);
  const auto lf = log_f(z, m);
  REQUIRE(lf.has_value());
  CHECK(lf->log_mod == doctest::Approx(*log_abs_f(z, m)).epsilon(1e-14));
  CHECK(lf->arg > -kPi);
  CHECK(lf->arg <= kPi);
  const Complex u = tau_inner(z, m);
  CHECK(lf->arg == doctest::Approx(wrap_angle(std::exp(u).imag())).epsilon(1e-12));
}

TEST_CASE("LogComplex round trip") {
  const Complex w(-3.0, 4.0);
  const LogComplex lc = LogComplex::from_log(principal_log(w));
  CHECK(rel(*lc.to_complex(), w) < 1e-15);
  CHECK_FALSE(LogComplex{800.0, 0.0}.to_complex().has_value());
}

TEST_CASE("log_phi_l_deriv closed form, finite difference and symmetry") {
  const ModelParams m(1.0, 0.0);
  const Complex v = log_phi_l_deriv(std::exp(4.0), m);
  CHECK(rel(v, 0.25 * std::exp(-4.0)) < 1e-13);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> uu(2.0, 6.0), uv(-20.0, 20.0);
  for (double p : {0.5, 1.0, 2.0}) {
    const ModelParams mp(p, 0.0);
    for (int i = 0; i < 50; ++i) {
      const Complex xi(uu(gen), uv(gen));
      const Complex z = phi(xi, mp);
      // |f'(z) z / f(z)| = |tau'(z) z| since f = e^tau
      const double h = 1e-6 * std::abs(z);
      const Complex dtau = (std::exp(tau_inner(z + h, mp)) - std::exp(tau_inner(z - h, mp))) / (2.0 * h);
      const double fd = 1.0 / std::abs(dtau * z);
      CHECK(std::abs(std::abs(log_phi_l_deriv(xi, mp)) - fd) <= 1e-6 * fd);
      CHECK(rel(log_phi_l_deriv(std::conj(xi), mp), std::conj(log_phi_l_deriv(xi, mp))) < 1e-14);
    }
  }
}

TEST_CASE("phi_deriv matches finite differences") {
  for (double p : {0.5, 1.0, 2.0}) {
    const ModelParams mp(p, 0.0);
    const Complex xi(7.0, 3.0);
    const double h = 1e-5;
    const Complex fd = (phi(xi + h, mp) - phi(xi - h, mp)) / (2.0 * h);
    CHECK(rel(phi_deriv(xi, mp), fd) < 1e-8);
  }
}

TEST_CASE("round trip exp(tau_inner(phi(xi))) = xi") {
  std::mt19937_64 gen(3);
  const double log_r = std::log(630.0);
  std::uniform_real_distribution<double> uu(log_r, log_r + 20.0), uv(-1e3, 1e3);
  for (double p : {0.5, 1.0, 2.0}) {
    for (double l : {0.0, 700.0}) {
      const ModelParams mp(p, l);
      double worst = 0.0;
      for (int i = 0; i < 1000; ++i) {
        const Complex xi(uu(gen), uv(gen));
        worst = std::max(worst, rel(std::exp(tau_inner(phi(xi, mp), mp)), xi));
      }
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("reality on the real axis") {
  for (double p : {0.5, 1.0, 2.0}) {
    for (double l : {0.0, 50.0}) {
      const ModelParams mp(p, l);
      for (double x : {3.0, 5.0, 9.0}) {
        CHECK(std::abs(tau_inner(x + l, mp).imag()) < 1e-12);
        CHECK(std::abs(log_phi_l_deriv(x, mp).imag()) < 1e-12);
        CHECK(std::abs(phi(x + 1.0, mp).imag()) < 1e-12);
      }
    }
  }
}

TEST_CASE("log1m_series agrees with the direct formula") {
  for (double r : {0.1, 0.3, 0.49, 0.5}) {
    for (double a : {0.0, 1.0, 2.5, -2.0}) {
      const Complex x = std::polar(r, a);
      CHECK(std::abs(log1m_series(x) - std::log(1.0 - x)) < 1e-14);
    }
  }
}

TEST_CASE("log_shifted equals Log(z - l)") {
  for (double l : {0.0, 3.0, 600.0}) {
    for (Complex z : {Complex(900.0, 10.0), Complex(2000.0, -50.0), Complex(1e6, 1e5)}) {
      CHECK(rel(log_shifted(principal_log(z), l), principal_log(z - l)) < 1e-14);
    }
  }
}

TEST_CASE("log_lift_step examples") {
  const ModelParams m(1.0, 0.0);
  auto a = log_lift_step(principal_log(e), m);
  REQUIRE(std::holds_alternative<LiftValue>(a));
  CHECK(rel(std::get<LiftValue>(a).next, e) < 1e-14);
  auto b = log_lift_step(2.0, m);
  REQUIRE(std::holds_alternative<LiftValue>(b));
  CHECK(rel(std::get<LiftValue>(b).next, std::exp(4.0)) < 1e-13);
  CHECK(std::get<LiftValue>(b).next.imag() == 0.0);
  CHECK(std::holds_alternative<LiftOverflow>(log_lift_step(60.0, m)));
  // agrees with the direct route for a translated map
  const ModelParams ml(1.0, 600.0);
  const Complex z(605.0, 0.2);
  auto c = log_lift_step(principal_log(z), ml);
  REQUIRE(std::holds_alternative<LiftValue>(c));
  const auto lf = log_f(z, ml);
  CHECK(std::get<LiftValue>(c).next.real() == doctest::Approx(lf->log_mod).epsilon(1e-12));
}
