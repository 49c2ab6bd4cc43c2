#include <doctest.h>

#include <cmath>
#include <random>

#include "hypdim/cauchy.hpp"
#include "hypdim/constants_io.hpp"

using namespace hypdim;

namespace {

const CalibratedConstants& consts() {
  static const CalibratedConstants c = *bundled_constants(1.0);
  return c;
}

Complex h_test(Complex t) { return 1.0 / ((t + 1.0) * (t + 1.0)); }

} // namespace

TEST_CASE("numerics: adaptive quadrature and helpers") {
  const std::vector<double> unit = {0.0, 1.0};
  const auto r = num::integrate_adaptive<double>([](double x) { return x * x; }, unit, 1e-14, 30);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto s = num::integrate_adaptive<double>([](double x) { return 1.0 / std::sqrt(x); }, unit, 1e-8, 30);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-6));
  const auto g = num::geomspace(1.0, 1000.0, 4);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g.back() == 1000.0);
  const auto l = num::linspace(0.0, 1.0, 5);
  CHECK(l[2] == 0.5);
  std::vector<int> hit(1000, 0);
  num::parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 1000);
  try {
    num::parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) {
        throw std::runtime_error(std::to_string(i));
      }
    });
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}

TEST_CASE("residue oracle: -h(z) inside the clockwise contour, 0 outside") {
  const ContourSpec contour(TractRegion(4.0, 5.0 / 6.0, 1.0), 1e5);
  for (Complex z : {Complex(6.0, 0.5), Complex(9.0, -1.0), Complex(30.0, 3.0)}) {
    REQUIRE(in_G(z, contour.region));
    const QuadResult q = quad_cauchy([&](Complex t) { return h_test(t) / (t - z); }, contour, 1e-12);
    CHECK(std::abs(q.value + h_test(z)) < 1e-8);
    CHECK(q.err_est >= 0.0);
    CHECK(q.panels >= 1);
  }
  for (Complex z : {Complex(2.0, 0.0), Complex(6.0, 10.0), Complex(-3.0, 2.0)}) {
    REQUIRE_FALSE(in_G(z, contour.region));
    const QuadResult q = quad_cauchy([&](Complex t) { return h_test(t) / (t - z); }, contour, 1e-12);
    CHECK(std::abs(q.value) < 1e-8);
  }
}

TEST_CASE("residue oracle is conjugation symmetric") {
  const ContourSpec contour(TractRegion(4.0, 5.0 / 6.0, 1.0), 1e5);
  const Complex z(7.0, 1.3);
  auto run = [&](Complex y) {
    return quad_cauchy([&](Complex t) { return h_test(t) / (t - y); }, contour, 1e-12).value;
  };
  CHECK(std::abs(run(std::conj(z)) - std::conj(run(z))) < 1e-12);
}

TEST_CASE("quad_cauchy reports non-convergence with the best value") {
  const ContourSpec contour(TractRegion(4.0, 5.0 / 6.0, 1.0), 50.0);
  const Complex z0 = boundary_point(0.3, contour.region);
  CHECK_THROWS_AS(quad_cauchy([&](Complex t) { return 1.0 / (t - z0); }, contour, 1e-10),
                  NonConvergenceError);
}

TEST_CASE("eval_E off the tract") {
  const auto& c = consts();
  const ModelParams m(1.0, 0.0);
  const QuadResult a = eval_E(-100.0, m, c, 1e-10);
  CHECK(std::abs(a.value) <= c.C);
  CHECK(std::abs(a.value.imag()) < 1e-12);
  const Complex z(1.5, 2.0);
  const QuadResult b = eval_E(z, m, c, 1e-10);
  const QuadResult bc = eval_E(std::conj(z), m, c, 1e-10);
  CHECK(std::abs(bc.value - std::conj(b.value)) < 1e-10);
  const QuadResult half = eval_E(z, m, c, 0.5e-10);
  CHECK(std::abs(half.value - b.value) <= b.err_est);
  // translation E_l(z) = E(z - l)
  const QuadResult shifted = eval_E(z + 500.0, ModelParams(1.0, 500.0), c, 1e-10);
  CHECK(std::abs(shifted.value - b.value) < 1e-12);
  CHECK_THROWS_AS(eval_E(8.0, m, c, 1e-10), DomainError);
  const Complex near = boundary_point(-0.2, TractRegion(c.D + 1.0, 5.0 / 6.0, 1.0)) - Complex(1e-4, 0.0);
  CHECK_THROWS_AS(eval_E(near, m, c, 1e-10), ConditioningError);
}

TEST_CASE("truncation doubling changes E by less than err_est") {
  const auto& c = consts();
  const ModelParams m(1.0, 0.0);
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> ur(-6.0, 3.0), ua(-kPi, kPi);
  int tested = 0;
  while (tested < 100) {
    const Complex z = std::polar(std::exp(ur(gen)), ua(gen));
    if (!outer_formula_valid(z, c)) {
      continue;
    }
    ++tested;
    const QuadResult a = eval_E(z, m, c, 1e-10);
    const double x2 = 2.0 * decay_cutoff(1.0);
    const QuadResult b =
        quad_cauchy([&](Complex t) { return model_f(t, 1.0) / (t - z); }, outer_contour(c, x2), 1e-12);
    CHECK(std::abs(a.value - b.value) <= a.err_est + b.err_est);
  }
}

TEST_CASE("derivative matches central differences off the tract") {
  const auto& c = consts();
  const ModelParams m(1.0, 0.0);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> ur(-1.0, 2.5), ua(-kPi, kPi);
  int tested = 0;
  while (tested < 100) {
    const Complex z = std::polar(std::exp(ur(gen)), ua(gen));
    if (!outer_formula_valid(z, c) || distance_to_boundary(z, TractRegion(c.D + 1.0, 5.0 / 6.0, 1.0)) < 0.1) {
      continue;
    }
    ++tested;
    const double h = 1e-4;
    const Complex fd = (eval_E(z + h, m, c, 1e-12).value - eval_E(z - h, m, c, 1e-12).value) / (2.0 * h);
    const DerivEval d = eval_E_deriv(z, m, c, 1e-12);
    REQUIRE(d.value().has_value());
    CHECK(std::abs(*d.value() - fd) <= 1e-5 * std::max(std::abs(fd), 1e-3));
  }
}

TEST_CASE("inner formula: bounded correction and conjugation") {
  const auto& c = consts();
  const ModelParams m(1.0, 0.0);
  for (Complex z : {Complex(4.0, 0.5), Complex(6.0, -1.0), Complex(10.0, 2.0), Complex(50.0, 1.0)}) {
    const TractEval te = eval_E_in_tract(z, m, c, 1e-10);
    CHECK(std::abs(te.correction.value) <= c.C);
    const TractEval tc = eval_E_in_tract(std::conj(z), m, c, 1e-10);
    CHECK(std::abs(tc.correction.value - std::conj(te.correction.value)) < 1e-9);
    const DerivEval d = eval_E_deriv(z, m, c, 1e-10);
    CHECK(std::abs(d.correction.value) <= c.C);
  }
  // z = e^2: E = f + correction with f = exp(e^4)
  const TractEval at = eval_E_in_tract(std::exp(2.0), m, c, 1e-10);
  CHECK(at.log_f.log_mod == doctest::Approx(std::exp(4.0)).epsilon(1e-14));
  REQUIRE(at.value().has_value());
}

TEST_CASE("both representations agree on the overlap strip") {
  const auto& c = consts();
  const ModelParams m(1.0, 0.0);
  const TractRegion GD(c.D, 1.0, 1.0);
  for (double x : {c.D + 1.5, c.D + 3.0, c.D + 6.0}) {
    for (double frac : {0.95, 1.0, 1.05}) {
      const Complex z(x, frac * GD.half_width(x));
      REQUIRE(outer_formula_valid(z, c));
      REQUIRE(inner_formula_valid(z, c));
      const QuadResult outer = eval_E(z, m, c, 1e-11);
      const TractEval inner = eval_E_in_tract(z, m, c, 1e-11);
      const Complex v = *inner.value();
      CHECK(std::abs(outer.value - v) <= 1e-6 * std::abs(v) + outer.err_est + inner.correction.err_est);
    }
  }
}

TEST_CASE("eval_entire chooses the representation by membership in G_D") {
  const auto& c = consts();
  const ModelParams m(1.0, 0.0);
  const EntirePoint a = eval_entire(8.0, m, c, 1e-10);
  CHECK(a.in_tract);
  CHECK(std::abs(a.value_correction) <= c.C);
  const EntirePoint b = eval_entire(Complex(1.0, 1.0), m, c, 1e-10);
  CHECK_FALSE(b.in_tract);
  CHECK(std::abs(b.value - eval_E(Complex(1.0, 1.0), m, c, 1e-10).value) < 1e-9);
}

TEST_CASE("Newton refinement of preimages") {
  const auto& c = consts();
  const ModelParams m(1.0, 700.0);
  const Complex w = std::polar(1.5 * c.r0, 0.3);
  for (long k : {0L, 1L, -2L}) {
    const Complex xi(std::log(std::abs(w)), std::arg(w) + kTwoPi * static_cast<double>(k));
    const RefinedPreimage rp = refine_preimage(w, phi(xi, m), m, c, 1e-10);
    CHECK(rp.converged);
    CHECK(rp.residual <= 1e-8);
    CHECK(std::abs(rp.at.value - w) <= 1e-8 * std::abs(w));
  }
}
