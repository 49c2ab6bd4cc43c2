#include <doctest.h>

#include <cmath>
#include <random>

#include "hypdim/constants_io.hpp"
#include "hypdim/transferop.hpp"

using namespace hypdim;

namespace {

const CalibratedConstants& consts() {
  static const CalibratedConstants c = *bundled_constants(1.0);
  return c;
}

// Independent long double evaluation of |phi'(xi)/(phi(xi)+l)|^t.
long double term_ld(long double u, long double v, double t, double p, double l) {
  using C = std::complex<long double>;
  const C xi(u, v);
  const C lx = std::log(xi);
  const long double q = 1.0L / (1.0L + p);
  const C s = std::exp(q * std::log(lx));  // (Log xi)^{1/(1+p)}
  const C ph = std::exp(s);
  const C dph = ph * q * s / (lx * xi);
  return std::pow(std::abs(dph / (ph + static_cast<long double>(l))), static_cast<long double>(t));
}

long double brute_sum(Complex w, double t, double p, double l, long K) {
  long double sum = 0.0L;
  const long double u = std::log(std::abs(w)), a = std::arg(w);
  for (long k = -K; k <= K; ++k) {
    sum += term_ld(u, a + 2.0L * 3.14159265358979323846264338327950288L * k, t, p, l);
  }
  return sum;
}

} // namespace

TEST_CASE("preimage_xi") {
  const double r = 630.0;
  const Complex a = preimage_xi(r * std::exp(1.0), 0);
  CHECK(a.real() == doctest::Approx(1.0 + std::log(r)).epsilon(1e-15));
  CHECK(a.imag() == 0.0);
  const Complex w(2000.0, 0.0);
  CHECK(std::abs(preimage_xi(w, 3) - std::conj(preimage_xi(w, -3))) < 1e-12);
  const Complex w2(-1500.0, 700.0);
  for (long k : {-5L, 0L, 2L, 40L}) {
    CHECK(std::abs(std::exp(preimage_xi(w2, k)) - w2) < 1e-9 * std::abs(w2));
  }
}

TEST_CASE("model_term matches an independent evaluation") {
  const Complex w = std::polar(900.0, 0.7);
  for (double p : {0.5, 1.0, 2.0}) {
    for (double l : {0.0, 650.0}) {
      for (long k : {0L, 3L, -50L}) {
        const double v = model_term(w, k, 1.3, ModelParams(p, l));
        const long double ref = term_ld(std::log(900.0L), 0.7L + 2.0L * 3.14159265358979323846L * k, 1.3, p, l);
        CHECK(std::abs(v - static_cast<double>(ref)) <= 1e-12 * static_cast<double>(ref));
      }
    }
  }
}

TEST_CASE("tail_bound properties") {
  const double u = std::log(1000.0);
  const double p = 1.0;
  // t = 2: K -> 2^{1/(t-1)} K = 2K at least halves the bound
  for (long K : {2L, 10L, 100L}) {
    CHECK(tail_bound(u, 2 * K, 2.0, p) <= 0.5 * tail_bound(u, K, 2.0, p));
  }
  CHECK(tail_bound(u, 10, 1.001, p) > 100.0 * tail_bound(u, 10, 1.1, p));
  CHECK_THROWS_AS(tail_bound(u, 10, 1.0, p), DivergenceError);
  CHECK_THROWS_AS(tail_bound(50.0, 1, 1.5, p), DomainError);
  // brute force: sum over K < |k| <= 10 K stays below the bound
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> uu(6.5, 30.0), ua(-kPi, kPi), ut(1.05, 2.5);
  for (int i = 0; i < 20; ++i) {
    const double uu_ = uu(gen), a = ua(gen), t = ut(gen);
    const long K = static_cast<long>(std::ceil(std::max(uu_, std::exp(2.0)) / kTwoPi)) + 3;
    long double s = 0.0L;
    for (long k = K + 1; k <= 10 * K; ++k) {
      s += term_ld(uu_, a + 2.0L * 3.14159265358979323846L * k, t, p, 0.0);
      s += term_ld(uu_, a - 2.0L * 3.14159265358979323846L * k, t, p, 0.0);
    }
    CHECK(static_cast<double>(s) <= tail_bound(uu_, K, t, p));
  }
}

TEST_CASE("transfer_model: brute-force oracle, tail bound and symmetry") {
  const auto& c = consts();
  const RadiusConfig cfg(c.r0, c);
  for (double t : {1.5, 2.0}) {
    for (double l : {0.0, cfg.l_min() + 1.0}) {
      const ModelParams m(1.0, l);
      const Complex w = std::polar(1.5 * c.r0, 0.3);
      const TransferValue v = transfer_model(w, t, m, cfg);
      CHECK(v.tail_bound < 1e-3 * v.value);
      CHECK(v.K >= 1);
      // a much longer direct sum plus its elementary tail
      const long K2 = 200000;
      const long double direct = brute_sum(w, t, 1.0, l, K2);
      const double slack = tail_bound(std::log(std::abs(w)), K2, t, 1.0);
      CHECK(std::abs(v.value - static_cast<double>(direct)) <= v.tail_bound + slack + 1e-12 * v.value);
      // doubling K
      CHECK(std::abs(partial_sum(w, t, m, 2 * v.K) - partial_sum(w, t, m, v.K)) <=
            tail_bound(std::log(std::abs(w)), v.K, t, 1.0));
      const TransferValue vc = transfer_model(std::conj(w), t, m, cfg);
      CHECK(vc.value == doctest::Approx(v.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("transfer_model errors") {
  const auto& c = consts();
  const RadiusConfig cfg(c.r0, c);
  const ModelParams m(1.0, 0.0);
  CHECK_THROWS_AS(transfer_model(std::polar(2.0 * c.r0, 0.1), 1.0, m, cfg), DivergenceError);
  CHECK_THROWS_AS(transfer_model(std::polar(0.5 * c.r0, 0.1), 1.5, m, cfg), DomainError);
}

TEST_CASE("divergence at t = 1: partial sums are not Cauchy") {
  const ModelParams m(1.0, 0.0);
  const Complex w = std::polar(945.0, 0.3);
  for (long K : {100L, 1000L, 10000L}) {
    CHECK(partial_sum(w, 1.0, m, 10 * K) - partial_sum(w, 1.0, m, K) >= 0.05);
  }
}

TEST_CASE("monotone decay in l and uniform boundedness") {
  const auto& c = consts();
  const RadiusConfig cfg(c.r0, c);
  const Complex w = std::polar(2.0 * c.r0, -1.1);
  for (double t : {1.2, 1.5, 2.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double l : {0.0, 10.0, 100.0, 1000.0, 1e4}) {
      const double v = transfer_model(w, t, ModelParams(1.0, l), cfg).value;
      CHECK(v <= prev);
      CHECK(std::isfinite(v));
      prev = v;
    }
  }
}

TEST_CASE("transfer_entire") {
  const auto& c = consts();
  const RadiusConfig cfg(c.r0, c);
  const ModelParams m(1.0, cfg.l_min() + 1.0);
  const Complex w = std::polar(1.2 * c.r0, 2.0);
  const TransferValue mv = transfer_model(w, 1.5, m, cfg);
  const EntireTransferValue e0 = transfer_entire(w, 1.5, m, c, cfg, 0.0, 0);
  CHECK(e0.value == mv.value);
  CHECK(e0.refined == 0);
  const EntireTransferValue e = transfer_entire(w, 1.5, m, c, cfg, 0.0, 13);
  CHECK(e.refined == 13);
  CHECK(e.fallbacks == 0);
  CHECK(e.refined_fraction > 0.0);
  const double ratio = e.value / mv.value;
  CHECK(ratio <= std::pow(c.Kcal, 1.5));
  CHECK(ratio >= std::pow(c.Kcal, -1.5));
}

TEST_CASE("lattice and grid functions") {
  const Lattice lat(6.0, 10.0, 5, 4);
  CHECK(lat.u(0) == 6.0);
  CHECK(lat.u(4) == 10.0);
  CHECK(lat.v(3) == doctest::Approx(kPi));
  CHECK(lat.v(0) == doctest::Approx(-kPi / 2.0));
  GridFunction g = GridFunction::constant(lat, 2.0, 0.25);
  CHECK(g.at(7.3, 0.4) == doctest::Approx(2.0));
  CHECK(g.at(20.0, 0.0) == doctest::Approx(2.0 * std::pow(10.0 / 20.0, 0.25)));
  for (int i = 0; i < lat.nu; ++i) {
    for (int j = 0; j < lat.nv; ++j) {
      g.values[lat.index(i, j)] = lat.u(i) + std::cos(lat.v(j));
    }
  }
  CHECK(g.at(8.0, lat.v(1)) == doctest::Approx(8.0 + std::cos(lat.v(1))));
  // periodic in v
  CHECK(g.at(7.0, 0.3) == doctest::Approx(g.at(7.0, 0.3 + kTwoPi)));
  CHECK(g.at(7.5, 0.3) == doctest::Approx(g.at(7.5, 0.3 - kTwoPi)));
}

TEST_CASE("grid operator: constant function, positivity, linearity, monotonicity") {
  const auto& c = consts();
  const RadiusConfig cfg(c.r0, c);
  const ModelParams m(1.0, cfg.l_min() + 1.0);
  const double t = 1.5;
  const Lattice lat(cfg.log_r(), cfg.log_r() + 40.0, 24, 16);
  const GridOperator op(lat, t, m);
  const auto rows = op.row_sums();
  for (int i : {0, 7, 23}) {
    for (int j : {0, 5, 15}) {
      const TransferValue v = transfer_model(lat.node(i, j), t, m, cfg);
      CHECK(std::abs(rows[lat.index(i, j)] - v.value) <= 1e-6 * v.value + v.tail_bound);
    }
  }
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  GridFunction h1 = GridFunction::constant(lat, 0.0, op.delta());
  GridFunction h2 = h1;
  for (std::size_t k = 0; k < lat.size(); ++k) {
    h1.values[k] = U(gen);
    h2.values[k] = h1.values[k] + U(gen);
  }
  const GridFunction a = op.apply(h1), b = op.apply(h2);
  GridFunction h3 = h1;
  for (auto& x : h3.values) {
    x *= 3.5;
  }
  const GridFunction s = op.apply(h3);
  for (std::size_t k = 0; k < lat.size(); ++k) {
    CHECK(a.values[k] >= 0.0);
    CHECK(a.values[k] <= b.values[k]);
    CHECK(s.values[k] == doctest::Approx(3.5 * a.values[k]).epsilon(1e-13));
  }
  // deterministic across worker counts
  const GridFunction a4 = op.apply(h1, 4);
  CHECK(a4.values == a.values);
  const GridOperator op4(lat, t, m, {1e-6, 4});
  CHECK(op4.row_sums() == rows);
}
