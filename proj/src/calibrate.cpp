#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hypdim/cauchy.hpp"
#include "hypdim/numerics.hpp"
#include "hypdim/tractgeom.hpp"

namespace hypdim {

namespace {

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Just inside the largest x with log f(x) = exp((log x)^{1+p}) <= kExpThreshold.
double representable_x(double p) {
  return 0.95 * std::exp(std::pow(std::log(kExpThreshold), 1.0 / (1.0 + p)));
}

double max_in_order(const std::vector<double>& v, std::size_t* where = nullptr) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > best) {
      best = v[i];
      if (where) {
        *where = i;
      }
    }
  }
  return best;
}

struct Sampled {
  double C_off = 0.0;
  double C_in = 0.0;
  Complex off_at, in_at;
  std::size_t off_count = 0;
  std::size_t in_count = 0;
};

Sampled sample_C(double p, double D, const CalibrationBudget& budget) {
  CalibratedConstants trial;
  trial.p = p;
  trial.D = D;
  const ModelParams params(p, 0.0);
  const TractRegion GD(D, 1.0, p);
  const int n = budget.grid;

  // Off G_D: polar grid in the closed upper half plane plus the real segment
  // just left of the mouth, where |E| is largest.
  std::vector<Complex> off;
  const auto radii = num::geomspace(1e-2, 1e4, n);
  const auto angles = num::linspace(0.0, kPi, n);
  for (double rho : radii) {
    for (double th : angles) {
      const Complex z = std::polar(rho, th);
      if (!in_G(z, GD) && outer_formula_valid(z, trial)) {
        off.push_back(z);
      }
    }
  }
  for (double x : num::linspace(D - 1.0, D, n)) {
    off.push_back({x, 0.0});
  }
  // In G_D: log-spaced abscissae up to representability, y = w(x) j/n.
  std::vector<Complex> in;
  const double X = std::max(D * 1.5, representable_x(p));
  for (double x : num::geomspace(D * (1.0 + 1e-9), X, n)) {
    const double w = GD.half_width(x);
    for (int j = 0; j < n; ++j) {
      const Complex z(x, w * j / n);
      if (in_G(z, GD) && inner_formula_valid(z, trial)) {
        in.push_back(z);
      }
    }
  }

  std::vector<double> off_vals(off.size()), in_vals(in.size());
  num::parallel_for(off.size(), budget.workers, [&](std::size_t i) {
    off_vals[i] = std::abs(eval_entire(off[i], params, trial, budget.quad_tol).value);
  });
  num::parallel_for(in.size(), budget.workers, [&](std::size_t i) {
    const EntirePoint ep = eval_entire(in[i], params, trial, budget.quad_tol);
    in_vals[i] = std::max(std::abs(ep.value_correction), std::abs(ep.deriv_correction));
  });
  Sampled s;
  std::size_t io = 0, ii = 0;
  s.C_off = max_in_order(off_vals, &io);
  s.C_in = max_in_order(in_vals, &ii);
  s.off_at = off.empty() ? Complex() : off[io];
  s.in_at = in.empty() ? Complex() : in[ii];
  s.off_count = off.size();
  s.in_count = in.size();
  return s;
}

// Tract Omega_{f, r0/2} sampled on a box, checked against G_D.
bool tract_contained(const CalibratedConstants& c, int n) {
  const ModelParams params(c.p, 0.0);
  const RadiusConfig cfg(0.5 * c.r0, c);
  const TractRegion GD(c.D, 1.0, c.p);
  const double X = 2.0 * std::max(c.D * 1.5, representable_x(c.p));
  const double Y = 1.5 * GD.half_width(X);
  for (double x : num::linspace(1.0, X, n)) {
    for (double y : num::linspace(0.0, Y, n)) {
      const Complex z(x, y);
      if (in_omega(z, params, cfg) && !in_G(z, GD)) {
        return false;
      }
    }
  }
  return true;
}

} // namespace

CalibratedConstants calibrate(double p, const CalibrationBudget& budget) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("calibrate: p must be positive");
  }
  if (budget.grid < 4 || budget.koebe_samples < 1 || budget.kcal_points < 1 || budget.kcal_branches < 0) {
    throw DomainError("calibrate: budget too small");
  }
  CalibratedConstants c;
  c.p = p;
  Sampled s;
  bool found = false;
  for (int k = 1; k <= 64 && !found; ++k) {
    c.D = 3.0 * std::exp2(k / 16.0);
    s = sample_C(p, c.D, budget);
    c.C = 2.0 * std::max(s.C_off, s.C_in);
    c.r0 = 8.0 * c.C;
    found = tract_contained(c, budget.grid);
  }
  if (!found) {
    throw DomainError("calibrate: no self-consistent cutoff D found");
  }

  // Koebe distortion of phi over vertical windows of height 2 pi.
  const ModelParams model(p, 0.0);
  std::mt19937_64 gen(budget.seed);
  double koebe = 1.0;
  for (int i = 0; i < budget.koebe_samples; ++i) {
    const double u = std::log(c.r0) + 40.0 * uniform01(gen);
    const double v = -1e3 + 2e3 * uniform01(gen);
    const double y = kTwoPi * uniform01(gen);
    const double a = std::abs(phi_deriv({u, v}, model));
    const double b = std::abs(phi_deriv({u, v + y}, model));
    koebe = std::max({koebe, b / a, a / b});
  }
  c.K = 1.25 * koebe;

  // Entire/model term ratios rho = |E_l'(z')| |z'| / (|f_l'(z)| |z|) at
  // refined preimages, l at the disjoint-type threshold for r = r0.
  c.Kcal = 1.0;
  const double l = std::max(0.0, c.r0 - c.D) + 1.0;
  const ModelParams shifted(p, l);
  std::vector<std::pair<Complex, long>> jobs;
  for (int i = 0; i < budget.kcal_points; ++i) {
    const double u = std::log(c.r0) * (1.0 + 1e-6) + 4.0 * uniform01(gen);
    const double v = kPi * (2.0 * uniform01(gen) - 1.0);
    for (long k = -budget.kcal_branches; k <= budget.kcal_branches; ++k) {
      jobs.emplace_back(std::polar(std::exp(u), v), k);
    }
  }
  std::vector<double> dev(jobs.size(), 0.0);
  num::parallel_for(jobs.size(), budget.workers, [&](std::size_t i) {
    const auto [w, k] = jobs[i];
    const Complex xi(std::log(std::abs(w)), std::arg(w) + kTwoPi * static_cast<double>(k));
    const Complex z = phi(xi, shifted);
    const RefinedPreimage rp = refine_preimage(w, z, shifted, c, budget.quad_tol);
    if (!rp.converged) {
      throw NonConvergenceError("calibrate: preimage refinement failed", {});
    }
    const Complex df = w / (phi_deriv(xi, shifted));
    const double rho = std::abs(rp.at.deriv) * std::abs(rp.z) / (std::abs(df) * std::abs(z));
    dev[i] = std::max(std::abs(rho - 1.0), std::abs(1.0 / rho - 1.0));
  });
  const double kcal_dev = max_in_order(dev);
  c.Kcal = 1.0 + 2.0 * kcal_dev;

  std::ostringstream grid;
  grid << "D scan 3*2^(k/16); off G_D: " << budget.grid << "x" << budget.grid
       << " polar (rho log-spaced in [1e-2,1e4], theta in [0,pi]) + " << budget.grid
       << " real points in [D-1,D]; in G_D: " << budget.grid << " log-spaced x in [D,"
       << std::max(c.D * 1.5, representable_x(p)) << "] x " << budget.grid
       << " heights w(x)j/n; K: " << budget.koebe_samples
       << " samples; Kcal: " << budget.kcal_points << " points x " << (2 * budget.kcal_branches + 1)
       << " branches at l=" << l << "; seed " << budget.seed;
  c.grid_description = grid.str();
  c.diagnostics = {{"C_off", s.C_off},
                   {"C_off_at_re", s.off_at.real()},
                   {"C_off_at_im", s.off_at.imag()},
                   {"C_in", s.C_in},
                   {"C_in_at_re", s.in_at.real()},
                   {"C_in_at_im", s.in_at.imag()},
                   {"off_samples", static_cast<double>(s.off_count)},
                   {"in_samples", static_cast<double>(s.in_count)},
                   {"koebe_max", koebe},
                   {"kcal_max_dev", kcal_dev}};
  c.validate();
  return c;
}

} // namespace hypdim
