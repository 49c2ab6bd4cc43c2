#include "hypdim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hypdim/cauchy.hpp"
#include "hypdim/numerics.hpp"
#include "hypdim/transferop.hpp"

namespace hypdim {

namespace {

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& gen, double a, double b) { return a + (b - a) * uniform01(gen); }

double log_uniform(std::mt19937_64& gen, double a, double b) {
  return std::exp(uniform(gen, std::log(a), std::log(b)));
}

// Tract samples: in Omega_{f, r0} with log|f| at most kExpThreshold / 2.
std::vector<Complex> tract_samples(const CalibratedConstants& c, int n, std::mt19937_64& gen) {
  const ModelParams model(c.p, 0.0);
  const RadiusConfig cfg(c.r0, c);
  const TractRegion GD(c.D, 1.0, c.p);
  const double q = 1.0 / (1.0 + c.p);
  const double x_tip = std::exp(std::pow(std::log(cfg.log_r()), q));
  const double x_top = std::exp(std::pow(std::log(0.5 * kExpThreshold), q));
  std::vector<Complex> out;
  for (long tries = 0; static_cast<int>(out.size()) < n; ++tries) {
    if (tries > 1000L * n) {
      throw DomainError("tract_samples: rejection sampling exhausted");
    }
    const double x = log_uniform(gen, x_tip, x_top);
    const double y = GD.half_width(x) * uniform(gen, -1.0, 1.0);
    const Complex z(x, y);
    if (in_omega(z, model, cfg) && inner_formula_valid(z, c)) {
      const auto lf = log_abs_f(z, model);
      if (lf && *lf <= 0.5 * kExpThreshold) {
        out.push_back(z);
      }
    }
  }
  return out;
}

std::vector<Complex> off_tract_samples(const CalibratedConstants& c, int n, std::mt19937_64& gen) {
  const TractRegion GD(c.D, 1.0, c.p);
  std::vector<Complex> out;
  for (long tries = 0; static_cast<int>(out.size()) < n; ++tries) {
    if (tries > 1000L * n) {
      throw DomainError("off_tract_samples: rejection sampling exhausted");
    }
    const Complex z = std::polar(log_uniform(gen, 1e-2, 1e4), uniform(gen, -kPi, kPi));
    if (!in_G(z, GD) && outer_formula_valid(z, c)) {
      out.push_back(z);
    }
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, x);
  }
  return m;
}

} // namespace

CheckResult check_approximation(const CalibratedConstants& c, const ApproximationCheckOptions& o) {
  std::mt19937_64 gen(o.seed);
  const auto in = tract_samples(c, o.in_samples, gen);
  const auto off = off_tract_samples(c, o.off_samples, gen);
  const ModelParams model(c.p, 0.0);

  std::vector<double> dv(in.size()), dd(in.size()), ratio_v(in.size()), ratio_d(in.size());
  num::parallel_for(in.size(), o.workers, [&](std::size_t i) {
    const EntirePoint e = eval_entire(in[i], model, c, o.quad_tol);
    const Complex f = e.value - e.value_correction;
    const Complex df = e.deriv - e.deriv_correction;
    dv[i] = std::abs(e.value_correction);
    dd[i] = std::abs(e.deriv_correction);
    ratio_v[i] = std::abs(e.value) / std::abs(f);
    ratio_d[i] = std::abs(e.deriv) / std::abs(df);
  });
  std::vector<double> eo(off.size());
  num::parallel_for(off.size(), o.workers, [&](std::size_t i) {
    eo[i] = std::abs(eval_entire(off[i], model, c, o.quad_tol).value);
  });

  auto log_dev = [](const std::vector<double>& r) {
    double m = 0.0;
    for (double x : r) {
      m = std::max(m, std::abs(std::log(x)));
    }
    return m;
  };
  CheckResult res;
  res.name = "approximation";
  res.samples = static_cast<int>(in.size() + off.size());
  const double max_dv = max_of(dv), max_dd = max_of(dd), max_off = max_of(eo);
  const double worst_ratio = std::exp(std::max(log_dev(ratio_v), log_dev(ratio_d)));
  res.metrics = {{"C", c.C},
                 {"max_value_correction", max_dv},
                 {"max_deriv_correction", max_dd},
                 {"max_abs_E_off_tract", max_off},
                 {"worst_ratio_factor", worst_ratio}};
  res.pass = max_dv <= c.C && max_dd <= c.C && max_off <= c.C && worst_ratio <= 2.0;
  res.detail = "tract samples in Omega_{f,r0}; ratio factor is max(|E/f|, |f/E|, |E'/f'|, |f'/E'|)";
  return res;
}

CheckResult check_operator_ratio(const CalibratedConstants& c, const OperatorCheckOptions& o) {
  const RadiusConfig cfg(c.r0, c);
  const ModelParams params(c.p, cfg.l_min() + 1.0);
  std::mt19937_64 gen(o.seed);
  std::vector<std::pair<Complex, double>> pairs;
  for (int i = 0; i < o.pairs; ++i) {
    const double u = cfg.log_r() + uniform(gen, 0.1, 4.0);
    const double v = uniform(gen, -kPi, kPi);
    const double t = uniform(gen, o.t_min, o.t_max);
    pairs.emplace_back(std::polar(std::exp(u), v), t);
  }
  std::vector<double> log_excess(pairs.size()), fallbacks(pairs.size()), refined(pairs.size());
  num::parallel_for(pairs.size(), o.workers, [&](std::size_t i) {
    const auto [w, t] = pairs[i];
    const TransferValue m = transfer_model(w, t, params, cfg);
    const EntireTransferValue e =
        transfer_entire(w, t, params, c, cfg, 0.0, o.refine_budget, o.quad_tol);
    // how far |log ratio| exceeds t log Kcal (<= 0 inside the band)
    log_excess[i] = std::abs(std::log(e.value / m.value)) - t * std::log(c.Kcal);
    fallbacks[i] = e.fallbacks;
    refined[i] = e.refined;
  });
  CheckResult res;
  res.name = "operator_ratio";
  res.samples = static_cast<int>(pairs.size());
  double worst = -1e300, fb = 0.0, rf = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    worst = std::max(worst, log_excess[i]);
    fb += fallbacks[i];
    rf += refined[i];
  }
  res.metrics = {{"Kcal", c.Kcal},
                 {"l", params.l()},
                 {"max_log_excess", worst},
                 {"refined_terms", rf},
                 {"fallbacks", fb}};
  res.pass = c.Kcal <= 2.0 && worst <= 0.0;
  res.detail = "max_log_excess = max(|log(entire/model)| - t log Kcal), must be <= 0";
  return res;
}

CheckResult check_koebe(const CalibratedConstants& c, int samples, std::uint64_t seed) {
  const ModelParams model(c.p, 0.0);
  std::mt19937_64 gen(seed);
  double worst = 1.0;
  for (int i = 0; i < samples; ++i) {
    const double u = std::log(c.r0) + uniform(gen, 0.0, 40.0);
    const double v = uniform(gen, -1e3, 1e3);
    const double y = uniform(gen, 0.0, kTwoPi);
    const double a = std::abs(phi_deriv({u, v}, model));
    const double b = std::abs(phi_deriv({u, v + y}, model));
    worst = std::max({worst, a / b, b / a});
  }
  CheckResult res;
  res.name = "koebe";
  res.samples = samples;
  res.metrics = {{"K", c.K}, {"max_distortion", worst}};
  res.pass = worst <= c.K;
  return res;
}

CheckResult check_decay(const CalibratedConstants& c, int samples, double t, double exponent,
                        double w_max, double ratio_limit, unsigned workers) {
  const RadiusConfig cfg(c.r0, c);
  const ModelParams params(c.p, cfg.l_min() + 1.0);
  const auto radii = num::geomspace(cfg.r() * (1.0 + 1e-9), w_max, static_cast<std::size_t>(samples));
  std::vector<double> prod(radii.size());
  num::parallel_for(radii.size(), workers, [&](std::size_t i) {
    const Complex w = std::polar(radii[i], 0.3);
    prod[i] = transfer_model(w, t, params, cfg).value * std::pow(std::log(radii[i]), exponent);
  });
  const auto [lo, hi] = std::minmax_element(prod.begin(), prod.end());
  CheckResult res;
  res.name = "decay";
  res.samples = samples;
  res.metrics = {{"t", t}, {"min_product", *lo}, {"max_product", *hi}, {"ratio", *hi / *lo},
                 {"ratio_limit", ratio_limit}};
  res.pass = *lo > 0.0 && *hi / *lo <= ratio_limit;
  return res;
}

CheckResult check_divergence_t1(const CalibratedConstants& c, const std::vector<long>& ks,
                                double c_min) {
  const RadiusConfig cfg(c.r0, c);
  const ModelParams params(c.p, cfg.l_min() + 1.0);
  const Complex w = std::polar(1.5 * c.r0, 0.3);
  CheckResult res;
  res.name = "divergence_t1";
  res.samples = static_cast<int>(ks.size());
  double worst = 1e300;
  for (long K : ks) {
    const double step = partial_sum(w, 1.0, params, 10 * K) - partial_sum(w, 1.0, params, K);
    res.metrics.emplace_back("increment_K" + std::to_string(K), step);
    worst = std::min(worst, step);
  }
  res.metrics.emplace_back("c_min", c_min);
  res.pass = worst >= c_min;
  res.detail = "S_{10K} - S_K at t = 1";
  return res;
}

} // namespace hypdim
