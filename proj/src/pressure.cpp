#include "hypdim/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hypdim {

std::vector<std::pair<int, int>> base_point_nodes(const Lattice& lattice, int count) {
  if (count < 1) {
    throw DomainError("base_point_nodes: need at least one base point");
  }
  std::vector<std::pair<int, int>> out;
  for (int q = 0; q < count; ++q) {
    const int i = std::clamp((q + 1) * (lattice.nu - 1) / (count + 1), 1, lattice.nu - 2);
    // Alternate around the circle: v near 0, +pi/2, -pi/2, pi, ...
    const double v = (q % 4 == 0) ? 0.0 : (q % 4 == 1) ? 0.5 * kPi : (q % 4 == 2) ? -0.5 * kPi : kPi;
    int j = static_cast<int>(std::lround((v + kPi) / (kTwoPi / lattice.nv))) - 1;
    j = ((j % lattice.nv) + lattice.nv) % lattice.nv;
    out.emplace_back(i, j);
  }
  return out;
}

PressureEstimate pressure_estimate(const GridOperator& op, int n_max,
                                   const std::vector<std::pair<int, int>>& base_points,
                                   unsigned workers) {
  if (n_max < 2) {
    throw DomainError("pressure_estimate: n_max must be at least 2");
  }
  if (base_points.empty()) {
    throw DomainError("pressure_estimate: no base points");
  }
  const Lattice& lat = op.lattice();
  GridFunction h = GridFunction::constant(lat, 1.0, op.delta());
  std::vector<std::vector<double>> slopes;  // slopes[n][b]
  for (int n = 0; n <= n_max; ++n) {
    GridFunction next = op.apply(h, workers);
    std::vector<double> row;
    for (const auto& [i, j] : base_points) {
      const std::size_t idx = lat.index(i, j);
      row.push_back(std::log(next.values[idx] / h.values[idx]));
    }
    slopes.push_back(std::move(row));
    const double top = *std::max_element(next.values.begin(), next.values.end());
    if (!(top > 0.0) || !std::isfinite(top)) {
      throw std::runtime_error("pressure_estimate: iterate degenerated");
    }
    for (double& x : next.values) {
      x /= top;
    }
    h = std::move(next);
  }
  PressureEstimate out;
  out.t = op.t();
  out.n_used = n_max;
  out.operator_rel_tail = op.max_rel_tail();
  std::vector<double> last = slopes[n_max];
  for (std::size_t b = 0; b < base_points.size(); ++b) {
    const auto [i, j] = base_points[b];
    out.per_point.emplace_back(lat.node(i, j), last[b]);
  }
  std::sort(last.begin(), last.end());
  const std::size_t m = last.size();
  out.value = (m % 2 == 1) ? last[m / 2] : 0.5 * (last[m / 2 - 1] + last[m / 2]);
  for (int n = n_max - 2; n <= n_max; ++n) {
    for (double s : slopes[n]) {
      if (!std::isfinite(s)) {
        throw std::runtime_error("pressure_estimate: non-finite ratio");
      }
      out.spread = std::max(out.spread, std::abs(s - out.value));
    }
  }
  return out;
}

PressureEstimate pressure_estimate(double t, const ModelParams& params, const RadiusConfig& cfg,
                                   const PressureOptions& options) {
  const Lattice lat(cfg.log_r(), cfg.log_r() + options.u_span, options.nu, options.nv);
  GridOperatorOptions gopts;
  gopts.rel_tail = options.rel_tail;
  gopts.workers = options.workers;
  const GridOperator op(lat, t, params, gopts);
  return pressure_estimate(op, options.n_max, base_point_nodes(lat, options.base_points),
                           options.workers);
}

constexpr double kMinBracket = 1e-9;

DimEstimate bowen_zero(const ModelParams& params, const RadiusConfig& cfg, const BowenOptions& options) {
  if (!(options.t_lo > 1.0 && options.t_hi > options.t_lo)) {
    throw DomainError("bowen_zero: need 1 < t_lo < t_hi");
  }
  if (!(options.tol_t > 0.0)) {
    throw DomainError("bowen_zero: tol_t must be positive");
  }
  auto P = [&](double t) { return pressure_estimate(t, params, cfg, options.pressure); };
  double lo = options.t_lo;
  double hi = options.t_hi;
  PressureEstimate p_lo = P(lo);
  if (!(p_lo.value > 0.0)) {
    std::ostringstream os;
    os << "bowen_zero: P(" << lo << ") = " << p_lo.value << " is not positive; lower t_lo";
    throw BracketError(os.str(), true);
  }
  PressureEstimate p_hi = P(hi);
  if (!(p_hi.value < 0.0)) {
    std::ostringstream os;
    os << "bowen_zero: P(" << hi << ") = " << p_hi.value << " is not negative; raise t_hi";
    throw BracketError(os.str(), false);
  }
  DimEstimate out;
  out.method = "bowen";
  // Bisect until the bracket is below tol_t and the midpoint residual is
  // within tol_P plus the pressure spread there.
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    const PressureEstimate pm = P(mid);
    if (std::abs(pm.value) <= pm.spread) {
      out.noise_dominated = true;
    }
    const bool narrow = hi - lo <= options.tol_t;
    if ((narrow && std::abs(pm.value) <= options.tol_P + pm.spread) || hi - lo <= kMinBracket) {
      out.value = mid;
      out.residual = std::abs(pm.value);
      out.spread = pm.spread;
      break;
    }
    if (pm.value > 0.0) {
      lo = mid;
      p_lo = pm;
    } else {
      hi = mid;
      p_hi = pm;
    }
  }
  out.lo = lo;
  out.hi = hi;
  out.slope = (p_hi.value - p_lo.value) / (hi - lo);
  return out;
}

SweepReport hypdim_sweep(const std::vector<double>& l_values, double p, const RadiusConfig& cfg,
                         double Kcal, const BowenOptions& options) {
  SweepReport report;
  for (const double l : l_values) {
    SweepRow row;
    row.l = l;
    try {
      if (l < cfg.l_min()) {
        throw DomainError("l below the disjoint-type threshold");
      }
      const ModelParams params(p, l);
      BowenOptions opts = options;
      for (;;) {
        try {
          row.estimate = bowen_zero(params, cfg, opts);
          break;
        } catch (const BracketError& e) {
          const double next = 1.0 + 0.5 * (opts.t_lo - 1.0);
          if (!e.low_side() || next - 1.0 < 2e-3) {
            throw;
          }
          opts.t_lo = next;
        }
      }
      row.t_lo_used = opts.t_lo;
      const DimEstimate& d = *row.estimate;
      const double shift = d.value * std::log(Kcal);
      const double slope = std::abs(d.slope) > 0.0 ? std::abs(d.slope) : 1.0;
      row.band_lo = std::max(1.0, d.lo - shift / slope);
      row.band_hi = d.hi + shift / slope;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  std::ostringstream os;
  const SweepRow* prev = nullptr;
  for (const SweepRow& row : report.rows) {
    if (!row.estimate) {
      os << "l = " << row.l << ": failed (" << row.error << ")\n";
      continue;
    }
    const DimEstimate& d = *row.estimate;
    os << "l = " << row.l << ": h = " << d.value << " in [" << d.lo << ", " << d.hi << "]";
    if (prev != nullptr) {
      const DimEstimate& q = *prev->estimate;
      const double tol = (q.hi - q.lo) + (d.hi - d.lo);
      const bool ok = d.value <= q.value + tol;
      report.non_increasing = report.non_increasing && ok;
      os << (ok ? "  (non-increasing)" : "  (INCREASE)");
    }
    os << "\n";
    prev = &row;
  }
  os << (report.non_increasing ? "trend: non-increasing in l within tolerances\n"
                               : "trend: not monotone within tolerances\n");
  report.trend = os.str();
  return report;
}

} // namespace hypdim
