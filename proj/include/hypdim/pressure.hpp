#pragma once

// Topological pressure P(t) = lim (1/n) log L_t^n 1(w) by iterating the
// lattice operator, the Bowen zero of P by bisection, and the sweep over l.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypdim/transferop.hpp"

namespace hypdim {

struct PressureEstimate {
  double t = 0.0;
  double value = 0.0;
  double spread = 0.0;
  int n_used = 0;
  std::vector<std::pair<Complex, double>> per_point;  // (w0, slope at n_used)
  double operator_rel_tail = 0.0;
};

struct PressureOptions {
  int nu = 512;
  int nv = 256;
  double u_span = 40.0;
  int n_max = 12;
  int base_points = 5;
  double rel_tail = 1e-6;
  unsigned workers = 1;
};

// Lattice nodes used as base points, spread over the interior.
std::vector<std::pair<int, int>> base_point_nodes(const Lattice& lattice, int count);

// Iterates h_0 = 1, h_{n+1} = L h_n (renormalised) and reports the median over
// the base points of log(h_{n+1}(w0) / h_n(w0)) at n = n_max.  The spread is
// the largest deviation from that value over base points and the last three n.
PressureEstimate pressure_estimate(const GridOperator& op, int n_max,
                                   const std::vector<std::pair<int, int>>& base_points,
                                   unsigned workers = 1);

PressureEstimate pressure_estimate(double t, const ModelParams& params, const RadiusConfig& cfg,
                                   const PressureOptions& options);

class BracketError : public DomainError {
public:
  BracketError(const std::string& what, bool low_side) : DomainError(what), low_side_(low_side) {}
  // true when P(t_lo) <= 0, false when P(t_hi) >= 0.
  bool low_side() const { return low_side_; }

private:
  bool low_side_;
};

struct DimEstimate {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string method;     // "bowen" or "boxcount"
  double residual = 0.0;  // |P(value)| for bowen, fit residual for boxcount
  double spread = 0.0;    // pressure spread at value
  bool noise_dominated = false;
  double slope = 0.0;     // dP/dt across the final bracket
};

struct BowenOptions {
  double t_lo = 1.005;
  double t_hi = 1.9;
  double tol_t = 1e-3;
  double tol_P = 1e-2;
  PressureOptions pressure;
};

// Bisection on the sign of P.  Requires P(t_lo) > 0 > P(t_hi).  Stops once the
// bracket is below tol_t and |P| at its midpoint is within tol_P + spread.
DimEstimate bowen_zero(const ModelParams& params, const RadiusConfig& cfg, const BowenOptions& options);

struct SweepRow {
  double l = 0.0;
  std::optional<DimEstimate> estimate;
  double t_lo_used = 0.0;
  // Zero of the entire-corrected pressure lies in [band_lo, band_hi]: P is
  // shifted by at most t log Kcal.
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::string error;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool non_increasing = true;  // within combined tolerances
  std::string trend;
};

// bowen_zero for each l (each must be at least the disjoint-type threshold).
// A failed low-side bracket is widened towards t = 1 before giving up.
SweepReport hypdim_sweep(const std::vector<double>& l_values, double p, const RadiusConfig& cfg,
                         double Kcal, const BowenOptions& options);

} // namespace hypdim
