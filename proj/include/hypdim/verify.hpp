#pragma once

// Sampled invariant checks shared by `hypdim verify` and the acceptance suite.
// Every check draws its sample sequentially from a seeded generator and then
// evaluates it in parallel, so results do not depend on the worker count.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hypdim/tractgeom.hpp"

namespace hypdim {

struct CheckResult {
  std::string name;
  bool pass = false;
  int samples = 0;
  // Named measurements in a fixed order (worst cases, limits, counts).
  std::vector<std::pair<std::string, double>> metrics;
  std::string detail;
};

struct ApproximationCheckOptions {
  int in_samples = 200;
  int off_samples = 200;
  double quad_tol = 1e-10;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

// |E - f| <= C and |E' - f'| <= C on tract samples (|f| > r0, f representable),
// 1/2 <= |E/f|, |E'/f'| <= 2 there, and |E| <= C off G_D.
CheckResult check_approximation(const CalibratedConstants& c, const ApproximationCheckOptions& o);

struct OperatorCheckOptions {
  int pairs = 100;
  int refine_budget = 13;
  double t_min = 1.1;
  double t_max = 2.0;
  double quad_tol = 1e-10;
  std::uint64_t seed = 2;
  unsigned workers = 1;
};

// transfer_entire / transfer_model in [Kcal^-t, Kcal^t] at l = l_min + 1, r = r0.
CheckResult check_operator_ratio(const CalibratedConstants& c, const OperatorCheckOptions& o);

// |phi'(xi + iy)| / |phi'(xi)| in [1/K, K] for Re xi >= log r0, y in [0, 2 pi].
CheckResult check_koebe(const CalibratedConstants& c, int samples, std::uint64_t seed);

// transfer_model(w, t) (log|w|)^exponent over |w| in [r0, w_max] at
// l = l_min + 1: max/min of the product at most ratio_limit.
CheckResult check_decay(const CalibratedConstants& c, int samples, double t = 1.5,
                        double exponent = 0.25, double w_max = 1e6, double ratio_limit = 50.0,
                        unsigned workers = 1);

// At t = 1 the partial sums S_K at w = 1.5 r0 e^{0.3i}, l = l_min + 1 grow
// by at least c_min from K to 10 K for every K in ks.
CheckResult check_divergence_t1(const CalibratedConstants& c, const std::vector<long>& ks,
                                double c_min);

} // namespace hypdim
