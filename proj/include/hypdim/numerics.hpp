#pragma once

// Small numerical toolbox shared by the modules: compensated summation,
// Gauss-Kronrod (7, 15) quadrature with global adaptive refinement, and a
// deterministic parallel map.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <queue>
#include <span>
#include <vector>

namespace hypdim::num {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }

template <class V>
V zero_value() {
  if constexpr (std::is_arithmetic_v<V>) {
    return V(0);
  } else {
    return V{};
  }
}

template <class V>
struct Estimate {
  V value{};
  double err = 0.0;
  double l1 = 0.0;  // Kronrod estimate of the integral of |f|
};

// Relative rounding floor of a quadrature sum: errors below this multiple of
// the integral of |f| are not resolvable in double precision.
inline constexpr double kRoundoffFloor = 1e-14;

namespace detail {
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (7-point rule).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
} // namespace detail

// One panel of the embedded 7/15-point pair.  err = |K15 - G7|.
template <class V, class F>
Estimate<V> gauss_kronrod15(F&& f, double a, double b) {
  using namespace detail;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const V fc = f(c);
  V kron = fc * kKronrodWeights[7];
  V gauss = fc * kGaussWeights[3];
  double l1 = magnitude(fc) * kKronrodWeights[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const V f1 = f(c - dx);
    const V f2 = f(c + dx);
    const V s = f1 + f2;
    kron = kron + s * kKronrodWeights[j];
    l1 += (magnitude(f1) + magnitude(f2)) * kKronrodWeights[j];
    if (j % 2 == 1) {
      gauss = gauss + s * kGaussWeights[j / 2];
    }
  }
  kron = kron * h;
  gauss = gauss * h;
  return {kron, magnitude(kron - gauss), l1 * std::abs(h)};
}

template <class V>
struct AdaptiveResult {
  V value{};
  double err = 0.0;
  double l1 = 0.0;
  int panels = 0;
  bool converged = false;
};

// Global adaptive quadrature over consecutive intervals [bp[i], bp[i+1]].
// The panel with the largest error is bisected until the summed error is
// below max(abs_tol, kRoundoffFloor * integral of |f|).  Panels at max_depth are frozen.  The final value is summed
// in left-to-right panel order, so results do not depend on refinement order.
template <class V, class F>
AdaptiveResult<V> integrate_adaptive(F&& f, std::span<const double> breakpoints, double abs_tol,
                                     int max_depth = 30, int max_panels = 4000) {
  struct Panel {
    double a, b;
    Estimate<V> est;
    int depth;
    std::size_t id;
  };
  std::vector<Panel> panels;
  auto cmp = [&panels](std::size_t i, std::size_t j) {
    if (panels[i].est.err != panels[j].est.err) {
      return panels[i].est.err < panels[j].est.err;
    }
    return panels[i].id > panels[j].id;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);
  std::vector<bool> live;
  double total_err = 0.0;
  double total_l1 = 0.0;
  auto target = [&] { return std::max(abs_tol, kRoundoffFloor * total_l1); };
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) {
      continue;
    }
    panels.push_back({a, b, gauss_kronrod15<V>(f, a, b), 0, panels.size()});
    live.push_back(true);
    total_err += panels.back().est.err;
    total_l1 += panels.back().est.l1;
    queue.push(panels.size() - 1);
  }
  int live_count = static_cast<int>(panels.size());
  bool converged = total_err <= target();
  while (!converged && !queue.empty() && live_count < max_panels) {
    const std::size_t i = queue.top();
    queue.pop();
    if (panels[i].depth >= max_depth) {
      continue; // frozen
    }
    const Panel parent = panels[i];
    live[i] = false;
    const double m = 0.5 * (parent.a + parent.b);
    for (const auto& [lo, hi] : {std::pair{parent.a, m}, std::pair{m, parent.b}}) {
      panels.push_back({lo, hi, gauss_kronrod15<V>(f, lo, hi), parent.depth + 1, panels.size()});
      live.push_back(true);
      queue.push(panels.size() - 1);
    }
    ++live_count;
    total_err += panels[panels.size() - 2].est.err + panels.back().est.err - parent.est.err;
    total_l1 += panels[panels.size() - 2].est.l1 + panels.back().est.l1 - parent.est.l1;
    converged = total_err <= target();
  }
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < panels.size(); ++k) {
    if (live[k]) {
      order.push_back(k);
    }
  }
  std::sort(order.begin(), order.end(),
            [&panels](std::size_t i, std::size_t j) { return panels[i].a < panels[j].a; });
  AdaptiveResult<V> out;
  out.value = zero_value<V>();
  double err = 0.0;
  double l1 = 0.0;
  for (std::size_t k : order) {
    out.value = out.value + panels[k].est.value;
    err += panels[k].est.err;
    l1 += panels[k].est.l1;
  }
  out.err = err;
  out.l1 = l1;
  converged = err <= std::max(abs_tol, kRoundoffFloor * l1);
  out.panels = static_cast<int>(order.size());
  out.converged = converged;
  return out;
}

// Worker count from HYPDIM_WORKERS, defaulting to the hardware concurrency.
unsigned default_workers();

// Calls fn(i) for i in [0, n) on `workers` threads with a static interleaved
// schedule.  Each index is processed exactly once; if any call throws, the
// exception from the smallest failing index is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

// n points from a to b inclusive with constant ratio.
std::vector<double> geomspace(double a, double b, std::size_t n);
std::vector<double> linspace(double a, double b, std::size_t n);

} // namespace hypdim::num
