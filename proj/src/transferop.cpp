#include "hypdim/transferop.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hypdim/numerics.hpp"

namespace hypdim {

namespace {

constexpr long kMaxK = 1L << 22;
constexpr double kLogTwoPi = 1.8378770664093453;

// A preimage of w at real index sigma * x (x >= 0), possibly far out, where x
// is supplied through log x.
struct Preimage {
  double log_deriv;  // log |(log phi_l)'(xi)|
  double log_abs_z;
  double arg_z;
};

Preimage preimage_at(double u, double theta, double sigma, double log_x, const ModelParams& params) {
  const double p = params.p();
  const double l = params.l();
  Complex log_xi;
  double log_abs_xi;
  if (log_x <= 30.0) {
    const double x = std::exp(log_x);
    const Complex xi(u, theta + sigma * kTwoPi * x);
    log_xi = principal_log(xi);
    log_abs_xi = log_xi.real();
  } else {
    log_abs_xi = kLogTwoPi + log_x;
    log_xi = Complex(log_abs_xi, sigma * 0.5 * kPi);
  }
  const Complex s = principal_pow(log_xi, 1.0 / (1.0 + p));
  double log_ratio = 0.0;
  if (l != 0.0) {
    log_ratio = -std::log(std::abs(1.0 + l * std::exp(-s)));
  }
  Preimage out;
  out.log_deriv = log_ratio - std::log1p(p) - (p / (1.0 + p)) * std::log(std::abs(log_xi)) -
                  log_abs_xi;
  if (s.real() > kExpThreshold) {
    out.log_abs_z = s.real();
    out.arg_z = wrap_angle(s.imag());
  } else {
    const Complex z = std::exp(s) + l;
    out.log_abs_z = std::log(std::abs(z));
    out.arg_z = std::arg(z);
  }
  return out;
}

Preimage preimage_k(double u, double theta, long k, const ModelParams& params) {
  if (k == 0) {
    const Complex xi(u, theta);
    const Complex d = log_phi_l_deriv(xi, params);
    const Complex z = phi(xi, params);
    return {std::log(std::abs(d)), std::log(std::abs(z)), std::arg(z)};
  }
  const double sigma = k > 0 ? 1.0 : -1.0;
  return preimage_at(u, theta, sigma, std::log(static_cast<double>(std::labs(k))), params);
}

struct TailNode {
  double weight;  // already multiplied by the term value
  double log_abs_z;
  double arg_z;
};

struct TailResult {
  double value = 0.0;
  double bound = 0.0;
  long evals = 0;
  std::vector<TailNode> nodes;  // filled when requested
};

// Far remainder of the majorant beyond abscissa exp(log_x), both signs.
double log_far_majorant(double log_x, double t, double p) {
  return -std::log(kPi) - t * std::log1p(p) - std::log(t - 1.0) + (1.0 - t) * (kLogTwoPi + log_x);
}

// Integral of the interpolated terms over |x| > K + 1/2 plus the midpoint
// Euler-Maclaurin correction g'(K + 1/2)/24 on each side.
TailResult tail_integral(double u, double theta, long K, double t, const ModelParams& params,
                         double eps, bool keep_nodes) {
  const double p = params.p();
  const double x0 = static_cast<double>(K) + 0.5;
  const double L0 = std::log(x0);
  TailResult out;

  const double target = std::log(1e-3 * eps);
  double S = (log_far_majorant(L0, t, p) - target) / (t - 1.0);
  S = std::clamp(S, 1.0, 20000.0);
  const double far = std::exp(log_far_majorant(L0 + S, t, p));

  std::vector<std::pair<double, double>> panels;
  for (double a = 0.0; a < S;) {
    const double width = std::clamp(0.25 * a, 0.5, 4.0 / (t - 1.0));
    const double b = std::min(S, a + width);
    panels.emplace_back(a, b);
    a = b;
  }

  using namespace num::detail;
  num::CompensatedSum total;
  double quad_err = 0.0;
  for (const double sigma : {1.0, -1.0}) {
    auto g = [&](double x) {
      return std::exp(t * preimage_at(u, theta, sigma, std::log(x), params).log_deriv);
    };
    const double c = (g(x0 + 0.25) - g(x0 - 0.25)) / 0.5 / 24.0;
    total.add(c);
    out.bound += std::abs(c);
    out.evals += 2;
    if (keep_nodes) {
      const Preimage at = preimage_at(u, theta, sigma, L0, params);
      out.nodes.push_back({c, at.log_abs_z, at.arg_z});
    }
    for (const auto& [a, b] : panels) {
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      double kron = 0.0;
      double gauss = 0.0;
      for (int j = 0; j < 15; ++j) {
        const int idx = j < 7 ? j : (j == 7 ? 7 : 14 - j);
        const double node = j < 7 ? -kKronrodNodes[j] : (j == 7 ? 0.0 : kKronrodNodes[14 - j]);
        const double s = mid + half * node;
        const double log_x = L0 + s;
        const Preimage pre = preimage_at(u, theta, sigma, log_x, params);
        const double f = std::exp(t * pre.log_deriv + log_x);
        const double wk = kKronrodWeights[idx] * half;
        kron += wk * f;
        if (idx % 2 == 1) {  // Gauss nodes, the centre (idx 7) included
          gauss += kGaussWeights[idx / 2] * half * f;
        }
        if (keep_nodes) {
          out.nodes.push_back({wk * f, pre.log_abs_z, pre.arg_z});
        }
        ++out.evals;
      }
      total.add(kron);
      quad_err += std::abs(kron - gauss);
    }
  }
  out.value = total.value();
  out.bound += quad_err + far;
  return out;
}

void check_t(double t) {
  if (!(t > 1.0)) {
    throw DivergenceError("transfer operator diverges for t <= 1");
  }
  if (!std::isfinite(t)) {
    throw DomainError("t must be finite");
  }
}

long initial_K(double u) {
  const double need = std::max(u, std::exp(2.0)) / kTwoPi;
  return std::max(32L, static_cast<long>(std::ceil(need)));
}

struct RowSum {
  num::CompensatedSum sum;
  long K = 0;
};

void extend_direct(RowSum& row, double u, double theta, long K_new, double t, const ModelParams& params,
                   std::vector<TailNode>* nodes) {
  for (long k = row.K + 1; k <= K_new; ++k) {
    for (const long kk : {k, -k}) {
      const Preimage pre = preimage_k(u, theta, kk, params);
      const double term = std::exp(t * pre.log_deriv);
      row.sum.add(term);
      if (nodes) {
        nodes->push_back({term, pre.log_abs_z, pre.arg_z});
      }
    }
  }
  row.K = K_new;
}

struct Evaluated {
  double partial;
  TailResult tail;
  long K;
};

Evaluated evaluate(double u, double theta, double t, const ModelParams& params, double eps_abs,
                   double eps_rel, std::vector<TailNode>* nodes) {
  RowSum row;
  const Preimage p0 = preimage_k(u, theta, 0, params);
  row.sum.add(std::exp(t * p0.log_deriv));
  if (nodes) {
    nodes->push_back({std::exp(t * p0.log_deriv), p0.log_abs_z, p0.arg_z});
  }
  long K = initial_K(u);
  extend_direct(row, u, theta, K, t, params, nodes);
  for (;;) {
    const double partial = row.sum.value();
    const double eps = eps_abs > 0.0 ? eps_abs : eps_rel * partial;
    TailResult tail = tail_integral(u, theta, K, t, params, eps, nodes != nullptr);
    if (tail.bound <= eps || 2 * K > kMaxK) {
      if (nodes) {
        nodes->insert(nodes->end(), tail.nodes.begin(), tail.nodes.end());
      }
      return {partial, std::move(tail), K};
    }
    K *= 2;
    extend_direct(row, u, theta, K, t, params, nodes);
  }
}

} // namespace

Complex preimage_xi(Complex w, long k) {
  if (w == Complex(0.0, 0.0)) {
    throw DomainError("preimage_xi: w must be nonzero");
  }
  return {std::log(std::abs(w)), wrap_angle(std::arg(w)) + kTwoPi * static_cast<double>(k)};
}

double tail_bound(double u, long K, double t, double p) {
  check_t(t);
  if (!(p > 0.0)) {
    throw DomainError("tail_bound: p must be positive");
  }
  const double twopiK = kTwoPi * static_cast<double>(K);
  if (K < 1 || twopiK < std::max(u, std::exp(2.0))) {
    throw DomainError("tail_bound: need 2 pi K >= max(u, e^2)");
  }
  const double c = std::pow(1.0 / (1.0 + p), t);
  return c * std::pow(twopiK, 1.0 - t) / (kPi * (t - 1.0)) + 2.0 * c * std::pow(twopiK + kPi, -t);
}

double model_term(Complex w, long k, double t, const ModelParams& params) {
  return std::pow(std::abs(log_phi_l_deriv(preimage_xi(w, k), params)), t);
}

double partial_sum(Complex w, double t, const ModelParams& params, long K) {
  if (!(t > 0.0)) {
    throw DomainError("partial_sum: t must be positive");
  }
  const double u = std::log(std::abs(w));
  const double theta = wrap_angle(std::arg(w));
  RowSum row;
  row.sum.add(std::exp(t * preimage_k(u, theta, 0, params).log_deriv));
  extend_direct(row, u, theta, K, t, params, nullptr);
  return row.sum.value();
}

TransferValue transfer_model(Complex w, double t, const ModelParams& params, const RadiusConfig& cfg,
                             double eps_tail) {
  check_t(t);
  if (!(std::abs(w) > cfg.r())) {
    throw DomainError("transfer_model: need |w| > r");
  }
  const double u = std::log(std::abs(w));
  const double theta = wrap_angle(std::arg(w));
  const Evaluated ev = evaluate(u, theta, t, params, eps_tail, 1e-8, nullptr);
  TransferValue out;
  out.value = ev.partial + ev.tail.value;
  out.tail_bound = ev.tail.bound;
  out.K = ev.K;
  out.terms = 2 * ev.K + 1 + ev.tail.evals;
  if (!(out.tail_bound < 1e-3 * out.value)) {
    throw std::runtime_error("transfer_model: truncation tail not resolved");
  }
  return out;
}

EntireTransferValue transfer_entire(Complex w, double t, const ModelParams& params,
                                    const CalibratedConstants& constants, const RadiusConfig& cfg,
                                    double eps_tail, int refine_budget, double quad_tol) {
  const TransferValue base = transfer_model(w, t, params, cfg, eps_tail);
  EntireTransferValue out;
  static_cast<TransferValue&>(out) = base;
  if (refine_budget <= 0) {
    return out;
  }
  num::CompensatedSum delta;
  const double abs_w = std::abs(w);
  for (int n = 0; n < refine_budget; ++n) {
    const long k = n == 0 ? 0 : ((n % 2 == 1) ? (n + 1) / 2 : -(n / 2));
    const Complex xi = preimage_xi(w, k);
    const double model = model_term(w, k, t, params);
    try {
      const Complex seed = phi(xi, params);
      const RefinedPreimage rp = refine_preimage(w, seed, params, constants, quad_tol);
      if (!rp.converged || !(rp.residual <= 1e-8)) {
        throw std::runtime_error("not converged");
      }
      const double norm_deriv = std::abs(rp.at.deriv) * std::abs(rp.z) / abs_w;
      delta.add(std::pow(norm_deriv, -t) - model);
      ++out.refined;
    } catch (const std::exception&) {
      ++out.fallbacks;
    }
  }
  out.value += delta.value();
  out.refined_fraction = static_cast<double>(out.refined) / static_cast<double>(refine_budget);
  if (out.fallbacks > 0) {
    out.uncertainty_factor = std::pow(2.0, t);
  }
  return out;
}

Lattice::Lattice(double u_min_, double u_max_, int nu_, int nv_)
    : u_min(u_min_), u_max(u_max_), nu(nu_), nv(nv_) {
  if (!(u_max > u_min) || nu < 2 || nv < 2) {
    throw DomainError("Lattice: need u_max > u_min, nu >= 2, nv >= 2");
  }
}

double Lattice::u(int i) const { return u_min + (u_max - u_min) * i / (nu - 1); }

double Lattice::v(int j) const { return -kPi + kTwoPi * (j + 1) / nv; }

Complex Lattice::node(int i, int j) const { return std::polar(std::exp(u(i)), v(j)); }

Lattice default_lattice(const RadiusConfig& cfg, int nu, int nv) {
  return {cfg.log_r(), cfg.log_r() + 40.0, nu, nv};
}

namespace {

struct Stencil {
  std::array<std::size_t, 4> idx;
  std::array<double, 4> w;
};

Stencil bilinear(const Lattice& lat, double u, double v, double delta) {
  double scale = 1.0;
  double fu;
  int i0;
  if (u <= lat.u_min) {
    i0 = 0;
    fu = 0.0;
  } else if (u >= lat.u_max) {
    i0 = lat.nu - 2;
    fu = 1.0;
    scale = std::pow(lat.u_max / u, delta);
  } else {
    const double q = (u - lat.u_min) / (lat.u_max - lat.u_min) * (lat.nu - 1);
    i0 = std::min(static_cast<int>(q), lat.nu - 2);
    fu = q - i0;
  }
  const double dv = kTwoPi / lat.nv;
  double q = (wrap_angle(v) + kPi) / dv - 1.0;
  q -= lat.nv * std::floor(q / lat.nv);
  int j0 = static_cast<int>(q);
  const double fv = q - j0;
  j0 %= lat.nv;
  const int j1 = (j0 + 1) % lat.nv;
  Stencil s;
  s.idx = {lat.index(i0, j0), lat.index(i0, j1), lat.index(i0 + 1, j0), lat.index(i0 + 1, j1)};
  s.w = {(1 - fu) * (1 - fv) * scale, (1 - fu) * fv * scale, fu * (1 - fv) * scale, fu * fv * scale};
  return s;
}

} // namespace

GridFunction GridFunction::constant(const Lattice& lattice, double value, double delta) {
  GridFunction h;
  h.lattice = lattice;
  h.values.assign(lattice.size(), value);
  h.delta = delta;
  return h;
}

double GridFunction::at(double u, double v) const {
  const Stencil s = bilinear(lattice, u, v, delta);
  double out = 0.0;
  for (int q = 0; q < 4; ++q) {
    out += s.w[q] * values[s.idx[q]];
  }
  return out;
}

GridOperator::GridOperator(const Lattice& lattice, double t, const ModelParams& params,
                           const GridOperatorOptions& options)
    : lattice_(lattice), t_(t) {
  check_t(t);
  const std::size_t n = lattice.size();
  if (n >= (1ULL << 32)) {
    throw DomainError("GridOperator: lattice too large");
  }
  const double delta = 0.5 * (t - 1.0);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
  std::vector<double> rel_tail(n, 0.0);
  num::parallel_for(n, options.workers, [&](std::size_t r) {
    const int i = static_cast<int>(r / lattice.nv);
    const int j = static_cast<int>(r % lattice.nv);
    std::vector<TailNode> nodes;
    const Evaluated ev = evaluate(lattice.u(i), lattice.v(j), t, params, 0.0, options.rel_tail, &nodes);
    rel_tail[r] = ev.tail.bound / (ev.partial + ev.tail.value);
    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.reserve(4 * nodes.size());
    for (const TailNode& nd : nodes) {
      const Stencil s = bilinear(lattice, nd.log_abs_z, nd.arg_z, delta);
      for (int q = 0; q < 4; ++q) {
        if (s.w[q] != 0.0) {
          entries.emplace_back(static_cast<std::uint32_t>(s.idx[q]), nd.weight * s.w[q]);
        }
      }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& row = rows[r];
    for (std::size_t q = 0; q < entries.size();) {
      num::CompensatedSum acc;
      const std::uint32_t col = entries[q].first;
      for (; q < entries.size() && entries[q].first == col; ++q) {
        acc.add(entries[q].second);
      }
      row.emplace_back(col, std::max(0.0, acc.value()));
    }
  });
  row_start_.reserve(n + 1);
  row_start_.push_back(0);
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& [c, w] : rows[r]) {
      cols_.push_back(c);
      weights_.push_back(w);
    }
    row_start_.push_back(cols_.size());
    max_rel_tail_ = std::max(max_rel_tail_, rel_tail[r]);
  }
}

GridFunction GridOperator::apply(const GridFunction& h, unsigned workers) const {
  if (h.values.size() != lattice_.size() || h.lattice.nu != lattice_.nu || h.lattice.nv != lattice_.nv) {
    throw DomainError("GridOperator::apply: lattice mismatch");
  }
  GridFunction out;
  out.lattice = lattice_;
  out.delta = delta();
  out.values.assign(lattice_.size(), 0.0);
  num::parallel_for(lattice_.size(), workers, [&](std::size_t r) {
    num::CompensatedSum acc;
    for (std::size_t q = row_start_[r]; q < row_start_[r + 1]; ++q) {
      acc.add(weights_[q] * h.values[cols_[q]]);
    }
    out.values[r] = acc.value();
  });
  return out;
}

std::vector<double> GridOperator::row_sums() const {
  std::vector<double> out(lattice_.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    num::CompensatedSum acc;
    for (std::size_t q = row_start_[r]; q < row_start_[r + 1]; ++q) {
      acc.add(weights_[q]);
    }
    out[r] = acc.value();
  }
  return out;
}

GridFunction apply_operator_grid(const GridFunction& h, double t, const ModelParams& params,
                                 const RadiusConfig& cfg, unsigned workers) {
  if (h.lattice.u_min < cfg.log_r() - 1e-12) {
    throw DomainError("apply_operator_grid: lattice must lie in |w| >= r");
  }
  GridOperatorOptions opts;
  opts.workers = workers;
  return GridOperator(h.lattice, t, params, opts).apply(h, workers);
}

} // namespace hypdim
