#pragma once

// Transfer operators
//
//   (L_t h)(w) = sum_{g(z) = w} |g'(z)|_1^{-t} h(z),   |g'(z)|_1 = |g'(z)| |z| / |g(z)|,
//
// for the model f_l and for E_l.  For the model the preimages of w are
// z_k = phi_l(xi_k), xi_k = log|w| + i(Arg w + 2 pi k), with terms
// |(log phi_l)'(xi_k)|^t.

#include <cstdint>
#include <vector>

#include "hypdim/cauchy.hpp"
#include "hypdim/corefn.hpp"
#include "hypdim/tractgeom.hpp"

namespace hypdim {

class DivergenceError : public DomainError {
public:
  using DomainError::DomainError;
};

struct TransferValue {
  double value = 0.0;
  double tail_bound = 0.0;
  long K = 0;       // preimage pairs summed directly
  long terms = 0;   // integrand evaluations, direct terms included
};

Complex preimage_xi(Complex w, long k);

// Elementary overestimate of sum_{|k| > K} |(log phi_l)'(xi_k)|^t from the
// term-wise majorant (1/(1+p)) |xi|^{-1} (log|xi|)^{-p/(1+p)}:
//   (1/pi) (1/(1+p))^t (2 pi K)^{1-t} / (t-1) + 2 (1/(1+p))^t (2 pi K + pi)^{-t}.
// Requires t > 1 and 2 pi K >= max(u, e^2).
double tail_bound(double u, long K, double t, double p);

// One model term |(log phi_l)'(xi_k)|^t.
double model_term(Complex w, long k, double t, const ModelParams& params);

// sum_{|k| <= K} of the model terms in ascending |k| order (valid for any t > 0).
double partial_sum(Complex w, double t, const ModelParams& params, long K);

// L_{f_l,t} 1(w).  Direct terms |k| <= K plus the integral of the
// interpolated terms over |k| > K + 1/2 with the midpoint Euler-Maclaurin
// correction.  eps_tail <= 0 selects 1e-8 times the partial value.
TransferValue transfer_model(Complex w, double t, const ModelParams& params, const RadiusConfig& cfg,
                             double eps_tail = 0.0);

struct EntireTransferValue : TransferValue {
  int refined = 0;          // preimages replaced by Newton-refined entire terms
  int fallbacks = 0;        // refinements that failed and kept the model term
  double refined_fraction = 0.0;
  double uncertainty_factor = 1.0;  // multiplicative, 2^t when any fallback occurred
};

// L_{E_l,t} 1(w).  The refine_budget preimages of smallest |k| are refined to
// zeros of E_l - w and use |E_l'(z)|_1^{-t}; deeper preimages keep model terms.
EntireTransferValue transfer_entire(Complex w, double t, const ModelParams& params,
                                    const CalibratedConstants& constants, const RadiusConfig& cfg,
                                    double eps_tail, int refine_budget, double quad_tol = 1e-10);

// Uniform lattice in (u, v) = (log|w|, arg w): u in [u_min, u_max] with nu
// nodes, v_j = -pi + (j + 1) 2 pi / nv, so the last column sits at v = pi.
struct Lattice {
  double u_min = 0.0;
  double u_max = 0.0;
  int nu = 0;
  int nv = 0;

  Lattice() = default;
  Lattice(double u_min, double u_max, int nu, int nv);

  std::size_t size() const { return static_cast<std::size_t>(nu) * nv; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nv + j; }
  double u(int i) const;
  double v(int j) const;
  Complex node(int i, int j) const;
};

// Default working lattice: u in [log r, log r + 40].
Lattice default_lattice(const RadiusConfig& cfg, int nu = 512, int nv = 256);

struct GridFunction {
  Lattice lattice;
  std::vector<double> values;
  double delta = 0.0;  // extension exponent beyond u_max

  static GridFunction constant(const Lattice& lattice, double value, double delta);
  // Bilinear in (u, v), periodic in v, clamped below u_min, and extended by
  // h(u_max, v) (u_max/u)^delta above u_max.
  double at(double u, double v) const;
};

struct GridOperatorOptions {
  double rel_tail = 1e-6;  // tail tolerance relative to the row's partial sum
  unsigned workers = 1;
};

// Sparse matrix of L_t on a lattice: each preimage (direct term or tail
// quadrature node) spreads its weight bilinearly over lattice nodes.
class GridOperator {
public:
  GridOperator(const Lattice& lattice, double t, const ModelParams& params,
               const GridOperatorOptions& options = {});

  const Lattice& lattice() const { return lattice_; }
  double t() const { return t_; }
  double delta() const { return 0.5 * (t_ - 1.0); }
  // Largest per-row quadrature/truncation error bound relative to the row sum.
  double max_rel_tail() const { return max_rel_tail_; }
  std::size_t nonzeros() const { return cols_.size(); }

  GridFunction apply(const GridFunction& h, unsigned workers = 1) const;
  // Row sums: L_t 1 at the lattice nodes.
  std::vector<double> row_sums() const;

private:
  Lattice lattice_;
  double t_;
  double max_rel_tail_ = 0.0;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> weights_;
};

// One application of L_t on a grid function (builds the operator).
GridFunction apply_operator_grid(const GridFunction& h, double t, const ModelParams& params,
                                 const RadiusConfig& cfg, unsigned workers = 1);

} // namespace hypdim
