#pragma once

// Pairing of thick distributions with thick test functions: Hadamard
// finite-part formulas with a split radius A, half-line quadrature over
// S^0 x R_+, and an independent numeric finite-part-of-limit oracle.

#include "thick/distr.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace thick {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_subdivisions = 2000;
  // Split radius A; values at or beyond the support radius R fall back to R / 2.
  double split_radius = 1.0;

  void validate() const;
};

struct SeriesTerm {
  int order;            // expansion order j
  double contribution;  // (c . a_j) A^{lambda+j+1} / (lambda+j+1)
};

struct PairingResult {
  double value = 0.0;
  // Exact value whenever no quadrature was involved (thick deltas and their
  // algebraic descendants).
  std::optional<Rational> exact;
  double split_radius = 0.0;
  double quad_error = 0.0;
  std::vector<SeriesTerm> series_terms;
  double log_term = 0.0;
};

PairingResult pair(const ThickDistribution& f, const ThickTestFunction& phi,
                   const QuadratureConfig& cfg = {});

// Rejects test functions that are not smooth across the thick point.
PairingResult pair(const ClassicalDistributionView& f, const ThickTestFunction& phi,
                   const QuadratureConfig& cfg = {});
// Rejects test functions without one-sided Taylor data (expansion order m < 0).
PairingResult pair(const OldStyleDistributionView& f, const ThickTestFunction& phi,
                   const QuadratureConfig& cfg = {});

// Basis  { eps^{-p} ln^q eps }  for a finite-part fit, plus the constant.
struct FpBasis {
  struct Function {
    double p;  // eps^{-p}
    int q;     // ln^q eps
  };
  std::vector<Function> functions;  // constant term excluded

  // {eps^{-p} ln^q eps : 0 <= p <= max_p, 0 <= q <= max_q, (p,q) != (0,0)} U {eps, eps^2}.
  static FpBasis orders(int max_p, int max_q);
};

struct FpFit {
  double finite_part;
  double residual;
  double condition;
};

using FpSamples = std::vector<std::pair<double, double>>;

inline constexpr double kFpConditionLimit = 1e14;

// Least-squares fit of F(eps) on the basis; the coefficient of the constant
// is the finite part. Throws DomainError on too few samples or an
// ill-conditioned system.
FpFit fp_limit(const FpSamples& samples, const FpBasis& basis);
FpFit fp_limit(const FpSamples& samples, int max_p = 3, int max_q = 1);

// Geometric grid eps_k = 2^{-k}, k = first..last.
std::vector<double> dyadic_grid(int first = 4, int last = 16);

// F.p. lim of the two-sided truncated integral of c(w) r^lambda phi, computed
// without the split-radius formulas: quadrature of F(eps) on a grid, then a
// fit against the divergent, log and vanishing powers the density produces.
FpFit fp_pair_oracle(const PfDensity& f, const ThickTestFunction& phi,
                     const QuadratureConfig& cfg = {},
                     const std::vector<double>& grid = dyadic_grid(4, 14));

}  // namespace thick
