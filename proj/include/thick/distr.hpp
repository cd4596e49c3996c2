#pragma once

// The thick-distribution algebra: a closed tree of constructors, structural
// simplification, and the projections onto classical and one-sided spaces.

#include "thick/testfn.hpp"

#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace thick {

// Exponent of a finite-part density. Exact rationals are classified as
// integer or not by value; floating exponents always take the non-integer route.
class Exponent {
 public:
  Exponent(const Rational& exact) : value_(exact) {}  // NOLINT(implicit)
  Exponent(int exact) : value_(Rational(exact)) {}    // NOLINT(implicit)
  static Exponent floating(double v) { return Exponent(v, 0); }

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  bool is_integer() const;
  const Rational& exact() const { return std::get<Rational>(value_); }
  double value() const;
  // floor(-lambda - 1): the highest expansion order that must be subtracted.
  int subtraction_limit() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent(double v, int) : value_(v) {}
  std::variant<Rational, double> value_;
};

struct DistNode;

class ThickDistribution {
 public:
  explicit ThickDistribution(std::shared_ptr<const DistNode> node) : node_(std::move(node)) {}

  const DistNode& node() const { return *node_; }
  double thick_point() const;

  friend bool operator==(const ThickDistribution& a, const ThickDistribution& b);

 private:
  std::shared_ptr<const DistNode> node_;
};

// Pf(c(w) r^lambda).
struct PfDensity {
  SpherePair density;
  Exponent exponent;
};
// g delta_*^[q].
struct ThickDelta {
  SphereDistribution g;
  int degree;
};
struct Derivative {
  ThickDistribution f;
};
struct MultiplierProduct {
  Multiplier psi;
  ThickDistribution f;
};
struct LinearCombination {
  std::vector<std::pair<Rational, ThickDistribution>> terms;
};
// f(x + c).
struct Translate {
  ThickDistribution f;
  Rational shift;
};
// f(c x).
struct Dilate {
  ThickDistribution f;
  Rational factor;
};

struct DistNode {
  double thick_point;
  std::variant<PfDensity, ThickDelta, Derivative, MultiplierProduct, LinearCombination,
               Translate, Dilate>
      body;
};

// Constructors. Translate moves the thick point a to a - c, Dilate to a / c.
ThickDistribution pf_density(SpherePair c, Exponent lambda, double thick_point = 0.0);
ThickDistribution pf_power(Exponent lambda, double thick_point = 0.0);
ThickDistribution pf_heaviside(double thick_point = 0.0);
ThickDistribution thick_delta(SphereDistribution g, int q, double thick_point = 0.0);
ThickDistribution delta_star(double thick_point = 0.0);
// Weights (2 lambda, 2 (1 - lambda)). Any real lambda is accepted; callers warn
// when lambda_outside_unit_interval().
ThickDistribution g_lambda_delta(const Rational& lambda, int q, double thick_point = 0.0);
ThickDistribution d_star(ThickDistribution f);
ThickDistribution multiply(Multiplier psi, ThickDistribution f);
ThickDistribution linear_combination(std::vector<std::pair<Rational, ThickDistribution>> terms,
                                     double thick_point);
ThickDistribution zero_distribution(double thick_point = 0.0);
ThickDistribution translate(ThickDistribution f, const Rational& c);
ThickDistribution dilate(ThickDistribution f, const Rational& c);

bool lambda_outside_unit_interval(const Rational& lambda);

// Conservative normal form: only the rewrite rules below, applied bottom-up.
//   psi * Pf(c r^l)          -> Pf((psi c) r^l)        psi piecewise constant
//   psi * g delta^[q]        -> sum_i (g psi_i) delta^[q-i]  psi with exact expansion
//   0 * f                    -> 0
//   d*(psi * f)              -> psi' * f + psi * d*(f)
//   d*(g delta^[q])          -> (-(q+1) w g) delta^[q+1]
//   d*(Pf(c r^0))            -> (2c(1), -2c(-1)) delta^[0]   (d* Pf(H) = g_1 delta_*)
//   nested linear combinations flattened, thick deltas of equal degree merged,
//   zero terms dropped, 1 * f unwrapped
//   translate(translate(f, c1), c2) -> translate(f, c1 + c2)
ThickDistribution simplify(const ThickDistribution& f);

// pi: restriction to ordinary test functions.
class ClassicalDistributionView {
 public:
  explicit ClassicalDistributionView(ThickDistribution source) : source_(std::move(source)) {}
  const ThickDistribution& source() const { return source_; }

 private:
  ThickDistribution source_;
};

// pi': restriction to test functions with one-sided Taylor data (order m >= 0).
class OldStyleDistributionView {
 public:
  explicit OldStyleDistributionView(ThickDistribution source) : source_(std::move(source)) {}
  const ThickDistribution& source() const { return source_; }

 private:
  ThickDistribution source_;
};

ClassicalDistributionView project(const ThickDistribution& f);
OldStyleDistributionView project_old(const ThickDistribution& f);

}  // namespace thick
