#pragma once

// Thick test functions and multipliers as closed expression trees.
//
// Every tree is written in the local coordinate y = x - a about its thick
// point a, so translating a test function only moves `a`. Each node carries,
// computed once at construction:
//   - its exact strong expansion about y = 0,
//   - the plateau radius below which it coincides with that expansion,
//   - its support radius (infinity for multipliers),
//   - whether it is smooth across the thick point ("ordinary").
// Derivatives are taken symbolically on the tree; leaf derivatives are closed
// forms (the cutoff's through Taylor-mode automatic differentiation).

#include "thick/expansion.hpp"

#include <limits>
#include <memory>
#include <optional>
#include <vector>

namespace thick {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class NodeKind {
  zero,
  sided,       // c(w): piecewise constant; H(x) is (1, 0), a constant c is (c, c)
  power,       // c(w) r^j
  polynomial,  // p(y) = sum c_k y^k
  cutoff,      // d^k/dy^k of chi(|y|); chi == 1 on r <= R/2, == 0 on r >= R
  sum,
  product,
  scale,       // s * f
  stretch,     // f(y / c)
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::zero;
  SpherePair pair;                 // sided, power
  int order = 0;                   // power: j; cutoff: derivative order
  double radius = 0.0;             // cutoff: R
  Rational factor;                 // scale: s; stretch: c
  std::vector<Rational> coeffs;    // polynomial
  std::vector<NodePtr> children;   // sum, product, scale, stretch

  Expansion expansion;
  double plateau = kInfinity;
  double support = kInfinity;
  bool ordinary = true;
  std::optional<SpherePair> sided_value;

  double evaluate(double y) const;
};

bool structurally_equal(const Node& a, const Node& b);

namespace expr {

NodePtr zero();
NodePtr sided(SpherePair value);
NodePtr constant(const Rational& c);
NodePtr heaviside();
NodePtr power(int j, SpherePair c);
NodePtr polynomial(std::vector<Rational> coeffs);
NodePtr cutoff(double radius, int derivative_order = 0);
NodePtr sum(std::vector<NodePtr> terms);
NodePtr product(NodePtr a, NodePtr b);
NodePtr scale(const Rational& s, NodePtr f);
NodePtr stretch(const Rational& c, NodePtr f);

NodePtr derivative(const NodePtr& f);

}  // namespace expr

// A member of the thick test-function space: compact support, smooth off the
// thick point, exact strong expansion there.
class ThickTestFunction {
 public:
  explicit ThickTestFunction(NodePtr body, double thick_point = 0.0);

  double thick_point() const { return thick_point_; }
  double support_radius() const { return body_->support; }
  double plateau_radius() const { return body_->plateau; }
  const Expansion& expansion() const { return body_->expansion; }
  const NodePtr& body() const { return body_; }

  // phi(x); zero outside the support. Throws DomainError at x = a unless the
  // one-sided limits exist and agree.
  double operator()(double x) const;
  // phi(a + w r), r > 0.
  double at(Side w, double r) const;

  // Smooth across the thick point (a member of the ordinary test space).
  bool is_ordinary() const { return body_->ordinary; }
  // Bounded with one-sided Taylor data at the thick point (expansion order m >= 0).
  bool is_old_style() const { return expansion().start() >= 0; }

 private:
  NodePtr body_;
  double thick_point_;
};

// A multiplier: smooth off the thick point with an expansion there, support unrestricted.
class Multiplier {
 public:
  explicit Multiplier(NodePtr body, double thick_point = 0.0)
      : body_(std::move(body)), thick_point_(thick_point) {}

  double thick_point() const { return thick_point_; }
  const Expansion& expansion() const { return body_->expansion; }
  const NodePtr& body() const { return body_; }
  bool is_zero() const { return body_->kind == NodeKind::zero; }

  Multiplier at_thick_point(double a) const { return Multiplier(body_, a); }

  friend bool operator==(const Multiplier& a, const Multiplier& b) {
    return a.thick_point_ == b.thick_point_ && structurally_equal(*a.body_, *b.body_);
  }

 private:
  NodePtr body_;
  double thick_point_;
};

ThickTestFunction plateau_bump(double radius, double thick_point = 0.0);
// c(w) r^j chi(r).
ThickTestFunction thick_monomial(int j, SpherePair c, double radius, double thick_point = 0.0);
// p(x - a) chi(|x - a|); coefficients of ascending powers.
ThickTestFunction from_polynomial(std::vector<Rational> coeffs, double radius,
                                  double thick_point = 0.0);

Multiplier heaviside_multiplier(double thick_point = 0.0);
// (x - a)^k.
Multiplier power_multiplier(int k, double thick_point = 0.0);

ThickTestFunction derivative(const ThickTestFunction& phi);
ThickTestFunction derivative(const ThickTestFunction& phi, int times);
Multiplier derivative(const Multiplier& psi);

ThickTestFunction multiply_by(const Multiplier& psi, const ThickTestFunction& phi);
ThickTestFunction product(const ThickTestFunction& a, const ThickTestFunction& b);
ThickTestFunction sum(const ThickTestFunction& a, const ThickTestFunction& b);
ThickTestFunction scaled(const Rational& s, const ThickTestFunction& phi);

// x -> phi(x - c); the thick point moves from a to a + c.
ThickTestFunction translate_argument(const ThickTestFunction& phi, double c);
// x -> phi(x / c); the thick point moves from a to a c.
ThickTestFunction dilate_argument(const ThickTestFunction& phi, const Rational& c);

// Grid lower bound of the seminorm (q >= m)
//   sup_{0<r<=K} sup_{p<=s} r^{-q} |phi^{(p)}(a + w r) - sum_{j=m-p}^{q-1} a_{j,p}(w) r^j|.
double seminorm(const ThickTestFunction& phi, int q, int s, double k_radius);

// r^{-M} |phi^{(p)}(a + w r) - sum_{j<=M} a_{j,p}(w) r^j| maximised over both
// sides, for each r of the dyadic grid r_k = r0 2^{-k}, k = 0..levels-1.
std::vector<double> remainder_profile(const ThickTestFunction& phi, int p, int max_order,
                                      double r0, int levels);

}  // namespace thick
