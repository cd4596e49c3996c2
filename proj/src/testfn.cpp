#include "thick/testfn.hpp"

#include "thick/errors.hpp"

#include <algorithm>
#include <cmath>

namespace thick {

namespace {

// Truncated Taylor series in one variable, coefficients f^{(i)}(t0) / i!.
class Jet {
 public:
  Jet(size_t n, double value, double slope) : c_(n + 1, 0.0) {
    c_[0] = value;
    if (n > 0) c_[1] = slope;
  }

  size_t size() const { return c_.size(); }
  double operator[](size_t i) const { return c_[i]; }

  friend Jet operator+(Jet a, const Jet& b) {
    for (size_t i = 0; i < a.size(); ++i) a.c_[i] += b.c_[i];
    return a;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet q = a;
    for (size_t n = 0; n < a.size(); ++n) {
      double acc = a.c_[n];
      for (size_t i = 1; i <= n; ++i) acc -= b.c_[i] * q.c_[n - i];
      q.c_[n] = acc / b.c_[0];
    }
    return q;
  }
  Jet exp() const {
    Jet e = *this;
    e.c_[0] = std::exp(c_[0]);
    for (size_t n = 1; n < size(); ++n) {
      double acc = 0.0;
      for (size_t k = 1; k <= n; ++k) acc += static_cast<double>(k) * c_[k] * e.c_[n - k];
      e.c_[n] = acc / static_cast<double>(n);
    }
    return e;
  }
  Jet reciprocal() const { return Jet(size() - 1, 1.0, 0.0) / *this; }
  Jet negated() const {
    Jet out = *this;
    for (auto& v : out.c_) v = -v;
    return out;
  }

 private:
  std::vector<double> c_;
};

// k-th derivative of the smooth step S(t) = f(t) / (f(t) + f(1 - t)),
// f(t) = exp(-1/t), for 0 < t < 1.
double smooth_step_derivative(double t, int k) {
  const auto n = static_cast<size_t>(k);
  const Jet rising = Jet(n, t, 1.0).reciprocal().negated().exp();
  const Jet falling = Jet(n, 1.0 - t, -1.0).reciprocal().negated().exp();
  const Jet step = rising / (rising + falling);
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  return step[n] * factorial;
}

double cutoff_value(double radius, int k, double r) {
  const double inner = 0.5 * radius;
  if (r <= inner) return k == 0 ? 1.0 : 0.0;
  if (r >= radius) return 0.0;
  const double t = (r - inner) / inner;
  if (k == 0) return 1.0 - smooth_step_derivative(t, 0);
  return -smooth_step_derivative(t, k) * std::pow(1.0 / inner, k);
}

double side_sign(double y) { return y > 0 ? 1.0 : -1.0; }

std::shared_ptr<Node> make(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

Rational falling_sign(int k) { return k % 2 == 0 ? Rational(1) : Rational(-1); }

}  // namespace

double Node::evaluate(double y) const {
  switch (kind) {
    case NodeKind::zero:
      return 0.0;
    case NodeKind::sided:
      return to_double(y > 0 ? pair.plus : pair.minus);
    case NodeKind::power: {
      const double r = std::abs(y);
      return to_double(y > 0 ? pair.plus : pair.minus) * std::pow(r, order);
    }
    case NodeKind::polynomial: {
      double acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * y + to_double(*it);
      return acc;
    }
    case NodeKind::cutoff: {
      const double v = cutoff_value(radius, order, std::abs(y));
      return order % 2 == 1 ? side_sign(y) * v : v;
    }
    case NodeKind::sum: {
      double acc = 0.0;
      for (const auto& c : children) acc += c->evaluate(y);
      return acc;
    }
    case NodeKind::product: {
      const double first = children[0]->evaluate(y);
      if (first == 0.0) return 0.0;
      return first * children[1]->evaluate(y);
    }
    case NodeKind::scale:
      return to_double(factor) * children[0]->evaluate(y);
    case NodeKind::stretch:
      return children[0]->evaluate(y / to_double(factor));
  }
  return 0.0;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::zero:
      return true;
    case NodeKind::sided:
      return a.pair == b.pair;
    case NodeKind::power:
      return a.order == b.order && a.pair == b.pair;
    case NodeKind::polynomial:
      return a.coeffs == b.coeffs;
    case NodeKind::cutoff:
      return a.order == b.order && a.radius == b.radius;
    case NodeKind::scale:
    case NodeKind::stretch:
      if (a.factor != b.factor) return false;
      [[fallthrough]];
    case NodeKind::sum:
    case NodeKind::product:
      if (a.children.size() != b.children.size()) return false;
      for (size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(*a.children[i], *b.children[i])) return false;
      return true;
  }
  return false;
}

namespace expr {

NodePtr zero() {
  static const NodePtr z = [] {
    auto n = make(NodeKind::zero);
    n->support = 0.0;
    return n;
  }();
  return z;
}

NodePtr sided(SpherePair value) {
  auto n = make(NodeKind::sided);
  n->expansion = Expansion::term(0, value);
  n->ordinary = value.is_even();
  n->sided_value = value;
  n->pair = std::move(value);
  return n;
}

NodePtr constant(const Rational& c) { return sided(SpherePair::constant(c)); }

NodePtr heaviside() { return sided({1, 0}); }

NodePtr power(int j, SpherePair c) {
  if (c.is_zero()) return zero();
  auto n = make(NodeKind::power);
  n->order = j;
  n->expansion = Expansion::term(j, c);
  // c(w) r^j = c(w) w^j y^j is smooth iff c(w) w^j does not depend on w.
  n->ordinary = j >= 0 && c.plus == falling_sign(j) * c.minus;
  n->pair = std::move(c);
  return n;
}

NodePtr polynomial(std::vector<Rational> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  if (coeffs.empty()) return zero();
  auto n = make(NodeKind::polynomial);
  n->expansion = from_taylor(coeffs, /*polynomial=*/true);
  if (coeffs.size() == 1) n->sided_value = SpherePair::constant(coeffs[0]);
  n->coeffs = std::move(coeffs);
  return n;
}

NodePtr cutoff(double radius, int derivative_order) {
  if (!(radius > 0) || !std::isfinite(radius))
    throw DomainError("cutoff radius must be positive and finite");
  auto n = make(NodeKind::cutoff);
  n->radius = radius;
  n->order = derivative_order;
  n->expansion = derivative_order == 0 ? Expansion::constant(1) : Expansion::zero();
  n->plateau = 0.5 * radius;
  n->support = radius;
  return n;
}

NodePtr sum(std::vector<NodePtr> terms) {
  std::erase_if(terms, [](const NodePtr& t) { return t->kind == NodeKind::zero; });
  if (terms.empty()) return zero();
  if (terms.size() == 1) return terms.front();
  auto n = make(NodeKind::sum);
  n->support = 0.0;
  n->sided_value = SpherePair();
  for (const auto& t : terms) {
    n->expansion = add(n->expansion, t->expansion);
    n->plateau = std::min(n->plateau, t->plateau);
    n->support = std::max(n->support, t->support);
    n->ordinary = n->ordinary && t->ordinary;
    if (n->sided_value && t->sided_value)
      *n->sided_value += *t->sided_value;
    else
      n->sided_value.reset();
  }
  n->children = std::move(terms);
  return n;
}

NodePtr product(NodePtr a, NodePtr b) {
  if (a->kind == NodeKind::zero || b->kind == NodeKind::zero) return zero();
  auto n = make(NodeKind::product);
  n->expansion = multiply(a->expansion, b->expansion);
  n->plateau = std::min(a->plateau, b->plateau);
  n->support = std::min(a->support, b->support);
  n->ordinary = a->ordinary && b->ordinary;
  if (a->sided_value && b->sided_value) n->sided_value = *a->sided_value * *b->sided_value;
  n->children = {std::move(a), std::move(b)};
  return n;
}

NodePtr scale(const Rational& s, NodePtr f) {
  if (s == 0 || f->kind == NodeKind::zero) return zero();
  if (s == 1) return f;
  auto n = make(NodeKind::scale);
  n->factor = s;
  n->expansion = f->expansion.scaled(s);
  n->plateau = f->plateau;
  n->support = f->support;
  n->ordinary = f->ordinary;
  if (f->sided_value) n->sided_value = *f->sided_value * s;
  n->children = {std::move(f)};
  return n;
}

NodePtr stretch(const Rational& c, NodePtr f) {
  if (c == 0) throw DomainError("dilation factor must be nonzero");
  if (f->kind == NodeKind::zero) return f;
  if (c == 1) return f;
  auto n = make(NodeKind::stretch);
  n->factor = c;
  // f(y/c) with y = w r: side w maps to w sgn(c), radius r to r/|c|.
  const Rational magnitude = c < 0 ? Rational(-c) : c;
  const Expansion& inner = f->expansion;
  std::vector<SpherePair> coeffs;
  if (!inner.empty()) {
    for (int j = inner.start(); j <= inner.last_order(); ++j) {
      SpherePair a = inner.coeff(j);
      if (c < 0) a = a.reflected();
      coeffs.push_back(a * pow(magnitude, -j));
    }
  }
  std::optional<int> window = inner.reliable_to();
  n->expansion = Expansion(inner.start(), std::move(coeffs), window);
  const double m = to_double(magnitude);
  n->plateau = f->plateau * m;
  n->support = f->support * m;
  n->ordinary = f->ordinary;
  if (f->sided_value) n->sided_value = c < 0 ? f->sided_value->reflected() : *f->sided_value;
  n->children = {std::move(f)};
  return n;
}

NodePtr derivative(const NodePtr& f) {
  switch (f->kind) {
    case NodeKind::zero:
    case NodeKind::sided:
      // Piecewise constants differentiate to zero off the thick point.
      return zero();
    case NodeKind::power: {
      const int j = f->order;
      if (j == 0) return zero();
      return power(j - 1, SpherePair(Rational(j) * f->pair.plus, Rational(-j) * f->pair.minus));
    }
    case NodeKind::polynomial: {
      std::vector<Rational> d;
      for (size_t k = 1; k < f->coeffs.size(); ++k) d.push_back(Rational(static_cast<int>(k)) * f->coeffs[k]);
      return polynomial(std::move(d));
    }
    case NodeKind::cutoff:
      return cutoff(f->radius, f->order + 1);
    case NodeKind::sum: {
      std::vector<NodePtr> terms;
      for (const auto& c : f->children) terms.push_back(derivative(c));
      return sum(std::move(terms));
    }
    case NodeKind::product: {
      const NodePtr& a = f->children[0];
      const NodePtr& b = f->children[1];
      return sum({product(derivative(a), b), product(a, derivative(b))});
    }
    case NodeKind::scale:
      return scale(f->factor, derivative(f->children[0]));
    case NodeKind::stretch:
      return scale(1 / f->factor, stretch(f->factor, derivative(f->children[0])));
  }
  return zero();
}

}  // namespace expr

ThickTestFunction::ThickTestFunction(NodePtr body, double thick_point)
    : body_(std::move(body)), thick_point_(thick_point) {
  if (!std::isfinite(body_->support))
    throw DomainError("a thick test function needs compact support; multiply by a cutoff");
}

double ThickTestFunction::operator()(double x) const {
  const double y = x - thick_point_;
  if (y == 0.0) {
    const Expansion& e = expansion();
    if (e.start() >= 0 && e.coeff(0).is_even()) return to_double(e.coeff(0).plus);
    throw DomainError("test function has no two-sided limit at its thick point");
  }
  if (std::abs(y) >= support_radius()) return 0.0;
  return body_->evaluate(y);
}

double ThickTestFunction::at(Side w, double r) const {
  if (r >= support_radius()) return 0.0;
  return body_->evaluate(sign(w) * r);
}

ThickTestFunction plateau_bump(double radius, double thick_point) {
  return ThickTestFunction(expr::cutoff(radius), thick_point);
}

ThickTestFunction thick_monomial(int j, SpherePair c, double radius, double thick_point) {
  return ThickTestFunction(expr::product(expr::power(j, std::move(c)), expr::cutoff(radius)),
                           thick_point);
}

ThickTestFunction from_polynomial(std::vector<Rational> coeffs, double radius, double thick_point) {
  return ThickTestFunction(
      expr::product(expr::polynomial(std::move(coeffs)), expr::cutoff(radius)), thick_point);
}

Multiplier heaviside_multiplier(double thick_point) {
  return Multiplier(expr::heaviside(), thick_point);
}

Multiplier power_multiplier(int k, double thick_point) {
  if (k < 0) throw DomainError("power multiplier exponent must be non-negative");
  std::vector<Rational> coeffs(static_cast<size_t>(k) + 1);
  coeffs.back() = 1;
  return Multiplier(expr::polynomial(std::move(coeffs)), thick_point);
}

ThickTestFunction derivative(const ThickTestFunction& phi) {
  return ThickTestFunction(expr::derivative(phi.body()), phi.thick_point());
}

ThickTestFunction derivative(const ThickTestFunction& phi, int times) {
  ThickTestFunction out = phi;
  for (int i = 0; i < times; ++i) out = derivative(out);
  return out;
}

Multiplier derivative(const Multiplier& psi) {
  return Multiplier(expr::derivative(psi.body()), psi.thick_point());
}

namespace {

void require_same_point(double a, double b) {
  if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
    throw ThickPointMismatch("thick points differ: " + format_double(a) + " vs " +
                             format_double(b));
}

}  // namespace

ThickTestFunction multiply_by(const Multiplier& psi, const ThickTestFunction& phi) {
  require_same_point(psi.thick_point(), phi.thick_point());
  return ThickTestFunction(expr::product(psi.body(), phi.body()), phi.thick_point());
}

ThickTestFunction product(const ThickTestFunction& a, const ThickTestFunction& b) {
  require_same_point(a.thick_point(), b.thick_point());
  return ThickTestFunction(expr::product(a.body(), b.body()), a.thick_point());
}

ThickTestFunction sum(const ThickTestFunction& a, const ThickTestFunction& b) {
  require_same_point(a.thick_point(), b.thick_point());
  return ThickTestFunction(expr::sum({a.body(), b.body()}), a.thick_point());
}

ThickTestFunction scaled(const Rational& s, const ThickTestFunction& phi) {
  return ThickTestFunction(expr::scale(s, phi.body()), phi.thick_point());
}

ThickTestFunction translate_argument(const ThickTestFunction& phi, double c) {
  return ThickTestFunction(phi.body(), phi.thick_point() + c);
}

ThickTestFunction dilate_argument(const ThickTestFunction& phi, const Rational& c) {
  return ThickTestFunction(expr::stretch(c, phi.body()), phi.thick_point() * to_double(c));
}

namespace {

// Partial sum of the expansion over orders [lo, hi] at radius r.
double partial_sum(const Expansion& e, Side w, double r, int lo, int hi) {
  double acc = 0.0;
  for (int j = hi; j >= lo; --j) {
    const SpherePair c = e.coeff(j);
    if (!c.is_zero()) acc += to_double(c.at(w)) * std::pow(r, j);
  }
  return acc;
}

std::vector<double> seminorm_grid(double k_radius) {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(std::ldexp(k_radius, -i));
  for (int i = 1; i < 64; ++i) grid.push_back(k_radius * i / 64.0);
  return grid;
}

}  // namespace

double seminorm(const ThickTestFunction& phi, int q, int s, double k_radius) {
  if (!(k_radius > 0)) throw DomainError("seminorm radius must be positive");
  if (s < 0) throw DomainError("seminorm derivative order must be non-negative");
  const int m = phi.expansion().start();
  if (!phi.expansion().is_zero() && q < m)
    throw DomainError("seminorm order q must be at least the expansion order m");
  double sup = 0.0;
  ThickTestFunction current = phi;
  for (int p = 0; p <= s; ++p) {
    const Expansion& e = current.expansion();
    if (!e.known(q - 1))
      throw InsufficientOrder("seminorm needs expansion orders through " + std::to_string(q - 1));
    for (double r : seminorm_grid(k_radius)) {
      for (Side w : {Side::plus, Side::minus}) {
        const double remainder = current.at(w, r) - partial_sum(e, w, r, m - p, q - 1);
        sup = std::max(sup, std::abs(remainder) * std::pow(r, -q));
      }
    }
    if (p < s) current = derivative(current);
  }
  return sup;
}

std::vector<double> remainder_profile(const ThickTestFunction& phi, int p, int max_order,
                                      double r0, int levels) {
  const ThickTestFunction d = derivative(phi, p);
  const Expansion& e = d.expansion();
  const int lo = e.start();
  std::vector<double> out;
  for (int k = 0; k < levels; ++k) {
    const double r = std::ldexp(r0, -k);
    double worst = 0.0;
    for (Side w : {Side::plus, Side::minus}) {
      const double remainder = d.at(w, r) - partial_sum(e, w, r, lo, max_order);
      worst = std::max(worst, std::abs(remainder) * std::pow(r, -max_order));
    }
    out.push_back(worst);
  }
  return out;
}

}  // namespace thick
