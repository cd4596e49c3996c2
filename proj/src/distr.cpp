#include "thick/distr.hpp"

#include "thick/errors.hpp"

#include <algorithm>
#include <cmath>

namespace thick {

bool Exponent::is_integer() const { return is_exact() && thick::is_integer(exact()); }

double Exponent::value() const {
  if (is_exact()) return to_double(exact());
  return std::get<double>(value_);
}

int Exponent::subtraction_limit() const {
  if (is_exact()) return floor(Rational(-exact() - 1)).convert_to<int>();
  return static_cast<int>(std::floor(-value() - 1.0));
}

double ThickDistribution::thick_point() const { return node_->thick_point; }

namespace {

template <class T>
ThickDistribution make(double a, T body) {
  return ThickDistribution(std::make_shared<const DistNode>(DistNode{a, std::move(body)}));
}

bool same_point(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

void require_same_point(double a, double b) {
  if (!same_point(a, b))
    throw ThickPointMismatch("thick points differ: " + format_double(a) + " vs " +
                             format_double(b));
}

bool equal_nodes(const PfDensity& a, const PfDensity& b) {
  return a.density == b.density && a.exponent == b.exponent;
}
bool equal_nodes(const ThickDelta& a, const ThickDelta& b) {
  return a.g == b.g && a.degree == b.degree;
}
bool equal_nodes(const Derivative& a, const Derivative& b) { return a.f == b.f; }
bool equal_nodes(const MultiplierProduct& a, const MultiplierProduct& b) {
  return a.psi == b.psi && a.f == b.f;
}
bool equal_nodes(const LinearCombination& a, const LinearCombination& b) {
  return a.terms == b.terms;
}
bool equal_nodes(const Translate& a, const Translate& b) {
  return a.shift == b.shift && a.f == b.f;
}
bool equal_nodes(const Dilate& a, const Dilate& b) { return a.factor == b.factor && a.f == b.f; }

}  // namespace

bool operator==(const ThickDistribution& a, const ThickDistribution& b) {
  if (a.node_ == b.node_) return true;
  if (a.thick_point() != b.thick_point() || a.node().body.index() != b.node().body.index())
    return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        return equal_nodes(x, std::get<T>(b.node().body));
      },
      a.node().body);
}

ThickDistribution pf_density(SpherePair c, Exponent lambda, double thick_point) {
  return make(thick_point, PfDensity{std::move(c), std::move(lambda)});
}

ThickDistribution pf_power(Exponent lambda, double thick_point) {
  return pf_density({1, 1}, std::move(lambda), thick_point);
}

ThickDistribution pf_heaviside(double thick_point) { return pf_density({1, 0}, 0, thick_point); }

ThickDistribution thick_delta(SphereDistribution g, int q, double thick_point) {
  return make(thick_point, ThickDelta{std::move(g), q});
}

ThickDistribution delta_star(double thick_point) {
  return thick_delta(sphere_measure(), 0, thick_point);
}

bool lambda_outside_unit_interval(const Rational& lambda) { return lambda < 0 || lambda > 1; }

ThickDistribution g_lambda_delta(const Rational& lambda, int q, double thick_point) {
  return thick_delta(g_lambda(lambda), q, thick_point);
}

ThickDistribution d_star(ThickDistribution f) {
  const double a = f.thick_point();
  return make(a, Derivative{std::move(f)});
}

ThickDistribution multiply(Multiplier psi, ThickDistribution f) {
  require_same_point(psi.thick_point(), f.thick_point());
  const double a = f.thick_point();
  return make(a, MultiplierProduct{std::move(psi), std::move(f)});
}

ThickDistribution linear_combination(std::vector<std::pair<Rational, ThickDistribution>> terms,
                                     double thick_point) {
  for (const auto& [c, f] : terms) require_same_point(thick_point, f.thick_point());
  return make(thick_point, LinearCombination{std::move(terms)});
}

ThickDistribution zero_distribution(double thick_point) {
  return linear_combination({}, thick_point);
}

ThickDistribution translate(ThickDistribution f, const Rational& c) {
  const double a = f.thick_point() - to_double(c);
  return make(a, Translate{std::move(f), c});
}

ThickDistribution dilate(ThickDistribution f, const Rational& c) {
  if (c == 0) throw DomainError("dilation factor must be nonzero");
  const double a = f.thick_point() / to_double(c);
  return make(a, Dilate{std::move(f), c});
}

ClassicalDistributionView project(const ThickDistribution& f) {
  return ClassicalDistributionView(f);
}

OldStyleDistributionView project_old(const ThickDistribution& f) {
  return OldStyleDistributionView(f);
}

namespace {

bool is_zero_combination(const ThickDistribution& f) {
  const auto* lc = std::get_if<LinearCombination>(&f.node().body);
  return lc && lc->terms.empty();
}

// Collects scaled terms into `out`, flattening nested combinations.
void append_terms(const Rational& scale, const ThickDistribution& f,
                  std::vector<std::pair<Rational, ThickDistribution>>& out) {
  if (const auto* lc = std::get_if<LinearCombination>(&f.node().body)) {
    for (const auto& [c, g] : lc->terms) append_terms(scale * c, g, out);
    return;
  }
  out.emplace_back(scale, f);
}

ThickDistribution combine(std::vector<std::pair<Rational, ThickDistribution>> terms, double a) {
  std::vector<std::pair<Rational, ThickDistribution>> flat;
  for (const auto& [c, f] : terms)
    if (c != 0) append_terms(c, f, flat);
  // Thick deltas absorb their coefficient; deltas of equal degree merge.
  std::vector<std::pair<Rational, ThickDistribution>> merged;
  for (auto& [c, f] : flat) {
    const auto* delta = std::get_if<ThickDelta>(&f.node().body);
    if (!delta) {
      merged.emplace_back(c, f);
      continue;
    }
    const SpherePair weights = delta->g.weights * c;
    auto same_degree = std::find_if(merged.begin(), merged.end(), [&](const auto& t) {
      const auto* d = std::get_if<ThickDelta>(&t.second.node().body);
      return d && d->degree == delta->degree;
    });
    if (same_degree == merged.end()) {
      merged.emplace_back(1, thick_delta({weights}, delta->degree, a));
    } else {
      const auto& d = std::get<ThickDelta>(same_degree->second.node().body);
      same_degree->second = thick_delta({d.g.weights + weights}, delta->degree, a);
    }
  }
  flat = std::move(merged);
  std::erase_if(flat, [](const auto& t) {
    if (t.first == 0 || is_zero_combination(t.second)) return true;
    const auto* delta = std::get_if<ThickDelta>(&t.second.node().body);
    return delta && delta->g.weights.is_zero();
  });
  if (flat.size() == 1 && flat.front().first == 1) return flat.front().second;
  return linear_combination(std::move(flat), a);
}

ThickDistribution simplify_product(const Multiplier& psi, const ThickDistribution& f) {
  const double a = f.thick_point();
  if (psi.is_zero() || is_zero_combination(f)) return zero_distribution(a);
  if (const auto* pf = std::get_if<PfDensity>(&f.node().body)) {
    if (const auto& sided = psi.body()->sided_value)
      return pf_density(*sided * pf->density, pf->exponent, a);
  }
  if (const auto* delta = std::get_if<ThickDelta>(&f.node().body)) {
    const Expansion& e = psi.expansion();
    if (e.exact()) {
      // <g delta^[q], psi phi> = (1/2) <g, sum_i psi_i a_{q-i}>.
      std::vector<std::pair<Rational, ThickDistribution>> terms;
      for (int i = e.start(); !e.empty() && i <= e.last_order(); ++i) {
        const SpherePair c = e.coeff(i);
        if (c.is_zero()) continue;
        terms.emplace_back(1, thick_delta({delta->g.weights * c}, delta->degree - i, a));
      }
      return combine(std::move(terms), a);
    }
  }
  if (const auto* lc = std::get_if<LinearCombination>(&f.node().body)) {
    std::vector<std::pair<Rational, ThickDistribution>> terms;
    for (const auto& [c, g] : lc->terms) terms.emplace_back(c, simplify_product(psi, g));
    return combine(std::move(terms), a);
  }
  return multiply(psi, f);
}

ThickDistribution simplify_derivative(const ThickDistribution& f) {
  const double a = f.thick_point();
  if (is_zero_combination(f)) return f;
  if (const auto* pf = std::get_if<PfDensity>(&f.node().body)) {
    if (pf->exponent.is_exact() && pf->exponent.exact() == 0) {
      // -F.p. int c(w) phi' = c(1) a_0(1) - c(-1) a_0(-1); with C0 = 2 the weights double.
      const SpherePair& c = pf->density;
      return thick_delta({{2 * c.plus, -2 * c.minus}}, 0, a);
    }
  }
  if (const auto* delta = std::get_if<ThickDelta>(&f.node().body)) {
    // a_{q,1}(w) = w (q+1) a_{q+1}(w), so the weights pick up -(q+1) w.
    const Rational k = delta->degree + 1;
    const SpherePair& g = delta->g.weights;
    if (k == 0) return zero_distribution(a);
    return thick_delta({{-k * g.plus, k * g.minus}}, delta->degree + 1, a);
  }
  if (const auto* mp = std::get_if<MultiplierProduct>(&f.node().body)) {
    const Multiplier dpsi = derivative(mp->psi);
    return combine({{1, simplify_product(dpsi, mp->f)},
                    {1, simplify_product(mp->psi, simplify_derivative(mp->f))}},
                   a);
  }
  if (const auto* lc = std::get_if<LinearCombination>(&f.node().body)) {
    std::vector<std::pair<Rational, ThickDistribution>> terms;
    for (const auto& [c, g] : lc->terms) terms.emplace_back(c, simplify_derivative(g));
    return combine(std::move(terms), a);
  }
  return d_star(f);
}

}  // namespace

ThickDistribution simplify(const ThickDistribution& f) {
  const double a = f.thick_point();
  return std::visit(
      [&](const auto& node) -> ThickDistribution {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, PfDensity> || std::is_same_v<T, ThickDelta>) {
          return f;
        } else if constexpr (std::is_same_v<T, Derivative>) {
          return simplify_derivative(simplify(node.f));
        } else if constexpr (std::is_same_v<T, MultiplierProduct>) {
          return simplify_product(node.psi, simplify(node.f));
        } else if constexpr (std::is_same_v<T, LinearCombination>) {
          std::vector<std::pair<Rational, ThickDistribution>> terms;
          for (const auto& [c, g] : node.terms) terms.emplace_back(c, simplify(g));
          return combine(std::move(terms), a);
        } else if constexpr (std::is_same_v<T, Translate>) {
          ThickDistribution inner = simplify(node.f);
          if (const auto* t = std::get_if<Translate>(&inner.node().body)) {
            const Rational total = t->shift + node.shift;
            return total == 0 ? t->f : translate(t->f, total);
          }
          if (node.shift == 0) return inner;
          return translate(std::move(inner), node.shift);
        } else {
          ThickDistribution inner = simplify(node.f);
          if (node.factor == 1) return inner;
          return dilate(std::move(inner), node.factor);
        }
      },
      f.node().body);
}

}  // namespace thick
