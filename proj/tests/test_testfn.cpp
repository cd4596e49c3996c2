#include "doctest.h"

#include "thick/errors.hpp"
#include "thick/testfn.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace thick;

namespace {

// Composite Simpson rule, independent of the library quadrature.
double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 4000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

double central_difference(const ThickTestFunction& phi, double x, double h = 1e-5) {
  return (phi(x + h) - phi(x - h)) / (2 * h);
}

std::vector<ThickTestFunction> builtin_functions() {
  return {
      plateau_bump(1.0),
      plateau_bump(0.7, 0.25),
      thick_monomial(0, {1, 0}, 1.0),
      thick_monomial(1, {1, -1}, 1.2),
      thick_monomial(-2, {1, 1}, 1.0),
      thick_monomial(-1, {2, Rational(-1, 3)}, 0.9),
      thick_monomial(3, {Rational(1, 2), 5}, 1.5, -0.5),
      from_polynomial({1, -2, 3}, 1.0),
      from_polynomial({0, 0, 0, 1}, 2.0),
      multiply_by(heaviside_multiplier(), from_polynomial({2, 1}, 1.0)),
      product(thick_monomial(1, {1, 1}, 1.0), thick_monomial(-1, {3, 2}, 0.8)),
      sum(plateau_bump(1.0), thick_monomial(2, {1, -4}, 0.6)),
  };
}

// Points off the plateau and away from the thick point, inside the support.
std::vector<double> transition_points(const ThickTestFunction& phi, int count) {
  std::vector<double> xs;
  const double a = phi.thick_point(), R = phi.support_radius();
  for (int i = 0; i < count; ++i) {
    const double r = R * (0.52 + 0.46 * (i / 2) / std::max(1, count / 2 - 1));
    xs.push_back(a + (i % 2 ? -r : r));
  }
  return xs;
}

// Coefficients c_0..c_3 of the cubic through four points (Gaussian elimination).
std::vector<double> interpolating_cubic(const std::vector<double>& xs, const std::vector<double>& ys) {
  double m[4][5];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[i][j] = std::pow(xs[i], j);
    m[i][4] = ys[i];
  }
  for (int c = 0; c < 4; ++c) {
    int best = c;
    for (int i = c + 1; i < 4; ++i)
      if (std::abs(m[i][c]) > std::abs(m[best][c])) best = i;
    for (int j = 0; j < 5; ++j) std::swap(m[c][j], m[best][j]);
    for (int i = 0; i < 4; ++i) {
      if (i == c) continue;
      const double f = m[i][c] / m[c][c];
      for (int j = c; j < 5; ++j) m[i][j] -= f * m[c][j];
    }
  }
  std::vector<double> out(4);
  for (int i = 0; i < 4; ++i) out[i] = m[i][4] / m[i][i];
  return out;
}

}  // namespace

TEST_CASE("plateau bump") {
  const auto phi = plateau_bump(2.0, 1.0);
  CHECK(phi(1.0) == 1.0);
  CHECK(phi.at(Side::plus, 1e-9) == 1.0);
  CHECK(phi.at(Side::minus, 1e-9) == 1.0);
  CHECK(phi.expansion() == Expansion::constant(1));
  CHECK(phi.plateau_radius() == 1.0);
  CHECK(phi(3.0) == 0.0);
  CHECK(phi(-1.0) == 0.0);
  CHECK(phi(5.0) == 0.0);
  const double integral = simpson([&](double x) { return phi(x); }, -1.0, 3.0);
  CHECK(integral > 2.0);
  CHECK(integral < 4.0);
  CHECK_THROWS_AS(plateau_bump(0.0), DomainError);
  CHECK_THROWS_AS(plateau_bump(-1.0), DomainError);
}

TEST_CASE("plateau bump is monotone across the transition") {
  const auto phi = plateau_bump(1.0);
  double previous = 1.0;
  for (int i = 0; i <= 200; ++i) {
    const double r = 0.5 + 0.5 * i / 200.0;
    const double v = phi.at(Side::plus, r);
    CHECK(v <= previous);
    CHECK(v == phi.at(Side::minus, r));
    previous = v;
  }
  // Symmetric transition: chi(3R/4) = 1/2.
  CHECK(phi.at(Side::plus, 0.75) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("thick monomials") {
  const auto h = thick_monomial(0, {1, 0}, 1.0);
  CHECK(h.expansion().coeff(0) == SpherePair(1, 0));
  CHECK(h(0.2) == 1.0);
  CHECK(h(-0.2) == 0.0);
  CHECK_THROWS_AS(h(0.0), DomainError);

  const auto x = thick_monomial(1, {1, -1}, 1.0);
  CHECK(x(0.3) == doctest::Approx(0.3));
  CHECK(x(-0.3) == doctest::Approx(-0.3));
  CHECK(x.is_ordinary());

  const auto inv = thick_monomial(-2, {1, 1}, 1.0);
  CHECK(inv.expansion().start() == -2);
  CHECK(inv(0.1) == doctest::Approx(100.0));
  CHECK_THROWS_AS(inv(0.0), DomainError);
  CHECK(!inv.is_old_style());
  CHECK_THROWS_AS(thick_monomial(1, {1, 1}, 0.0), DomainError);
}

TEST_CASE("from polynomial") {
  const auto one = from_polynomial({1}, 1.0);
  const auto bump = plateau_bump(1.0);
  CHECK(one.expansion() == bump.expansion());
  const auto x2 = from_polynomial({0, 0, 1}, 1.0);
  const auto m2 = thick_monomial(2, {1, 1}, 1.0);
  const auto x3 = from_polynomial({0, 0, 0, 1}, 1.0);
  const auto m3 = thick_monomial(3, {1, -1}, 1.0);
  CHECK(x2.expansion() == m2.expansion());
  CHECK(x3.expansion() == m3.expansion());
  for (double t = -1.1; t <= 1.1; t += 0.0737) {
    CHECK(one(t) == doctest::Approx(bump(t)).epsilon(1e-15));
    CHECK(x2(t) == doctest::Approx(m2(t)).epsilon(1e-14));
    CHECK(x3(t) == doctest::Approx(m3(t)).epsilon(1e-14));
  }
  CHECK(x3.is_ordinary());
  CHECK(x3.is_old_style());
}

TEST_CASE("derivative expansions") {
  const auto abs_x = thick_monomial(1, {1, 1}, 1.0);
  CHECK(derivative(abs_x).expansion() == Expansion::term(0, {1, -1}));
  CHECK(!abs_x.is_ordinary());
  CHECK(derivative(plateau_bump(1.0)).expansion().is_zero());
  CHECK(derivative(plateau_bump(1.0)).support_radius() == 1.0);
}

TEST_CASE("derivative matches centered finite differences") {
  for (const auto& phi : builtin_functions()) {
    const auto d = derivative(phi);
    CHECK(d.expansion() == differentiate(phi.expansion()));
    CHECK(d.support_radius() == phi.support_radius());
    for (double x : transition_points(phi, 20)) {
      CHECK(d(x) == doctest::Approx(central_difference(phi, x)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("derivative matches finite differences near the thick point") {
  // On the plateau side of singular leaves the closed forms must also agree.
  const auto phi = thick_monomial(-1, {2, 3}, 1.0);
  const auto d = derivative(phi);
  for (double x : {0.05, 0.2, -0.1, -0.4}) {
    CHECK(d(x) == doctest::Approx(central_difference(phi, x, 1e-7)).epsilon(1e-6));
  }
}

TEST_CASE("multiply_by") {
  const auto bump = plateau_bump(1.0);
  const auto hb = multiply_by(heaviside_multiplier(), bump);
  CHECK(hb.expansion() == Expansion::term(0, {1, 0}));
  CHECK(hb.support_radius() == 1.0);
  CHECK(hb(0.7) == doctest::Approx(bump(0.7)));
  CHECK(hb(-0.7) == 0.0);

  const auto same = multiply_by(Multiplier(expr::constant(1)), bump);
  CHECK(same.expansion() == bump.expansion());
  for (double t = -1.0; t <= 1.0; t += 0.13) CHECK(same(t) == bump(t));

  const auto hh = multiply_by(heaviside_multiplier(), hb);
  CHECK(hh.expansion() == hb.expansion());
  for (double t = -1.0; t <= 1.0; t += 0.09)
    if (t != 0.0) CHECK(hh(t) == hb(t));

  CHECK_THROWS_AS(multiply_by(heaviside_multiplier(0.5), bump), ThickPointMismatch);
}

TEST_CASE("property: product rule for multiplier products") {
  const std::vector<Multiplier> psis = {heaviside_multiplier(), power_multiplier(1), power_multiplier(3),
                                        Multiplier(expr::sum({expr::constant(2), expr::power(-1, {1, 1})}))};
  for (const auto& psi : psis) {
    for (const auto& phi0 : builtin_functions()) {
      if (phi0.thick_point() != 0.0) continue;
      const auto lhs = derivative(multiply_by(psi, phi0));
      const auto rhs = sum(multiply_by(derivative(psi), phi0), multiply_by(psi, derivative(phi0)));
      CHECK(lhs.expansion() == rhs.expansion());
      for (double x : {-0.93, -0.61, -0.3, -0.07, 0.04, 0.22, 0.55, 0.71, 0.88}) {
        const double l = lhs(x), r = rhs(x);
        CHECK(std::abs(l - r) <= 1e-10 * std::max(1.0, std::abs(l)));
      }
    }
  }
}

TEST_CASE("seminorm") {
  CHECK(seminorm(thick_monomial(2, {1, 1}, 1.0), 3, 0, 0.25) == 0.0);
  CHECK(seminorm(from_polynomial({0, 0, 0, 1}, 1.0), 3, 0, 0.5) == doctest::Approx(1.0).epsilon(1e-10));
  const ThickTestFunction zero(expr::zero());
  CHECK(seminorm(zero, 3, 0, 1.0) == 0.0);
  CHECK(seminorm(zero, 1, 2, 0.5) == 0.0);
  CHECK(seminorm(thick_monomial(2, {1, 1}, 1.0), 2, 0, 0.25) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(seminorm(thick_monomial(2, {1, 1}, 1.0), 1, 0, 0.25), DomainError);
}

TEST_CASE("property: strength of every built-in expansion") {
  for (const auto& phi : builtin_functions()) {
    for (int p = 0; p <= 3; ++p) {
      const auto e = derivative(phi, p).expansion();
      const int M = e.empty() ? 0 : e.last_order();
      const auto profile = remainder_profile(phi, p, M, 0.25, 30);
      CHECK(profile.back() <= 1e-8);
    }
  }
}

TEST_CASE("property: old-style members carry one-sided Taylor data") {
  std::vector<ThickTestFunction> old_style = {
      plateau_bump(1.0), from_polynomial({1, -2, 3}, 1.0), from_polynomial({0, 4, 0, -1}, 0.8),
      thick_monomial(0, {1, 0}, 1.0), multiply_by(heaviside_multiplier(), from_polynomial({2, 1, 1}, 1.0))};
  const double h = 0.01;
  for (const auto& phi : old_style) {
    CHECK(phi.expansion().start() >= 0);
    CHECK(phi.is_old_style());
    for (Side w : {Side::plus, Side::minus}) {
      // One-sided derivatives phi^{(j)}(a +- 0) / j! from the cubic through
      // x = a + w k h, k = 1..4.
      std::vector<double> xs, ys;
      for (int k = 1; k <= 4; ++k) {
        xs.push_back(sign(w) * k * h);
        ys.push_back(phi(phi.thick_point() + xs.back()));
      }
      const auto taylor = interpolating_cubic(xs, ys);
      for (int j = 0; j <= 2; ++j) {
        const double expected = to_double(phi.expansion().coeff(j).at(w)) * (j % 2 && w == Side::minus ? -1 : 1);
        CHECK(std::abs(taylor[j] - expected) <= 1e-5);
      }
    }
  }
}

TEST_CASE("translation and dilation of the argument") {
  const auto phi = thick_monomial(1, {2, 3}, 1.0);
  const auto t = translate_argument(phi, 0.5);
  CHECK(t.thick_point() == 0.5);
  CHECK(t(0.8) == doctest::Approx(phi(0.3)));
  const auto d = dilate_argument(phi, Rational(-2));
  CHECK(d(0.6) == doctest::Approx(phi(-0.3)));
  CHECK(d.support_radius() == doctest::Approx(2.0));
  CHECK(d.expansion() == Expansion::term(1, {Rational(3, 2), 1}));
}
