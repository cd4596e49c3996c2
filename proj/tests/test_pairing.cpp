#include "doctest.h"

#include "thick/errors.hpp"
#include "thick/pairing.hpp"

#include <cmath>
#include <functional>

using namespace thick;

namespace {

double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

// F.p. of the integral from 0 to b of r^s.
double fp_power_integral(double s, double b) { return s == -1.0 ? std::log(b) : std::pow(b, s + 1) / (s + 1); }

// Closed-form pairing of Pf(c r^lambda) with the thick monomial a(w) r^j chi(r):
// the plateau [0, R/2] is done analytically and the transition by Simpson.
double monomial_oracle(SpherePair c, double lambda, int j, SpherePair a, double R) {
  const auto chi = plateau_bump(R);
  const double s = lambda + j;
  const double transition =
      simpson([&](double r) { return std::pow(r, s) * chi.at(Side::plus, r); }, R / 2, R);
  const double weight = to_double(c.plus * a.plus + c.minus * a.minus);
  return weight * (fp_power_integral(s, R / 2) + transition);
}

QuadratureConfig with_split(double A) {
  QuadratureConfig cfg;
  cfg.split_radius = A;
  return cfg;
}

struct MonomialCase {
  SpherePair c;
  Exponent lambda;
  int j;
  SpherePair a;
  double R;
};

std::vector<MonomialCase> monomial_cases() {
  using R = Rational;
  return {
      {{1, 1}, R(-5, 2), 0, {1, 1}, 1.0},       {{1, 1}, R(-5, 2), 1, {1, -1}, 1.0},
      {{1, 1}, R(-5, 2), 1, {2, 1}, 1.5},       {{1, 1}, -2, 0, {1, 1}, 1.0},
      {{1, 1}, -2, 1, {1, 1}, 1.2},             {{1, 0}, -2, 0, {3, 1}, 1.0},
      {{1, 1}, -1, 0, {1, 1}, 1.0},             {{1, 0}, -1, 0, {1, 1}, 0.8},
      {{1, -1}, -1, 1, {1, 1}, 1.0},            {{1, 1}, R(-1, 2), 0, {1, 1}, 1.0},
      {{1, 1}, R(-1, 2), -1, {2, 5}, 1.0},      {{1, 1}, 0, 0, {1, 0}, 1.0},
      {{1, 1}, 0, -2, {1, 1}, 1.0},             {{1, 1}, R(3, 2), -2, {1, 1}, 1.0},
      {{1, 1}, R(3, 2), -3, {1, 2}, 1.3},       {{1, 1}, 3, -3, {1, 1}, 1.0},
      {{2, R(1, 3)}, R(-1, 3), -1, {1, 1}, 1.0}, {{1, 1}, -3, 1, {1, -2}, 1.0},
  };
}

}  // namespace

TEST_CASE("thick delta pairings are exact") {
  const auto phi = sum(thick_monomial(0, {2, 0}, 1.0), plateau_bump(1.0));  // a_0 = (3, 1)
  const auto r = pair(delta_star(), phi);
  CHECK(r.value == 2.0);
  REQUIRE(r.exact);
  CHECK(*r.exact == 2);
  CHECK(r.quad_error == 0.0);

  const auto ordinary = from_polynomial({Rational(7, 3), 1}, 1.0);
  CHECK(pair(delta_star(), ordinary).value == doctest::Approx(7.0 / 3).epsilon(1e-15));
  CHECK(pair(delta_star(), thick_monomial(1, {4, 4}, 1.0)).value == 0.0);
  // q < m: the missing coefficient is the zero pair.
  CHECK(pair(thick_delta(g_one(), 0), thick_monomial(2, {1, 1}, 1.0)).value == 0.0);

  const auto phi2 = thick_monomial(2, {4, 8}, 1.0);
  CHECK(*pair(g_lambda_delta(Rational(1, 4), 2), phi2).exact == 7);
  const auto old = sum(thick_monomial(0, {5, 0}, 1.0), thick_monomial(0, {0, 1}, 1.0));
  CHECK(*pair(g_lambda_delta(1, 0), old).exact == 5);
  CHECK(*pair(g_lambda_delta(Rational(1, 2), 0), old).exact == 3);
}

TEST_CASE("Heaviside derivative gives a_0(+1)") {
  CHECK(pair(d_star(pf_heaviside()), plateau_bump(1.0)).value == doctest::Approx(1.0).epsilon(1e-10));
  const auto phi = sum(thick_monomial(0, {3, 0}, 1.0), thick_monomial(-1, {1, 2}, 0.9));
  CHECK(pair(d_star(pf_heaviside()), phi).value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("Pf |x|^-2 against the plateau bump") {
  const auto bump = plateau_bump(1.0);
  const auto r = pair(pf_power(-2), bump, with_split(0.5));
  const double far = 2 * simpson([&](double x) { return bump.at(Side::plus, x) / (x * x); }, 0.5, 1.0);
  CHECK(r.value == doctest::Approx(far - 4).epsilon(1e-10));
  REQUIRE(r.series_terms.size() == 1);
  CHECK(r.series_terms[0].order == 0);
  CHECK(r.series_terms[0].contribution == doctest::Approx(-4.0));
  CHECK(r.log_term == 0.0);
  CHECK(r.split_radius == 0.5);
  CHECK(r.quad_error >= 0.0);
  const auto oracle = fp_pair_oracle({{1, 1}, -2}, bump);
  CHECK(std::abs(oracle.finite_part - r.value) <= 1e-5);
}

TEST_CASE("pairing against closed forms for thick monomials") {
  for (const auto& c : monomial_cases()) {
    const auto phi = thick_monomial(c.j, c.a, c.R);
    const double expected = monomial_oracle(c.c, c.lambda.value(), c.j, c.a, c.R);
    for (double A : {0.3, 0.5, 1.0}) {
      const auto r = pair(pf_density(c.c, c.lambda), phi, with_split(A));
      CHECK(std::abs(r.value - expected) <= 1e-8 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("log term in the integer case") {
  const auto bump = plateau_bump(1.0);
  const auto r = pair(pf_power(-1), bump, with_split(0.3));
  CHECK(r.log_term == doctest::Approx(2 * std::log(0.3)));
  CHECK(r.series_terms.empty());
  // Floating exponents never take the log branch.
  const auto f = pair(pf_density({1, 1}, Exponent::floating(-1.5)), bump, with_split(0.3));
  CHECK(f.log_term == 0.0);
  CHECK_THROWS_AS(pair(pf_density({1, 1}, Exponent::floating(-1.0)), bump), InvariantViolation);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(pair(delta_star(1.0), plateau_bump(1.0)), ThickPointMismatch);
  QuadratureConfig bad;
  bad.abs_tol = 0;
  CHECK_THROWS_AS(pair(pf_power(-2), plateau_bump(1.0), bad), DomainError);
  bad = {};
  bad.split_radius = -1;
  CHECK_THROWS_AS(pair(pf_power(-2), plateau_bump(1.0), bad), DomainError);
  QuadratureConfig tiny;
  tiny.max_subdivisions = 1;
  tiny.abs_tol = 1e-15;
  CHECK_THROWS_AS(pair(pf_power(Rational(-1, 3)), thick_monomial(1, {1, 1}, 1.0), tiny), QuadratureError);
}

TEST_CASE("split radius at or beyond the support falls back to R/2") {
  const auto bump = plateau_bump(0.8);
  const auto r = pair(pf_power(-2), bump, with_split(2.0));
  CHECK(r.split_radius == doctest::Approx(0.4));
  CHECK(r.value == doctest::Approx(pair(pf_power(-2), bump, with_split(0.3)).value).epsilon(1e-9));
}

TEST_CASE("property: A-independence") {
  const std::vector<ThickTestFunction> phis = {
      plateau_bump(1.2), from_polynomial({1, -1, 2}, 1.1), thick_monomial(-1, {1, 3}, 1.5),
      multiply_by(heaviside_multiplier(), from_polynomial({1, 2}, 1.3)),
      sum(thick_monomial(1, {1, 1}, 1.1), thick_monomial(-2, {2, -1}, 1.4))};
  const std::vector<Exponent> lambdas = {Rational(-5, 2), -2, -1, Rational(3, 2), Rational(-1, 2), 0};
  for (const auto& lambda : lambdas) {
    for (const auto& phi : phis) {
      for (SpherePair c : {SpherePair(1, 1), SpherePair(1, 0), SpherePair(1, -1)}) {
        const auto f = pf_density(c, lambda);
        const double v1 = pair(f, phi, with_split(0.3)).value;
        const double v2 = pair(f, phi, with_split(0.5)).value;
        const double v3 = pair(f, phi, with_split(1.0)).value;
        CHECK(std::abs(v1 - v2) <= 1e-7);
        CHECK(std::abs(v1 - v3) <= 1e-7);
      }
    }
  }
}

TEST_CASE("property: pairing agrees with the finite-part oracle") {
  for (const auto& c : monomial_cases()) {
    if (c.lambda.value() + c.j < -3) continue;
    const auto phi = thick_monomial(c.j, c.a, c.R);
    const PfDensity density{c.c, c.lambda};
    const auto oracle = fp_pair_oracle(density, phi);
    CHECK(std::abs(oracle.finite_part - pair(pf_density(c.c, c.lambda), phi).value) <= 1e-5);
  }
}

TEST_CASE("oracle recovers the log coefficient") {
  const auto bump = plateau_bump(1.0);
  const auto fit = fp_pair_oracle({{1, 0}, -1}, bump);
  const double expected = simpson([&](double r) { return r < 0.5 ? 0.0 : bump.at(Side::plus, r) / r; }, 0.5, 1.0) +
                          std::log(0.5);
  CHECK(fit.finite_part == doctest::Approx(expected).epsilon(1e-7));
  const auto heaviside = fp_pair_oracle({{1, 0}, 0}, bump);
  CHECK(heaviside.finite_part ==
        doctest::Approx(simpson([&](double r) { return bump.at(Side::plus, r); }, 0, 1)).epsilon(1e-9));
}

TEST_CASE("property: convergent exponents give the plain integral") {
  const std::vector<ThickTestFunction> phis = {plateau_bump(1.0), from_polynomial({1, 2, -1}, 0.9),
                                              thick_monomial(0, {2, 1}, 1.1)};
  for (const Exponent& lambda : {Exponent(Rational(-1, 2)), Exponent(0), Exponent(Rational(3, 2)),
                                 Exponent::floating(0.3)}) {
    for (const auto& phi : phis) {
      const double R = phi.support_radius();
      // r = t^2 removes the endpoint singularity of r^lambda for lambda >= -1/2.
      double plain = 0.0;
      for (Side w : {Side::plus, Side::minus}) {
        plain += simpson(
            [&](double t) { return t == 0 ? (lambda.value() == -0.5 ? 2 * phi.at(w, 1e-300) : 0.0)
                                          : 2 * std::pow(t, 2 * lambda.value() + 1) * phi.at(w, t * t); },
            0, std::sqrt(R));
      }
      CHECK(pair(pf_power(lambda), phi).value == doctest::Approx(plain).epsilon(1e-8));
    }
  }
}

TEST_CASE("property: second-derivative duality") {
  const std::vector<ThickDistribution> fs = {delta_star(), pf_heaviside(), pf_power(-2),
                                             pf_power(Rational(-3, 2)), g_lambda_delta(Rational(1, 3), 1)};
  const std::vector<ThickTestFunction> phis = {plateau_bump(1.0), thick_monomial(1, {1, 2}, 1.0),
                                              from_polynomial({0, 1, 1}, 1.0)};
  for (const auto& f : fs)
    for (const auto& phi : phis) {
      const double lhs = pair(d_star(d_star(f)), phi).value;
      const double rhs = pair(f, derivative(phi, 2)).value;
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("property: S0 x R+ evaluation equals single-axis quadrature") {
  const std::vector<ThickTestFunction> phis = {plateau_bump(1.0), from_polynomial({1, 2, -1}, 0.9),
                                              from_polynomial({0, 0, 3}, 1.3, 0.4)};
  for (const auto& phi : phis) {
    const double a = phi.thick_point(), R = phi.support_radius();
    const double axis = simpson([&](double x) { return x == a ? phi.at(Side::plus, 1e-300) : phi(x); }, a - R, a + R);
    CHECK(std::abs(pair(pf_power(0, a), phi).value - axis) <= 1e-10);
  }
}

TEST_CASE("property: translation and dilation identities") {
  const std::vector<ThickDistribution> fs = {delta_star(), pf_heaviside(), pf_power(-2),
                                             pf_density({2, -1}, Rational(-1, 2))};
  const auto base = sum(thick_monomial(-1, {1, 2}, 1.0), from_polynomial({1, 3}, 1.0));
  for (const auto& f : fs) {
    for (Rational c : {Rational(1, 2), Rational(-3, 4)}) {
      const ThickDistribution t = translate(f, c);
      const auto phi = translate_argument(base, t.thick_point());
      const double lhs = pair(t, phi).value;
      const double rhs = pair(f, translate_argument(phi, to_double(c))).value;
      CHECK(std::abs(lhs - rhs) <= 1e-8);
      // Independent: translating both leaves the pairing unchanged.
      CHECK(std::abs(lhs - pair(f, base).value) <= 1e-8);
    }
    for (Rational c : {Rational(2), Rational(-1), Rational(-1, 3)}) {
      const ThickDistribution d = dilate(f, c);
      const auto phi = base;
      const auto rhs = pair(f, dilate_argument(phi, c)).value / std::abs(to_double(c));
      CHECK(std::abs(pair(d, phi).value - rhs) <= 1e-8);
    }
  }
  // c = -1 leaves delta_* invariant when a_0 is even.
  const auto even = sum(plateau_bump(1.0), thick_monomial(1, {2, 5}, 1.0));
  CHECK(pair(dilate(delta_star(), -1), even).value == pair(delta_star(), even).value);
}

TEST_CASE("fp_limit") {
  auto samples_of = [](const std::function<double(double)>& F) {
    FpSamples s;
    for (double e : dyadic_grid(4, 16)) s.emplace_back(e, F(e));
    return s;
  };
  for (double alpha : {-0.5, -1.5, -2.5}) {
    for (double A : {1.0, 2.0}) {
      const auto s = samples_of([&](double e) { return (std::pow(A, alpha + 1) - std::pow(e, alpha + 1)) / (alpha + 1); });
      const FpBasis basis{{{-(alpha + 1), 0}, {-1, 0}, {-2, 0}}};
      CHECK(std::abs(fp_limit(s, basis).finite_part - std::pow(A, alpha + 1) / (alpha + 1)) <= 1e-8);
    }
  }
  const auto log_samples = samples_of([](double e) { return std::log(2.0) - std::log(e); });
  CHECK(fp_limit(log_samples).finite_part == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  const auto affine = samples_of([](double e) { return 5 + 3 * e; });
  const auto fit = fp_limit(affine);
  CHECK(fit.finite_part == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(fit.residual < 1e-9);
}

TEST_CASE("property: integer-power divergences are removed by the default basis") {
  for (double c1 : {0.0, 1.5, -2.0})
    for (double c2 : {0.0, 3.0})
      for (double c3 : {0.0, -0.25}) {
        const double fp = 0.7;
        FpSamples s;
        for (double e : dyadic_grid(4, 16))
          s.emplace_back(e, fp + c1 / e + c2 * std::log(e) + c3 / (e * e) + 0.5 * e);
        CHECK(std::abs(fp_limit(s).finite_part - fp) <= 1e-6);
      }
}

TEST_CASE("fp_limit refuses short or degenerate inputs") {
  FpSamples few = {{0.5, 1}, {0.25, 1}};
  CHECK_THROWS_AS(fp_limit(few), DomainError);
  FpSamples flat;
  for (double e : dyadic_grid(4, 16)) flat.emplace_back(e, 1.0);
  const FpBasis duplicate{{{1, 0}, {1, 0}}};
  CHECK_THROWS_AS(fp_limit(flat, duplicate), DomainError);
}
