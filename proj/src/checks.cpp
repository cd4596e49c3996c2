#include "thick/checks.hpp"

#include "thick/dsl.hpp"
#include "thick/errors.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>

namespace thick {

namespace {

CheckOutcome within(std::string name, double observed, double expected, double tol) {
  const bool pass = std::isfinite(observed) && std::abs(observed - expected) <= tol;
  return {std::move(name), observed, expected, tol, pass};
}

CheckOutcome exactly(std::string name, const Rational& observed, const Rational& expected) {
  return {std::move(name), to_double(observed), to_double(expected), 0.0, observed == expected};
}

CheckOutcome holds(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, ok}; }

std::string bracket(const ThickDistribution& f, const ThickTestFunction& phi) {
  return "<" + dsl::print(f) + ", " + dsl::print(phi) + ">";
}

// Runs one check; a library error counts as a failure with a NaN observation.
void record(std::vector<CheckOutcome>& out, const std::string& name, double expected, double tol,
            const std::function<double()>& observe) {
  try {
    out.push_back(within(name, observe(), expected, tol));
  } catch (const Error& e) {
    out.push_back({name + " (" + e.what() + ")", std::nan(""), expected, tol, false});
  }
}

// Deterministic integers independent of the standard library's distributions.
class Draw {
 public:
  explicit Draw(unsigned seed) : rng_(seed) {}
  int in(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<unsigned>(hi - lo + 1)); }

 private:
  std::mt19937 rng_;
};

// Test functions with exact expansions across the orders m = -2..2.
std::vector<ThickTestFunction> thick_catalogue() {
  return {
      plateau_bump(1.0),
      sum(thick_monomial(0, {2, 0}, 1.0), plateau_bump(1.0)),
      thick_monomial(0, {1, 0}, 1.2),
      thick_monomial(-1, {1, 2}, 1.0),
      thick_monomial(-2, {1, 1}, 1.0),
      sum(thick_monomial(-2, {3, -1}, 1.3), thick_monomial(0, {Rational(7, 2), Rational(1, 2)}, 1.3)),
      thick_monomial(1, {1, 1}, 1.0),
      thick_monomial(2, {4, 8}, 1.0),
      sum(thick_monomial(1, {2, -3}, 1.1), from_polynomial({0, 0, 5}, 1.1)),
      multiply_by(heaviside_multiplier(), from_polynomial({2, 1, -1}, 1.0)),
  };
}

std::vector<ThickTestFunction> ordinary_catalogue() {
  return {plateau_bump(1.0), from_polynomial({2, -1, 3}, 1.0), from_polynomial({Rational(-1, 2), 0, 0, 4}, 0.8),
          from_polynomial({1, 1, 1, 1, 1}, 1.5), scaled(3, plateau_bump(0.6))};
}

std::vector<CheckOutcome> expansion_suite() {
  std::vector<CheckOutcome> out;
  Draw draw(20240601);
  int sign_failures = 0, derivative_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rational> p(static_cast<size_t>(draw.in(1, 8)));
    for (auto& c : p) c = Rational(draw.in(-12, 12), draw.in(1, 9));
    const Expansion e = from_taylor(p, true);
    for (size_t j = 0; j < p.size(); ++j) {
      const SpherePair a = e.coeff(static_cast<int>(j));
      const bool ok = j % 2 == 0 ? (a.plus == a.minus && a.plus == p[j]) : (a.plus == -a.minus && a.plus == p[j]);
      if (!ok) ++sign_failures;
    }
    std::vector<Rational> dp;
    for (size_t k = 1; k < p.size(); ++k) dp.push_back(Rational(static_cast<int>(k)) * p[k]);
    if (!(differentiate(e) == from_taylor(dp, true))) ++derivative_failures;
  }
  out.push_back(within("from_taylor sign rule on 50 random polynomials (violations)", sign_failures, 0, 0));
  out.push_back(within("differentiate o from_taylor = from_taylor o d/dx on 50 polynomials (violations)",
                       derivative_failures, 0, 0));
  out.push_back(within("seminorm(mono(2, pair(1, 1), 1), q=3, s=0, K=1/4)",
                       seminorm(thick_monomial(2, {1, 1}, 1.0), 3, 0, 0.25), 0, 0));
  out.push_back(within("seminorm(poly([0, 0, 0, 1], 1), q=3, s=0, K=1/2)",
                       seminorm(from_polynomial({0, 0, 0, 1}, 1.0), 3, 0, 0.5), 1, 1e-10));
  return out;
}

std::vector<CheckOutcome> pairing_suite(const QuadratureConfig& cfg) {
  std::vector<CheckOutcome> out;
  // Plain thick delta, exactly.
  for (const auto& phi : thick_catalogue()) {
    const SpherePair a0 = phi.expansion().coeff(0);
    const auto r = pair(delta_star(), phi, cfg);
    out.push_back(exactly(bracket(delta_star(), phi), r.exact.value_or(Rational(-999999)),
                          (a0.plus + a0.minus) / 2));
  }
  // Heaviside derivative: a_0(+1).
  const auto dh = d_star(pf_heaviside());
  const auto catalogue = thick_catalogue();
  for (size_t i : {0, 2, 3, 4, 5, 6, 7, 8}) {
    const auto& phi = catalogue[i];
    record(out, bracket(dh, phi), to_double(phi.expansion().coeff(0).plus), 1e-8,
           [&] { return pair(dh, phi, cfg).value; });
  }
  // Split-radius formulas against the finite-part-of-limit oracle.
  struct Case {
    SpherePair c;
    Exponent lambda;
    ThickTestFunction phi;
  };
  using R = Rational;
  const std::vector<Case> cases = {
      {{1, 1}, R(-5, 2), plateau_bump(1.0)},
      {{1, 1}, R(-5, 2), thick_monomial(1, {1, -1}, 1.0)},
      {{1, 1}, R(-5, 2), from_polynomial({1, 2, 3}, 1.0)},
      {{1, 0}, R(-5, 2), thick_monomial(1, {2, 1}, 1.2)},
      {{1, 1}, -2, plateau_bump(1.0)},
      {{1, 1}, -2, from_polynomial({1, -1, 2}, 1.1)},
      {{1, -1}, -2, thick_monomial(1, {1, 3}, 1.0)},
      {{1, 0}, -2, sum(thick_monomial(0, {2, 0}, 1.0), plateau_bump(1.0))},
      {{1, 1}, -1, plateau_bump(1.0)},
      {{1, 0}, -1, plateau_bump(1.0)},
      {{1, -1}, -1, from_polynomial({0, 1, 1}, 1.0)},
      {{1, 1}, -1, thick_monomial(-1, {1, 2}, 1.0)},
      {{1, 1}, R(-1, 2), plateau_bump(1.0)},
      {{1, 1}, R(-1, 2), thick_monomial(-1, {2, 5}, 1.0)},
      {{2, R(1, 3)}, R(-1, 2), thick_monomial(-2, {1, 1}, 1.0)},
      {{1, 1}, 0, thick_monomial(-1, {1, 1}, 1.0)},
      {{1, 0}, 0, plateau_bump(1.0)},
      {{1, 1}, R(3, 2), plateau_bump(1.0)},
      {{1, 1}, R(3, 2), thick_monomial(-3, {1, 2}, 1.3)},
      {{1, -1}, R(3, 2), thick_monomial(-2, {1, 1}, 1.0)},
  };
  for (const auto& c : cases) {
    const auto f = pf_density(c.c, c.lambda);
    double expected = 0.0;
    try {
      expected = fp_pair_oracle({c.c, c.lambda}, c.phi, cfg).finite_part;
    } catch (const Error& e) {
      out.push_back({bracket(f, c.phi) + " oracle (" + e.what() + ")", std::nan(""), 0.0, 1e-5, false});
      continue;
    }
    record(out, bracket(f, c.phi) + " vs oracle", expected, 1e-5, [&] { return pair(f, c.phi, cfg).value; });
  }
  // fp_limit on closed-form truncated integrals from eps to A.
  const auto grid = dyadic_grid(4, 16);
  for (double alpha : {-0.5, -1.5, -2.5, -1.0}) {
    for (double A : {1.0, 2.0}) {
      FpSamples samples;
      for (double e : grid)
        samples.emplace_back(e, alpha == -1.0 ? std::log(A / e)
                                              : (std::pow(A, alpha + 1) - std::pow(e, alpha + 1)) / (alpha + 1));
      const FpBasis basis =
          alpha == -1.0 ? FpBasis{{{0, 1}, {-1, 0}, {-2, 0}}} : FpBasis{{{-(alpha + 1), 0}, {-1, 0}, {-2, 0}}};
      const double expected = alpha == -1.0 ? std::log(A) : std::pow(A, alpha + 1) / (alpha + 1);
      record(out, "fp_limit of int_eps^" + dsl::print_number(A) + " r^" + dsl::print_number(alpha) + " dr",
             expected, 1e-6, [&] { return fp_limit(samples, basis).finite_part; });
    }
  }
  return out;
}

std::vector<CheckOutcome> paskusz_suite(const QuadratureConfig& cfg) {
  std::vector<CheckOutcome> out;
  const auto lhs = simplify(d_star(multiply(heaviside_multiplier(), pf_heaviside())));
  const auto rhs = simplify(d_star(pf_heaviside()));
  const auto g1 = thick_delta(g_one(), 0);
  out.push_back(holds("simplify(d*(H(x) * Pf(H(x)))) = simplify(d*(Pf(H(x)))) = " + dsl::print(g1),
                      lhs == rhs && rhs == g1));
  const auto raw_lhs = d_star(multiply(heaviside_multiplier(), pf_heaviside()));
  const auto h_g1 = multiply(heaviside_multiplier(), g1);
  const std::vector<ThickTestFunction> phis = {plateau_bump(1.0), sum(thick_monomial(0, {2, 0}, 1.0), plateau_bump(1.0)),
                                              thick_monomial(-1, {1, 2}, 1.0),
                                              multiply_by(heaviside_multiplier(), from_polynomial({2, 1}, 1.0)),
                                              sum(thick_monomial(0, {5, -1}, 1.2), thick_monomial(2, {1, 1}, 1.2))};
  for (const auto& phi : phis) {
    const double by_rhs = pair(rhs, phi, cfg).value;
    record(out, bracket(raw_lhs, phi) + " = " + bracket(d_star(pf_heaviside()), phi), by_rhs, 1e-10,
           [&] { return pair(raw_lhs, phi, cfg).value; });
    record(out, bracket(h_g1, phi) + " = a_0(+1)", to_double(phi.expansion().coeff(0).plus), 1e-10,
           [&] { return pair(h_g1, phi, cfg).value; });
  }
  for (const auto& phi : ordinary_catalogue())
    record(out, "<pi(" + dsl::print(rhs) + "), " + dsl::print(phi) + "> = phi(0)", phi(0.0), 1e-10,
           [&] { return pair(project(rhs), phi, cfg).value; });
  return out;
}

std::vector<CheckOutcome> projection_suite(const QuadratureConfig& cfg) {
  std::vector<CheckOutcome> out;
  for (const auto& phi : ordinary_catalogue())
    record(out, "<pi(dstar), " + dsl::print(phi) + "> = phi(0)", phi(0.0), 1e-12,
           [&] { return pair(project(delta_star()), phi, cfg).value; });
  for (const auto& f : {delta_star(), pf_heaviside(), pf_power(-2)}) {
    for (const auto& phi : ordinary_catalogue()) {
      double expected = 0.0;
      try {
        expected = -pair(project(f), derivative(phi), cfg).value;
      } catch (const Error& e) {
        out.push_back({"-<pi(" + dsl::print(f) + "), D(phi)> (" + e.what() + ")", std::nan(""), 0, 1e-8, false});
        continue;
      }
      record(out, "<pi(d*(" + dsl::print(f) + ")), " + dsl::print(phi) + "> = -<pi(f), D(phi)>", expected, 1e-8,
             [&] { return pair(project(d_star(f)), phi, cfg).value; });
    }
  }
  return out;
}

std::vector<CheckOutcome> a_independence_suite(const QuadratureConfig& cfg) {
  std::vector<CheckOutcome> out;
  const std::vector<ThickTestFunction> phis = {
      plateau_bump(1.2), from_polynomial({1, -1, 2}, 1.1), thick_monomial(-1, {1, 3}, 1.5),
      multiply_by(heaviside_multiplier(), from_polynomial({1, 2}, 1.3)),
      sum(thick_monomial(1, {1, 1}, 1.1), thick_monomial(-2, {2, -1}, 1.4))};
  using R = Rational;
  for (const Exponent& lambda : {Exponent(R(-5, 2)), Exponent(-2), Exponent(-1), Exponent(R(3, 2))}) {
    const auto f = pf_power(lambda);
    for (const auto& phi : phis) {
      std::vector<double> values;
      try {
        for (double A : {0.3, 0.5, 1.0}) {
          QuadratureConfig c = cfg;
          c.split_radius = A;
          values.push_back(pair(f, phi, c).value);
        }
      } catch (const Error& e) {
        out.push_back({bracket(f, phi) + " (" + e.what() + ")", std::nan(""), 0, 1e-7, false});
        continue;
      }
      out.push_back(within(bracket(f, phi) + " A=0.3 vs A=0.5", values[0], values[1], 1e-7));
      out.push_back(within(bracket(f, phi) + " A=0.3 vs A=1", values[0], values[2], 1e-7));
      out.push_back(within(bracket(f, phi) + " A=0.5 vs A=1", values[1], values[2], 1e-7));
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"expansion", "pairing", "paskusz", "projection",
                                                 "a-independence"};
  return names;
}

std::vector<CheckOutcome> run_suite(std::string_view name, const QuadratureConfig& cfg) {
  cfg.validate();
  if (name == "expansion") return expansion_suite();
  if (name == "pairing") return pairing_suite(cfg);
  if (name == "paskusz") return paskusz_suite(cfg);
  if (name == "projection") return projection_suite(cfg);
  if (name == "a-independence") return a_independence_suite(cfg);
  throw DomainError("unknown check suite '" + std::string(name) + "'");
}

}  // namespace thick
