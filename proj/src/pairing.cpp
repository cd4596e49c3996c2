#include "thick/pairing.hpp"

#include "thick/errors.hpp"
#include "thick/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace thick {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0)) throw DomainError("abs_tol must be positive");
  if (!(split_radius > 0)) throw DomainError("split radius A must be positive");
  if (max_subdivisions < 1) throw DomainError("max_subdivisions must be at least 1");
}

namespace {

void require_same_point(double a, double b) {
  if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
    throw ThickPointMismatch("distribution lives at thick point " + format_double(a) +
                             " but the test function at " + format_double(b));
}

QuadratureResult checked_integral(const std::function<double(double)>& f, double lo, double hi,
                                  const QuadratureConfig& cfg) {
  QuadratureResult q = integrate_adaptive(f, lo, hi, cfg.abs_tol, cfg.max_subdivisions);
  if (!q.converged)
    throw QuadratureError("quadrature on [" + format_double(lo) + ", " + format_double(hi) +
                          "] did not converge within " + std::to_string(cfg.max_subdivisions) +
                          " subdivisions (error estimate " + format_double(q.error) + ")");
  return q;
}

// Dense double copy of the expansion coefficients on one side.
struct SideSeries {
  int start = 0;
  std::vector<double> values;

  SideSeries(const Expansion& e, Side w, int lo, int hi) : start(lo) {
    for (int j = lo; j <= hi; ++j) values.push_back(to_double(e.coeff(j).at(w)));
  }
  double operator()(double r) const {
    double acc = 0.0;
    for (size_t i = values.size(); i-- > 0;)
      if (values[i] != 0.0) acc += values[i] * std::pow(r, start + static_cast<int>(i));
    return acc;
  }
};

PairingResult pair_density(const PfDensity& pf, const ThickTestFunction& phi,
                           const QuadratureConfig& cfg) {
  PairingResult out;
  const double support = phi.support_radius();
  const Expansion& e = phi.expansion();
  if (phi.body()->kind == NodeKind::zero) return out;

  const double split = cfg.split_radius < support ? cfg.split_radius : 0.5 * support;
  out.split_radius = split;
  const double lambda = pf.exponent.value();
  const bool integer = pf.exponent.is_integer();
  const int subtract_to = pf.exponent.subtraction_limit();
  const int m = e.start();
  if (subtract_to >= m && !e.known(subtract_to))
    throw InsufficientOrder("Pf pairing needs the test function expansion through order " +
                            std::to_string(subtract_to));

  // Analytic terms: powers for j < -k-1 (integer) or j <= -lambda-1, log A for j = -k-1.
  const int power_to = integer ? subtract_to - 1 : subtract_to;
  for (int j = m; j <= power_to; ++j) {
    const double weight = to_double(pf.density.plus * e.coeff(j).plus +
                                    pf.density.minus * e.coeff(j).minus);
    const double exponent = lambda + j + 1;
    if (exponent == 0.0)
      throw InvariantViolation("pole lambda + j + 1 = 0 in the non-integer branch (lambda = " +
                               std::to_string(lambda) + ", j = " + std::to_string(j) +
                               "); supply lambda as an exact integer");
    if (weight == 0.0) continue;
    out.series_terms.push_back({j, weight * std::pow(split, exponent) / exponent});
  }
  if (integer && subtract_to >= m) {
    const double weight = to_double(pf.density.plus * e.coeff(subtract_to).plus +
                                    pf.density.minus * e.coeff(subtract_to).minus);
    out.log_term = weight * std::log(split);
  }

  // Leading power of the subtracted near-field integrand; r = A t^n tames it.
  const int first_kept = std::max(subtract_to + 1, m);
  const double lead = lambda + first_kept;
  const int stretch = lead >= 0 ? 1 : std::min(64, static_cast<int>(std::ceil(2.0 / (lead + 1.0))));
  const bool exact_plateau = e.exact();
  const double plateau = exact_plateau ? phi.plateau_radius() : 0.0;

  double quad = 0.0;
  for (Side w : {Side::plus, Side::minus}) {
    const double c = to_double(pf.density.at(w));
    if (c == 0.0) continue;
    auto far = [&](double r) { return c * std::pow(r, lambda) * phi.at(w, r); };
    if (split < support) {
      const QuadratureResult q = checked_integral(far, split, support, cfg);
      quad += q.value;
      out.quad_error += q.error;
    }

    const SideSeries subtracted(e, w, m, std::max(subtract_to, m - 1));
    std::optional<SideSeries> remaining;
    if (exact_plateau && e.last_order() >= first_kept)
      remaining.emplace(e, w, first_kept, e.last_order());
    // On the plateau phi equals its expansion, so the remainder is the exact tail sum.
    auto remainder = [&](double r) {
      if (r < plateau) return remaining ? (*remaining)(r) : 0.0;
      return phi.at(w, r) - subtracted(r);
    };
    auto near = [&](double t) {
      if (t <= 0.0) return 0.0;
      const double r = split * std::pow(t, stretch);
      if (r <= 0.0) return 0.0;
      const double jacobian = stretch * split * std::pow(t, stretch - 1);
      return c * std::pow(r, lambda) * remainder(r) * jacobian;
    };
    const QuadratureResult q = checked_integral(near, 0.0, 1.0, cfg);
    quad += q.value;
    out.quad_error += q.error;
  }

  out.value = quad + out.log_term;
  for (const auto& t : out.series_terms) out.value += t.contribution;
  return out;
}

PairingResult scaled(PairingResult r, const Rational& s) {
  const double factor = to_double(s);
  r.value *= factor;
  if (r.exact) *r.exact *= s;
  r.quad_error *= std::abs(factor);
  r.log_term *= factor;
  for (auto& t : r.series_terms) t.contribution *= factor;
  return r;
}

}  // namespace

PairingResult pair(const ThickDistribution& f, const ThickTestFunction& phi,
                   const QuadratureConfig& cfg) {
  cfg.validate();
  require_same_point(f.thick_point(), phi.thick_point());
  return std::visit(
      [&](const auto& node) -> PairingResult {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ThickDelta>) {
          PairingResult out;
          const Rational v = node.g.pair(phi.expansion().coeff(node.degree)) / kSphereMass;
          out.value = to_double(v);
          out.exact = v;
          return out;
        } else if constexpr (std::is_same_v<T, PfDensity>) {
          return pair_density(node, phi, cfg);
        } else if constexpr (std::is_same_v<T, Derivative>) {
          return scaled(pair(node.f, derivative(phi), cfg), -1);
        } else if constexpr (std::is_same_v<T, MultiplierProduct>) {
          return pair(node.f, multiply_by(node.psi, phi), cfg);
        } else if constexpr (std::is_same_v<T, LinearCombination>) {
          PairingResult out;
          out.exact = Rational(0);
          for (const auto& [c, g] : node.terms) {
            const PairingResult part = scaled(pair(g, phi, cfg), c);
            out.value += part.value;
            if (out.exact && part.exact)
              *out.exact += *part.exact;
            else
              out.exact.reset();
            out.split_radius = std::max(out.split_radius, part.split_radius);
            out.quad_error += part.quad_error;
            out.log_term += part.log_term;
            out.series_terms.insert(out.series_terms.end(), part.series_terms.begin(),
                                    part.series_terms.end());
          }
          return out;
        } else if constexpr (std::is_same_v<T, Translate>) {
          return pair(node.f, translate_argument(phi, to_double(node.shift)), cfg);
        } else {
          const Rational magnitude = node.factor < 0 ? Rational(-node.factor) : node.factor;
          return scaled(pair(node.f, dilate_argument(phi, node.factor), cfg), 1 / magnitude);
        }
      },
      f.node().body);
}

PairingResult pair(const ClassicalDistributionView& f, const ThickTestFunction& phi,
                   const QuadratureConfig& cfg) {
  if (!phi.is_ordinary())
    throw DomainError("projected distributions pair only with ordinary test functions; "
                      "this one has a thick singularity");
  return pair(f.source(), phi, cfg);
}

PairingResult pair(const OldStyleDistributionView& f, const ThickTestFunction& phi,
                   const QuadratureConfig& cfg) {
  if (!phi.is_old_style())
    throw DomainError("the one-sided projection pairs only with test functions of order m >= 0");
  return pair(f.source(), phi, cfg);
}

FpBasis FpBasis::orders(int max_p, int max_q) {
  FpBasis basis;
  for (int p = 0; p <= max_p; ++p)
    for (int q = 0; q <= max_q; ++q)
      if (p != 0 || q != 0) basis.functions.push_back({static_cast<double>(p), q});
  basis.functions.push_back({-1.0, 0});
  basis.functions.push_back({-2.0, 0});
  return basis;
}

FpFit fp_limit(const FpSamples& samples, const FpBasis& basis) {
  const auto cols = static_cast<Eigen::Index>(basis.functions.size() + 1);
  const auto rows = static_cast<Eigen::Index>(samples.size());
  if (rows < cols + 2)
    throw DomainError("finite-part fit needs at least " + std::to_string(cols + 2) +
                      " samples, got " + std::to_string(rows));
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto [eps, value] = samples[static_cast<size_t>(i)];
    if (!(eps > 0)) throw DomainError("finite-part samples need eps > 0");
    design(i, 0) = 1.0;
    for (size_t k = 0; k < basis.functions.size(); ++k) {
      const auto& fn = basis.functions[k];
      design(i, static_cast<Eigen::Index>(k) + 1) =
          std::pow(eps, -fn.p) * std::pow(std::log(eps), fn.q);
    }
    rhs(i) = value;
  }
  // Column equilibration before judging the conditioning.
  Eigen::VectorXd norms = design.colwise().norm();
  for (Eigen::Index k = 0; k < cols; ++k) {
    if (norms(k) == 0.0) throw DomainError("finite-part basis function vanishes on the grid");
    design.col(k) /= norms(k);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double condition = sv(0) / sv(sv.size() - 1);
  if (!(condition < kFpConditionLimit))
    throw DomainError("finite-part fit is ill-conditioned (condition " + std::to_string(condition) +
                      "); check the basis orders");
  const Eigen::VectorXd coef = svd.solve(rhs);
  const double residual = (design * coef - rhs).norm();
  return {coef(0) / norms(0), residual, condition};
}

FpFit fp_limit(const FpSamples& samples, int max_p, int max_q) {
  return fp_limit(samples, FpBasis::orders(max_p, max_q));
}

std::vector<double> dyadic_grid(int first, int last) {
  std::vector<double> grid;
  for (int k = first; k <= last; ++k) grid.push_back(std::ldexp(1.0, -k));
  return grid;
}

FpFit fp_pair_oracle(const PfDensity& f, const ThickTestFunction& phi,
                     const QuadratureConfig& cfg, const std::vector<double>& grid) {
  cfg.validate();
  std::vector<double> eps = grid;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const double support = phi.support_radius();
  const double lambda = f.exponent.value();

  // F(eps) as a running sum of integrals between consecutive grid points.
  FpSamples samples;
  double running = 0.0;
  double upper = support;
  for (double e : eps) {
    for (Side w : {Side::plus, Side::minus}) {
      const double c = to_double(f.density.at(w));
      if (c == 0.0 || upper <= e) continue;
      auto integrand = [&](double r) { return c * std::pow(r, lambda) * phi.at(w, r); };
      running += checked_integral(integrand, e, upper, cfg).value;
    }
    upper = std::min(upper, e);
    samples.emplace_back(e, running);
  }

  // Basis: eps^{lambda+j+1} for each order the density meets, ln eps at the
  // integer resonance -lambda-1, and a few vanishing tail powers.
  FpBasis basis;
  const Expansion& e = phi.expansion();
  if (e.empty()) return {samples.empty() ? 0.0 : samples.back().second, 0.0, 1.0};
  const int m = e.start();
  const int limit = f.exponent.subtraction_limit();
  const int capacity = static_cast<int>(samples.size()) - 3;
  int last = std::max(limit, m - 1) + 5;
  if (e.exact()) last = std::min(last, e.last_order());
  for (int j = m; j <= last && static_cast<int>(basis.functions.size()) < capacity; ++j) {
    if (f.exponent.is_integer() && j == limit) {
      basis.functions.push_back({0.0, 1});
      continue;
    }
    const double exponent = lambda + j + 1;
    if (exponent == 0.0) continue;
    basis.functions.push_back({-exponent, 0});
  }
  return fp_limit(samples, basis);
}

}  // namespace thick
