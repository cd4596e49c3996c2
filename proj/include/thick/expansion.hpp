#pragma once

// Truncated strong asymptotic expansions  sum_{j=m}^{M} a_j(w) r^j  about a
// thick point, with explicit bookkeeping of the window in which the stored
// coefficients can be trusted.

#include "thick/sphere.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thick {

class Expansion {
 public:
  // The zero expansion (exact).
  Expansion() = default;

  // Coefficients for orders start, start+1, ...  `reliable_to` is the highest
  // trustworthy order; std::nullopt means the expansion is exact, i.e. the
  // represented function equals the finite sum on a punctured neighbourhood.
  Expansion(int start, std::vector<SpherePair> coeffs,
            std::optional<int> reliable_to = std::nullopt);

  static Expansion zero() { return {}; }
  static Expansion term(int order, SpherePair c);
  // Exact constant (c, c) r^0.
  static Expansion constant(const Rational& c);

  bool is_zero() const { return coeffs_.empty() && !reliable_to_; }
  bool exact() const { return !reliable_to_.has_value(); }
  bool empty() const { return coeffs_.empty(); }

  // Leading order m. For an empty expansion: 0 when exact, M + 1 otherwise.
  int start() const;
  // Highest stored order; only meaningful when !empty().
  int last_order() const { return start_ + static_cast<int>(coeffs_.size()) - 1; }
  std::optional<int> reliable_to() const { return reliable_to_; }
  const std::vector<SpherePair>& coefficients() const { return coeffs_; }

  bool known(int order) const { return !reliable_to_ || order <= *reliable_to_; }
  // Coefficient at `order`; zero outside the stored range. Throws
  // InsufficientOrder past the reliable window of a non-exact expansion.
  SpherePair coeff(int order) const;

  // Drops every term above `order`. Loses exactness iff a nonzero term is dropped.
  Expansion truncated(int order) const;
  Expansion scaled(const Rational& s) const;
  Expansion operator-() const { return scaled(-1); }

  friend bool operator==(const Expansion&, const Expansion&) = default;

 private:
  void canonicalize();

  int start_ = 0;
  std::vector<SpherePair> coeffs_;
  std::optional<int> reliable_to_;
};

Expansion add(const Expansion& a, const Expansion& b);
Expansion multiply(const Expansion& a, const Expansion& b);
// d/dx = w d/dr termwise: a_{j,1}(w) = w (j+1) a_{j+1}(w).
Expansion differentiate(const Expansion& e);
// One-variable Taylor data c_0..c_N at the thick point.
Expansion from_taylor(const std::vector<Rational>& taylor, bool polynomial = false);
// sum_j a_j(w) r^j in floating point.
double evaluate(const Expansion& e, Side w, double r);

// Textual form `(p|q)·r^j + ...`, `0` for zero, trailing `+ O(r^k)` when not exact.
std::string render(const Expansion& e);
Expansion parse_expansion(std::string_view text);

}  // namespace thick
