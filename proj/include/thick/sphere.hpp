#pragma once

// Functions and distributions on the two-point sphere S^0 = {+1, -1}.

#include "thick/rational.hpp"

namespace thick {

enum class Side : int { plus = 1, minus = -1 };

constexpr int sign(Side w) { return static_cast<int>(w); }
constexpr Side opposite(Side w) { return w == Side::plus ? Side::minus : Side::plus; }

// Total counting measure of S^0.
inline constexpr int kSphereMass = 2;

// A function on S^0: its values at w = +1 and w = -1.
struct SpherePair {
  Rational plus;
  Rational minus;

  SpherePair() = default;
  SpherePair(Rational p, Rational m) : plus(std::move(p)), minus(std::move(m)) {}

  static SpherePair constant(const Rational& c) { return {c, c}; }

  const Rational& at(Side w) const { return w == Side::plus ? plus : minus; }

  bool is_zero() const { return plus == 0 && minus == 0; }
  bool is_even() const { return plus == minus; }
  bool is_odd() const { return plus == -minus; }

  SpherePair even_part() const { return {(plus + minus) / 2, (plus + minus) / 2}; }
  SpherePair odd_part() const { return {(plus - minus) / 2, (minus - plus) / 2}; }

  // (a(w), b(w)) -> a(-w): reflection through the thick point.
  SpherePair reflected() const { return {minus, plus}; }

  SpherePair operator-() const { return {-plus, -minus}; }
  SpherePair& operator+=(const SpherePair& o) {
    plus += o.plus;
    minus += o.minus;
    return *this;
  }
  SpherePair& operator-=(const SpherePair& o) {
    plus -= o.plus;
    minus -= o.minus;
    return *this;
  }
  SpherePair& operator*=(const Rational& s) {
    plus *= s;
    minus *= s;
    return *this;
  }

  friend SpherePair operator+(SpherePair a, const SpherePair& b) { return a += b; }
  friend SpherePair operator-(SpherePair a, const SpherePair& b) { return a -= b; }
  friend SpherePair operator*(SpherePair a, const Rational& s) { return a *= s; }
  friend SpherePair operator*(const Rational& s, SpherePair a) { return a *= s; }
  // Pointwise product.
  friend SpherePair operator*(const SpherePair& a, const SpherePair& b) {
    return {a.plus * b.plus, a.minus * b.minus};
  }
  friend bool operator==(const SpherePair& a, const SpherePair& b) {
    return a.plus == b.plus && a.minus == b.minus;
  }
};

// A distribution on S^0, stored by its pairing weights:
// <g, a> = weights.plus * a(+1) + weights.minus * a(-1).
struct SphereDistribution {
  SpherePair weights;

  Rational pair(const SpherePair& a) const {
    return weights.plus * a.plus + weights.minus * a.minus;
  }

  friend bool operator==(const SphereDistribution&, const SphereDistribution&) = default;
};

// Counting-measure integral: f(+1) + f(-1).
Rational integrate_sphere(const SpherePair& f);

Rational pair_sphere(const SphereDistribution& g, const SpherePair& a);

// <g_lambda, a> = 2 lambda a(1) + 2 (1 - lambda) a(-1).
SphereDistribution g_lambda(const Rational& lambda);
SphereDistribution g_one();
// Weights (1, 1): integration against the counting measure.
SphereDistribution sphere_measure();

}  // namespace thick
