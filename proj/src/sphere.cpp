#include "thick/sphere.hpp"

namespace thick {

Rational integrate_sphere(const SpherePair& f) { return f.plus + f.minus; }

Rational pair_sphere(const SphereDistribution& g, const SpherePair& a) { return g.pair(a); }

SphereDistribution g_lambda(const Rational& lambda) {
  return {{2 * lambda, 2 * (1 - lambda)}};
}

SphereDistribution g_one() { return g_lambda(1); }

SphereDistribution sphere_measure() { return {{1, 1}}; }

}  // namespace thick
