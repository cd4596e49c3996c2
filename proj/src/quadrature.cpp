#include "thick/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace thick {

namespace {

// Kronrod abscissae on [0, 1); odd indices are the embedded Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (size_t i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrod[i] * sum;
    if (i % 2 == 1) gauss += kGauss[i / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  // Rounding floor keeps the estimate meaningful once the rules agree to machine precision.
  const double error = std::max(std::abs(kronrod - gauss), 50 * 2.2e-16 * std::abs(kronrod));
  return {lo, hi, kronrod, error};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    double abs_tol, int max_subdivisions) {
  QuadratureResult result;
  if (!(hi > lo)) return result;
  std::priority_queue<Segment> heap;
  heap.push(rule(f, lo, hi));
  double value = heap.top().value;
  double error = heap.top().error;
  // The rounding floor of large integrals can exceed an absolute tolerance.
  auto tolerance = [&] { return std::max(abs_tol, 200 * 2.2e-16 * std::abs(value)); };
  while (error > tolerance() && result.subdivisions < max_subdivisions) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;
    heap.pop();
    const Segment left = rule(f, worst.lo, mid);
    const Segment right = rule(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++result.subdivisions;
  }
  // Re-sum to shed the drift of incremental updates.
  value = 0.0;
  error = 0.0;
  std::vector<Segment> segments;
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  for (const auto& s : segments) {
    value += s.value;
    error += s.error;
  }
  result.value = value;
  result.error = error;
  result.converged = error <= tolerance();
  return result;
}

}  // namespace thick
