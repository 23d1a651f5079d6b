#include "needlet/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "needlet/error.hpp"

namespace needlet {
namespace {

constexpr double kNewtonTolerance = 1e-14;
constexpr int kNewtonMaxIterations = 100;

// P_m(x) and P_m'(x).
std::pair<double, double> legendre_with_derivative(int m, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = m * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussLegendre gauss_legendre(int m) {
  if (m < 1) throw DomainError("Gauss-Legendre rule needs at least one point");
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(m));
  gl.weights.resize(static_cast<std::size_t>(m));
  if (m == 1) {
    gl.nodes[0] = 0.0;
    gl.weights[0] = 2.0;
    return gl;
  }
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
      const auto [p, d] = legendre_with_derivative(m, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) <= kNewtonTolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericalError("Gauss-Legendre Newton iteration did not converge for m=" +
                           std::to_string(m));
    }
    dp = legendre_with_derivative(m, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root
    gl.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    gl.nodes[static_cast<std::size_t>(i)] = -x;
    gl.weights[static_cast<std::size_t>(m - 1 - i)] = w;
    gl.weights[static_cast<std::size_t>(i)] = w;
  }
  if (m % 2 == 1) gl.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
  return gl;
}

double CubatureRule::longitude(int index) const {
  return 2.0 * std::numbers::pi * index / longitude_count;
}

CubatureRule build_rule_for_degree(int degree, const SphereDim& dim) {
  if (dim.d() != 3) {
    throw DomainError("cubature construction is only available on S^2 (d=3), got d=" +
                      std::to_string(dim.d()));
  }
  if (degree < 0) throw DomainError("cubature degree must be nonnegative");
  CubatureRule rule;
  rule.degree = degree;
  rule.dim = dim;
  const int n_lat = (degree + 2) / 2 + 1;  // ceil((N+1)/2) + 1
  const int n_lon = degree + 1;
  const GaussLegendre gl = gauss_legendre(n_lat);
  rule.latitude_cos = gl.nodes;
  rule.latitude_weights = gl.weights;
  rule.longitude_count = n_lon;
  rule.nodes.reserve(static_cast<std::size_t>(n_lat) * n_lon);
  rule.weights.reserve(static_cast<std::size_t>(n_lat) * n_lon);
  const double dphi = 2.0 * std::numbers::pi / n_lon;
  for (int a = 0; a < n_lat; ++a) {
    const double z = gl.nodes[a];
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int b = 0; b < n_lon; ++b) {
      const double phi = b * dphi;
      rule.nodes.emplace_back(std::vector<double>{r * std::cos(phi), r * std::sin(phi), z});
      rule.weights.push_back(gl.weights[a] * dphi);
    }
  }
  // Nearest neighbours in a product grid: the same meridian on an adjacent
  // ring, or an adjacent longitude on the same ring.
  double sep = std::numeric_limits<double>::infinity();
  for (int a = 0; a + 1 < n_lat; ++a) {
    sep = std::min(sep, std::acos(gl.nodes[a]) - std::acos(gl.nodes[a + 1]));
  }
  if (n_lon > 1) {
    for (int a = 0; a < n_lat; ++a) {
      const double r = std::sqrt(std::max(0.0, 1.0 - gl.nodes[a] * gl.nodes[a]));
      sep = std::min(sep, 2.0 * std::asin(std::min(1.0, r * std::sin(std::numbers::pi / n_lon))));
    }
  }
  rule.separation = sep;
  return rule;
}

CubatureRule build_rule(int j, const SphereDim& dim) {
  if (j < 0 || j > 12) throw DomainError("cubature level out of range: " + std::to_string(j));
  CubatureRule rule = build_rule_for_degree(1 << (j + 2), dim);
  rule.level = j;
  return rule;
}

double integrate(const CubatureRule& rule, const std::function<double(const UnitVector&)>& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      const auto c = rule.nodes[i].coords();
      throw NumericalError("non-finite integrand at node " + std::to_string(i) + " (" +
                           std::to_string(c[0]) + ", " + std::to_string(c[1]) + ", " +
                           std::to_string(c[2]) + ")");
    }
    total += rule.weights[i] * v;
  }
  return total;
}

RuleDiagnostics diagnostics(const CubatureRule& rule) {
  const int j = std::max(rule.level, 0);
  const double scale = std::ldexp(1.0, j);
  const double wscale = std::pow(scale, rule.dim.d() - 1);
  const auto [lo, hi] = std::minmax_element(rule.weights.begin(), rule.weights.end());
  return {rule.separation * scale, *lo * wscale, *hi * wscale};
}

void write_rule_csv(const CubatureRule& rule, std::ostream& out) {
  for (int i = 1; i <= rule.dim.d(); ++i) out << 'x' << i << ',';
  out << "weight\n";
  char buf[64];
  for (std::size_t n = 0; n < rule.size(); ++n) {
    for (double c : rule.nodes[n].coords()) {
      std::snprintf(buf, sizeof buf, "%.17g,", c);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", rule.weights[n]);
    out << buf;
  }
}

}  // namespace needlet
