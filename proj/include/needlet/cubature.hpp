#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "needlet/sphere.hpp"

namespace needlet {

struct GaussLegendre {
  std::vector<double> nodes;  // ascending in [-1, 1]
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule by Newton iteration on the Legendre
/// recurrence (tolerance 1e-14, at most 100 iterations per root).
GaussLegendre gauss_legendre(int m);

/// Positive-weight node set on S^2 exact for spherical polynomials up to
/// `degree`.
///
/// Product rule: Gauss-Legendre in cos(theta) with ceil((N+1)/2) + 1 points
/// times N + 1 equispaced longitudes. Node index is
/// latitude_index * longitude_count + longitude_index, latitudes ordered
/// from the south pole upward.
struct CubatureRule {
  int level = -1;  // -1 for rules built directly from a degree
  int degree = 0;
  SphereDim dim{3};
  std::vector<UnitVector> nodes;
  std::vector<double> weights;
  double separation = 0.0;

  std::vector<double> latitude_cos;
  std::vector<double> latitude_weights;
  int longitude_count = 0;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  [[nodiscard]] double longitude(int index) const;
};

/// Level-j rule H_j, exact for degree 2^{j+2}.
CubatureRule build_rule(int j, const SphereDim& dim);
CubatureRule build_rule_for_degree(int degree, const SphereDim& dim);

/// sum_eta lambda_eta f(eta); throws NumericalError naming the first node
/// where f is not finite.
double integrate(const CubatureRule& rule, const std::function<double(const UnitVector&)>& f);

struct RuleDiagnostics {
  double separation;        // min pairwise distance times 2^j
  double min_weight_ratio;  // min lambda times 2^{j(d-1)}
  double max_weight_ratio;  // max lambda times 2^{j(d-1)}
};

RuleDiagnostics diagnostics(const CubatureRule& rule);

/// CSV export: header x1..xd,weight then one row per node.
void write_rule_csv(const CubatureRule& rule, std::ostream& out);

}  // namespace needlet
