#include "needlet/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "needlet/error.hpp"

namespace needlet {
namespace {

constexpr double kRenormTolerance = 1e-8;

void require_supported(int d) {
  if (d < 3) {
    throw DomainError("unsupported sphere dimension d=" + std::to_string(d) + " (need d >= 3)");
  }
}

}  // namespace

double surface_measure(int d) {
  require_supported(d);
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

SphereDim::SphereDim(int d) : d_(d), omega_(surface_measure(d)) {}

UnitVector::UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
  require_supported(dim());
  double sq = 0.0;
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InputError("unit vector has a non-finite coordinate");
    sq += c * c;
  }
  const double norm = std::sqrt(sq);
  if (std::abs(norm - 1.0) > kRenormTolerance) {
    throw InputError("vector norm " + std::to_string(norm) + " is not within 1e-8 of 1");
  }
  for (double& c : coords_) c /= norm;
}

UnitVector::UnitVector(std::initializer_list<double> coords)
    : UnitVector(std::vector<double>(coords)) {}

double UnitVector::dot(const UnitVector& other) const {
  if (other.dim() != dim()) {
    throw InputError("dimension mismatch: " + std::to_string(dim()) + " vs " +
                     std::to_string(other.dim()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < coords_.size(); ++i) s += coords_[i] * other.coords_[i];
  return std::clamp(s, -1.0, 1.0);
}

double geodesic_distance(const UnitVector& x, const UnitVector& y) { return std::acos(x.dot(y)); }

UnitVector sample_uniform(int d, Rng& rng) {
  require_supported(d);
  std::vector<double> v(static_cast<std::size_t>(d));
  double sq = 0.0;
  do {
    sq = 0.0;
    for (double& c : v) {
      c = rng.normal();
      sq += c * c;
    }
  } while (sq < 1e-300);
  const double norm = std::sqrt(sq);
  for (double& c : v) c /= norm;
  return UnitVector(std::move(v));
}

UnitVector from_spherical(double theta, double phi) {
  const double st = std::sin(theta);
  return UnitVector({st * std::cos(phi), st * std::sin(phi), std::cos(theta)});
}

}  // namespace needlet
