#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "needlet/frame.hpp"
#include "needlet/random.hpp"
#include "needlet/sphere.hpp"
#include "needlet/zonal.hpp"

namespace needlet {

/// Local Hoelder regularity of f at x0: |f(y) - P_f(y)| <= M d(x0, y)^t on
/// the ball of radius delta, with ||P_f||_inf <= M.
struct HolderParams {
  double t;
  double M;
  double delta;
  UnitVector x0;
  std::function<double(const UnitVector&)> local_poly;
};

struct UniformModel {};

struct VmfComponent {
  UnitVector mean;
  double kappa;
  double weight;
};

struct VmfMixtureModel {
  std::vector<VmfComponent> components;
};

/// f(x) = base + amplitude * min(d(x0, x), delta)^t, base fixed by
/// normalization.
struct CuspModel {
  UnitVector x0;
  double t;
  double amplitude;
  double delta;
  double base;
};

/// f(x) = 1/omega + sum_j a_j Z^{2^j}(eta, x).
struct SelfSimilarModel {
  UnitVector eta;
  double t;
  double B;
  std::vector<int> levels;
  std::vector<double> amplitudes;
};

class DensityModel {
 public:
  using Variant = std::variant<UniformModel, VmfMixtureModel, CuspModel, SelfSimilarModel>;

  DensityModel(const SphereDim& dim, Variant model, std::optional<double> sup = std::nullopt);

  [[nodiscard]] const SphereDim& dim() const { return dim_; }
  [[nodiscard]] const Variant& variant() const { return model_; }
  [[nodiscard]] std::optional<double> known_sup() const { return sup_; }
  [[nodiscard]] std::string kind() const;
  /// Center of the model's structure (cusp point, self-similar pole, first
  /// vMF mean); nullopt for the uniform density.
  [[nodiscard]] std::optional<UnitVector> center() const;

 private:
  SphereDim dim_;
  Variant model_;
  std::optional<double> sup_;
};

DensityModel make_uniform(const SphereDim& dim);
/// d = 3 only. Weights are renormalized to sum to one.
DensityModel make_vmf_mixture(std::vector<VmfComponent> components);
/// Negative amplitudes put a peak at x0. Throws InputError unless f >= 0.
DensityModel make_cusp(const UnitVector& x0, double t, double amplitude, double delta);

struct SelfSimilarReport {
  double B;
  std::vector<int> levels;
  std::vector<double> amplitudes;
  std::vector<std::size_t> nearest_atoms;
  std::vector<double> target_magnitudes;
  std::vector<double> achieved_magnitudes;
  double min_density;
};

struct SelfSimilarBuild {
  DensityModel model;
  SelfSimilarReport report;
};

/// Sizes a_j so that the coefficient at the level-j atom nearest eta has
/// magnitude B 2^{-j(2t+d-1)/2}. Throws NumericalError (quoting the largest
/// feasible B) if the resulting density is not strictly positive.
SelfSimilarBuild make_self_similar(const NeedletFrame& frame, const UnitVector& eta, double t,
                                   double B, const std::vector<int>& levels);
double max_feasible_self_similar_B(const NeedletFrame& frame, const UnitVector& eta, double t,
                                   const std::vector<int>& levels);

double eval_density(const DensityModel& model, const UnitVector& x);

/// Analytic or refined sup norm of the density.
double sup_norm(const DensityModel& model);

struct SampleStats {
  std::vector<UnitVector> points;
  std::size_t proposals;
};

/// Exact draws: uniform directly, vMF by inversion of the cos(theta)
/// marginal, cusp and self-similar by rejection from the uniform density
/// with acceptance f(x) / ||f||_inf. Requires known_sup() for rejection.
SampleStats sample_density_with_stats(const DensityModel& model, std::size_t n, Rng& rng);
std::vector<UnitVector> sample_density(const DensityModel& model, std::size_t n, Rng& rng);

/// Zonal (Funk-Hecke) multipliers of the density up to max_degree:
/// f = sum_c sum_k mu[c][k] Z^k(pole_c, .), truncated for non-band-limited
/// models.
ZonalExpansion zonal_expansion(const DensityModel& model, int max_degree);

/// Hoelder parameters at the model's structure point (cusp only).
HolderParams holder_params(const CuspModel& cusp);

/// omega_{d-2} int_0^pi g(theta) sin^{d-2}(theta) dtheta, i.e. the surface
/// integral of a function depending only on the distance to a pole.
double zonal_integral(const SphereDim& dim, const std::function<double(double)>& g, double from = 0.0,
                      double to = 3.141592653589793238462643383279502884);

/// JSON model specification. `frame` is needed for self_similar models that
/// do not carry explicit amplitudes.
DensityModel model_from_json(const std::string& text, const NeedletFrame* frame = nullptr);
std::string model_to_json(const DensityModel& model);

}  // namespace needlet
