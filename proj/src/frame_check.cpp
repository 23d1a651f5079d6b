#include "needlet/frame_check.hpp"

#include <algorithm>
#include <cmath>

#include "needlet/error.hpp"
#include "needlet/zonal.hpp"

namespace needlet {

double RandomPolynomial::operator()(const UnitVector& x, const SphereDim& dim) const {
  double v = 0.0;
  for (std::size_t s = 0; s < centers.size(); ++s) {
    const double c = centers[s].dot(x);
    for (std::size_t k = 0; k < multipliers.size(); ++k) {
      v += weights[s] * multipliers[k] * zonal_profile(static_cast<int>(k), c, dim);
    }
  }
  return v;
}

RandomPolynomial random_polynomial(int degree, Rng& rng) {
  RandomPolynomial p;
  for (int s = 0; s < 4; ++s) {
    p.centers.push_back(sample_uniform(3, rng));
    p.weights.push_back(rng.normal());
  }
  for (int k = 0; k <= degree; ++k) p.multipliers.push_back(rng.normal());
  return p;
}

std::vector<FrameCheck> run_frame_checks(const NeedletFrame& frame, const FrameCheckOptions& options) {
  const SphereDim& dim = frame.dim();
  if (dim.d() != 3) throw DomainError("frame checks are implemented for d = 3");
  std::vector<FrameCheck> out;
  Rng rng(options.seed);

  // Cubature: integral of Z^k(., p) is 1 for k = 0 and 0 otherwise.
  const int top = std::min(frame.j_max(), 6);
  double worst_cubature = 0.0;
  double worst_mass = 0.0;
  std::vector<double> gegenbauer;
  for (int j = 0; j <= top; ++j) {
    const CubatureRule& rule = frame.rule(j);
    const int kmax = 1 << (j + 2);
    gegenbauer.resize(static_cast<std::size_t>(kmax) + 1);
    double mass = 0.0;
    for (double w : rule.weights) mass += w;
    worst_mass = std::max(worst_mass, std::abs(mass - dim.omega()));
    for (int p = 0; p < options.poles; ++p) {
      const UnitVector pole = sample_uniform(3, rng);
      std::vector<double> integral(static_cast<std::size_t>(kmax) + 1, 0.0);
      for (std::size_t n = 0; n < rule.size(); ++n) {
        gegenbauer_all(kmax, dim.lambda(), rule.nodes[n].dot(pole), gegenbauer);
        for (int k = 0; k <= kmax; ++k) integral[k] += rule.weights[n] * gegenbauer[k];
      }
      for (int k = 0; k <= kmax; ++k) {
        const double value = integral[k] * zonal_normalization(k, dim);
        worst_cubature = std::max(worst_cubature, std::abs(value - (k == 0 ? 1.0 : 0.0)));
      }
    }
  }
  out.push_back({"cubature exactness", worst_cubature <= options.tol, worst_cubature, options.tol});
  out.push_back({"cubature total weight", worst_mass <= 1e-10, worst_mass, 1e-10});

  // Parseval: ||f||^2 = (int f)^2 / omega + sum beta^2.
  const int parseval_levels = std::min(frame.j_max(), 5) + 1;
  double worst_parseval = 0.0;
  const CubatureRule exact = build_rule_for_degree(2 * options.polynomial_degree, dim);
  for (int q = 0; q < options.polynomials; ++q) {
    const RandomPolynomial f = random_polynomial(options.polynomial_degree, rng);
    auto fx = [&](const UnitVector& x) { return f(x, dim); };
    const double norm_sq = integrate(exact, [&](const UnitVector& x) {
      const double v = fx(x);
      return v * v;
    });
    const CoefficientTable beta = analyze_function(frame, fx, parseval_levels, options.polynomial_degree);
    const double mean_part = beta.constant_term() * beta.constant_term() * dim.omega();
    worst_parseval = std::max(worst_parseval, std::abs(mean_part + beta.sum_of_squares() - norm_sq) / norm_sq);
  }
  out.push_back({"Parseval identity", worst_parseval <= 1e-8, worst_parseval, 1e-8});

  // Reproduction: A_j p = p for deg p <= 2^{j-1}.
  double worst_reproduction = 0.0;
  for (int j = 1; j <= std::min(frame.j_max(), 5); ++j) {
    const int degree = 1 << (j - 1);
    const RandomPolynomial f = random_polynomial(degree, rng);
    const KernelLevel kernel(j, KernelKind::A, frame.window(), dim);
    const CubatureRule rule = build_rule_for_degree(kernel.k_max() + degree, dim);
    std::vector<double> values(rule.size());
    for (std::size_t n = 0; n < rule.size(); ++n) values[n] = f(rule.nodes[n], dim);
    for (int p = 0; p < options.reproduction_points; ++p) {
      const UnitVector x = sample_uniform(3, rng);
      double a = 0.0;
      for (std::size_t n = 0; n < rule.size(); ++n) a += rule.weights[n] * kernel(rule.nodes[n].dot(x)) * values[n];
      worst_reproduction = std::max(worst_reproduction, std::abs(a - f(x, dim)));
    }
  }
  out.push_back({"polynomial reproduction", worst_reproduction <= options.tol, worst_reproduction, options.tol});

  // Norm bounds over every atom.
  double worst_l2 = 0.0;
  double worst_sup_ratio = 0.0;
  double min_center_ratio = INFINITY;
  for (int i = 0; i <= top; ++i) {
    const double scale = std::pow(2.0, i * (dim.d() - 1) / 2.0);
    const double sup_limit = 2.0 / std::sqrt(dim.omega()) * scale;
    const double kernel_at_center = frame.needlet_kernel(i)(1.0);
    for (std::size_t idx = 0; idx < frame.atom_count(i); ++idx) {
      const FrameNorms norms = frame_norms(frame, frame.atom(i, idx));
      worst_l2 = std::max(worst_l2, norms.l2_norm);
      worst_sup_ratio = std::max(worst_sup_ratio, norms.sup_norm / sup_limit);
      if (i >= 2) {
        const double center = std::sqrt(frame.rule(i).weights[idx]) * kernel_at_center;
        min_center_ratio = std::min(min_center_ratio, center / scale);
      }
    }
  }
  out.push_back({"needlet L2 norm", worst_l2 <= 1.0 + 1e-8, worst_l2, 1.0 + 1e-8});
  out.push_back({"needlet sup norm / bound", worst_sup_ratio <= 1.0, worst_sup_ratio, 1.0});
  if (top >= 2) {
    out.push_back({"needlet center value / 2^{i(d-1)/2}", min_center_ratio >= kCenterConstant, min_center_ratio,
                   kCenterConstant});
  }
  return out;
}

}  // namespace needlet
