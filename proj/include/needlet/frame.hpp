#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "needlet/cubature.hpp"
#include "needlet/harmonics.hpp"
#include "needlet/sphere.hpp"
#include "needlet/window.hpp"
#include "needlet/zonal.hpp"

namespace needlet {

/// psi_{i eta} = sqrt(lambda_eta) C_i(., eta), eta a node of the level-i rule.
struct NeedletAtom {
  int level;
  std::size_t node_index;
  UnitVector center;
  double weight;
};

/// Window pair, cubature rules H_0..H_{J_max} and the kernels C_i.
/// Immutable after construction; safe to share across threads.
class NeedletFrame {
 public:
  NeedletFrame(const SphereDim& dim, int j_max);
  ~NeedletFrame();
  NeedletFrame(NeedletFrame&&) noexcept;
  NeedletFrame& operator=(NeedletFrame&&) noexcept;

  [[nodiscard]] const SphereDim& dim() const { return dim_; }
  [[nodiscard]] int j_max() const { return j_max_; }
  [[nodiscard]] const WindowPair& window() const { return window_; }
  [[nodiscard]] const CubatureRule& rule(int level) const;
  [[nodiscard]] const KernelLevel& needlet_kernel(int level) const;

  [[nodiscard]] std::size_t atom_count(int level) const { return rule(level).size(); }
  [[nodiscard]] NeedletAtom atom(int level, std::size_t node_index) const;

  /// Max of |C_i(cos r)| over a uniform grid of 10^4 * 2^i distances r in
  /// [0, pi] (capped at 10^6 points), with the distance where it occurs.
  struct ProfileSup {
    double value;
    double argmax_distance;
  };
  [[nodiscard]] ProfileSup level_profile_sup(int level) const;

  /// sqrt(b(k / 2^i)) for k = 0..2^{i+1}-1, the degree weights of C_i.
  [[nodiscard]] std::span<const double> needlet_weights(int level) const;

 private:
  void check_level(int level) const;

  SphereDim dim_;
  int j_max_;
  WindowPair window_;
  std::vector<CubatureRule> rules_;
  std::vector<KernelLevel> kernels_;
  std::vector<std::vector<double>> degree_weights_;
  struct SupCache;
  std::unique_ptr<SupCache> sup_cache_;
};

double psi_eval(const NeedletFrame& frame, const NeedletAtom& atom, const UnitVector& x);

/// psi_{i eta}(x) for every atom of levels 0..up_to_level-1.
std::vector<std::vector<double>> psi_at_point(const NeedletFrame& frame, const UnitVector& x,
                                              int up_to_level);

enum class CoefficientKind { TrueBeta, EmpiricalBeta };

/// Needlet coefficients for levels 0..level_count()-1 of a frame, stored
/// densely in atom order, plus the constant term <f, 1> / omega.
class CoefficientTable {
 public:
  CoefficientTable(const NeedletFrame& frame, int level_count, CoefficientKind kind);
  CoefficientTable(int d, std::vector<std::size_t> level_sizes, CoefficientKind kind);

  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] int level_count() const { return static_cast<int>(levels_.size()); }
  [[nodiscard]] CoefficientKind kind() const { return kind_; }

  [[nodiscard]] double constant_term() const { return constant_term_; }
  void set_constant_term(double c) { constant_term_ = c; }

  [[nodiscard]] std::span<const double> level(int i) const { return levels_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] std::span<double> level(int i) { return levels_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] double value(int i, std::size_t idx) const { return level(i)[idx]; }
  void set(int i, std::size_t idx, double v);

  /// Sum of squared coefficients over all levels.
  [[nodiscard]] double sum_of_squares() const;

  friend bool operator==(const CoefficientTable&, const CoefficientTable&) = default;

 private:
  int d_;
  CoefficientKind kind_;
  double constant_term_ = 0.0;
  std::vector<std::vector<double>> levels_;
};

/// Keep-predicate over (level, node_index, coefficient); absent means keep all.
using CoefficientMask = std::function<bool(int, std::size_t, double)>;

/// beta_{i eta} = <f, psi_{i eta}> for levels < up_to_level.
///
/// With `bandwidth` (f a polynomial of that degree) the inner products use
/// a product rule exact for degree 2^{up_to_level} + bandwidth. Otherwise
/// the rule of level up_to_level + 2, i.e. level i + 3 for the finest
/// analysed level i, is used.
CoefficientTable analyze_function(const NeedletFrame& frame,
                                  const std::function<double(const UnitVector&)>& f,
                                  int up_to_level, std::optional<int> bandwidth = std::nullopt);

/// Same inner products against an explicit rule, by direct summation over
/// (atom, node) pairs. Slow; used to cross-check the spectral route.
CoefficientTable analyze_function_direct(const NeedletFrame& frame,
                                         const std::function<double(const UnitVector&)>& f,
                                         int up_to_level, const CubatureRule& quadrature);

/// Exact coefficients of a zonal expansion via the Funk-Hecke identity
/// <Z^k(p, .), psi_{i eta}> = sqrt(lambda_eta) sqrt(b(k/2^i)) Z^k(p, eta).
CoefficientTable analyze_zonal(const NeedletFrame& frame, const ZonalExpansion& f, int up_to_level);

/// Empirical coefficients (1/n) sum_k psi_{i eta}(X_k) for levels < up_to_level.
CoefficientTable analyze_sample(const NeedletFrame& frame, std::span<const UnitVector> sample,
                                int up_to_level);
CoefficientTable analyze_sample_direct(const NeedletFrame& frame,
                                       std::span<const UnitVector> sample, int up_to_level);

/// Empirical harmonic coefficients (1/n) sum_k Y(X_k) up to the degree
/// needed by levels < up_to_level; shared by analyze_sample and the
/// Monte Carlo harness.
HarmonicCoefficients empirical_harmonics(std::span<const UnitVector> sample, int up_to_level);

/// Turns harmonic coefficients into needlet coefficients on every atom.
CoefficientTable table_from_harmonics(const NeedletFrame& frame, const HarmonicCoefficients& c,
                                      int up_to_level, CoefficientKind kind, double constant_term);

/// Harmonic coefficients of sum over kept entries of coefficient * psi for
/// levels < up_to_level (constant term excluded), exact by cubature.
HarmonicCoefficients harmonics_from_table(const NeedletFrame& frame, const CoefficientTable& table,
                                          int up_to_level, const CoefficientMask& keep = {});

/// constant_term + sum over kept entries of coefficient * psi(x).
double synthesize(const NeedletFrame& frame, const CoefficientTable& table, const UnitVector& x,
                  const CoefficientMask& keep = {});

struct FrameNorms {
  double l2_norm;
  double sup_norm;
};

/// L2 norm from the orthogonality of the Z^k (equal to cubature of psi^2 on
/// any rule of degree >= 2^{i+2}); sup norm from the zonal distance grid.
FrameNorms frame_norms(const NeedletFrame& frame, const NeedletAtom& atom);

/// ||psi||_2 by cubature of psi^2 on the level-(i+1) rule.
double l2_norm_by_cubature(const NeedletFrame& frame, const NeedletAtom& atom);

/// JSON text {dim, levels, kind, constant_term, entries:[{i, idx, value}]}.
std::string table_to_json(const CoefficientTable& table);
CoefficientTable table_from_json(const std::string& text, const NeedletFrame& frame);

}  // namespace needlet
