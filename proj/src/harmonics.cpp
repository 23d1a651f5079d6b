#include "needlet/harmonics.hpp"

#include <cmath>
#include <numbers>

#include "needlet/error.hpp"

namespace needlet {
namespace {

std::size_t table_size(int L) { return static_cast<std::size_t>(L + 1) * (L + 2) / 2; }

// Recurrence factors for k >= m + 2, packed like the table itself.
struct RecurrenceFactors {
  int L = -1;
  std::vector<double> a;
  std::vector<double> b;
};

const RecurrenceFactors& recurrence_factors(int L) {
  thread_local RecurrenceFactors f;
  if (f.L >= L) return f;
  f.L = L;
  f.a.assign(table_size(L), 0.0);
  f.b.assign(table_size(L), 0.0);
  for (int m = 0; m <= L; ++m) {
    for (int k = m + 2; k <= L; ++k) {
      const double kk = static_cast<double>(k) * k;
      const double mm = static_cast<double>(m) * m;
      const double km1 = static_cast<double>(k - 1) * (k - 1);
      const std::size_t i = static_cast<std::size_t>(k) * (k + 1) / 2 + m;
      f.a[i] = std::sqrt((4.0 * kk - 1.0) / (kk - mm));
      f.b[i] = std::sqrt((km1 - mm) / (4.0 * km1 - 1.0));
    }
  }
  return f;
}

// Fills the orthonormal table given z = cos(theta) and s = sin(theta) >= 0.
void legendre_table(int L, double z, double s, std::span<double> out) {
  auto at = [](int k, int m) { return static_cast<std::size_t>(k) * (k + 1) / 2 + m; };
  const RecurrenceFactors& f = recurrence_factors(L);
  double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
  for (int m = 0; m <= L; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    const double scaled = m > 0 ? pmm * std::numbers::sqrt2 : pmm;
    out[at(m, m)] = scaled;
    if (m + 1 <= L) out[at(m + 1, m)] = z * std::sqrt(2.0 * m + 3.0) * scaled;
    for (int k = m + 2; k <= L; ++k) {
      const std::size_t i = at(k, m);
      out[i] = f.a[i] * (z * out[at(k - 1, m)] - f.b[i] * out[at(k - 2, m)]);
    }
  }
}

}  // namespace

void normalized_legendre_table(int max_degree, double z, std::span<double> out) {
  if (std::abs(z) > 1.0) throw DomainError("Legendre argument outside [-1, 1]");
  legendre_table(max_degree, z, std::sqrt(std::max(0.0, 1.0 - z * z)), out);
}

HarmonicCoefficients::HarmonicCoefficients(int max_degree)
    : max_degree_(max_degree), cos_(table_size(max_degree), 0.0), sin_(table_size(max_degree), 0.0) {
  if (max_degree < 0) throw DomainError("harmonic degree must be nonnegative");
}

void HarmonicCoefficients::add_point(const UnitVector& x, double weight) {
  if (x.dim() != 3) throw DomainError("spherical harmonic coefficients are only implemented on S^2");
  const double rho = std::hypot(x[0], x[1]);
  const double cphi = rho > 0.0 ? x[0] / rho : 1.0;
  const double sphi = rho > 0.0 ? x[1] / rho : 0.0;
  const int L = max_degree_;
  thread_local std::vector<double> table;
  table.resize(table_size(L));
  legendre_table(L, x[2], rho, table);
  double cm = 1.0;
  double sm = 0.0;
  for (int m = 0; m <= L; ++m) {
    const double wc = weight * cm;
    const double ws = weight * sm;
    for (int k = m; k <= L; ++k) {
      const std::size_t i = index(k, m);
      cos_[i] += wc * table[i];
      sin_[i] += ws * table[i];
    }
    const double next_c = cm * cphi - sm * sphi;
    sm = sm * cphi + cm * sphi;
    cm = next_c;
  }
}

void HarmonicCoefficients::add_zonal(const UnitVector& pole, std::span<const double> mu) {
  // sum_m Y_km(pole) Y_km(.) = Z^k(pole, .), so the degree-k block of a zonal
  // function is mu[k] * Y_k(pole).
  if (pole.dim() != 3) throw DomainError("spherical harmonic coefficients are only implemented on S^2");
  const double rho = std::hypot(pole[0], pole[1]);
  const double cphi = rho > 0.0 ? pole[0] / rho : 1.0;
  const double sphi = rho > 0.0 ? pole[1] / rho : 0.0;
  const int L = max_degree_;
  std::vector<double> table(table_size(L));
  legendre_table(L, pole[2], rho, table);
  double cm = 1.0;
  double sm = 0.0;
  for (int m = 0; m <= L; ++m) {
    for (int k = m; k <= L && k < static_cast<int>(mu.size()); ++k) {
      const std::size_t i = index(k, m);
      cos_[i] += mu[k] * cm * table[i];
      sin_[i] += mu[k] * sm * table[i];
    }
    const double next_c = cm * cphi - sm * sphi;
    sm = sm * cphi + cm * sphi;
    cm = next_c;
  }
}

double HarmonicCoefficients::synthesize(std::span<const double> degree_weights,
                                        const UnitVector& x) const {
  if (x.dim() != 3) throw DomainError("spherical harmonic synthesis is only implemented on S^2");
  const int L = std::min(max_degree_, static_cast<int>(degree_weights.size()) - 1);
  if (L < 0) return 0.0;
  const double rho = std::hypot(x[0], x[1]);
  const double cphi = rho > 0.0 ? x[0] / rho : 1.0;
  const double sphi = rho > 0.0 ? x[1] / rho : 0.0;
  std::vector<double> table(table_size(L));
  legendre_table(L, x[2], rho, table);
  double total = 0.0;
  double cm = 1.0;
  double sm = 0.0;
  for (int m = 0; m <= L; ++m) {
    double gc = 0.0;
    double gs = 0.0;
    for (int k = m; k <= L; ++k) {
      const double w = degree_weights[k];
      if (w == 0.0) continue;
      const double p = table[static_cast<std::size_t>(k) * (k + 1) / 2 + m];
      gc += w * cos_[index(k, m)] * p;
      gs += w * sin_[index(k, m)] * p;
    }
    total += gc * cm + gs * sm;
    const double next_c = cm * cphi - sm * sphi;
    sm = sm * cphi + cm * sphi;
    cm = next_c;
  }
  return total;
}

std::vector<double> HarmonicCoefficients::synthesize_on_rule(std::span<const double> degree_weights,
                                                             const CubatureRule& rule) const {
  const int L = std::min(max_degree_, static_cast<int>(degree_weights.size()) - 1);
  const int n_lon = rule.longitude_count;
  std::vector<double> out(rule.size(), 0.0);
  if (L < 0) return out;

  std::vector<double> trig_cos(static_cast<std::size_t>(n_lon) * (L + 1));
  std::vector<double> trig_sin(static_cast<std::size_t>(n_lon) * (L + 1));
  for (int b = 0; b < n_lon; ++b) {
    const double phi = rule.longitude(b);
    for (int m = 0; m <= L; ++m) {
      trig_cos[static_cast<std::size_t>(b) * (L + 1) + m] = std::cos(m * phi);
      trig_sin[static_cast<std::size_t>(b) * (L + 1) + m] = std::sin(m * phi);
    }
  }

  int m_lo = 0;
  while (m_lo <= L && degree_weights[m_lo] == 0.0) ++m_lo;  // first active degree
  std::vector<double> table(table_size(L));
  std::vector<double> gc(static_cast<std::size_t>(L) + 1);
  std::vector<double> gs(static_cast<std::size_t>(L) + 1);
  for (std::size_t a = 0; a < rule.latitude_cos.size(); ++a) {
    const double z = rule.latitude_cos[a];
    legendre_table(L, z, std::sqrt(std::max(0.0, 1.0 - z * z)), table);
    for (int m = 0; m <= L; ++m) {
      double c = 0.0;
      double s = 0.0;
      for (int k = std::max(m, m_lo); k <= L; ++k) {
        const double w = degree_weights[k];
        if (w == 0.0) continue;
        const std::size_t i = index(k, m);
        c += w * cos_[i] * table[i];
        s += w * sin_[i] * table[i];
      }
      gc[m] = c;
      gs[m] = s;
    }
    for (int b = 0; b < n_lon; ++b) {
      const double* tc = &trig_cos[static_cast<std::size_t>(b) * (L + 1)];
      const double* ts = &trig_sin[static_cast<std::size_t>(b) * (L + 1)];
      double v = 0.0;
      for (int m = 0; m <= L; ++m) v += gc[m] * tc[m] + gs[m] * ts[m];
      out[a * static_cast<std::size_t>(n_lon) + b] = v;
    }
  }
  return out;
}

void HarmonicCoefficients::scale_degrees(std::span<const double> degree_weights) {
  for (int k = 0; k <= max_degree_; ++k) {
    const double w = k < static_cast<int>(degree_weights.size()) ? degree_weights[k] : 0.0;
    for (int m = 0; m <= k; ++m) {
      cos_[index(k, m)] *= w;
      sin_[index(k, m)] *= w;
    }
  }
}

HarmonicCoefficients& HarmonicCoefficients::operator+=(const HarmonicCoefficients& other) {
  if (other.max_degree_ != max_degree_) throw InputError("harmonic degree mismatch");
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    cos_[i] += other.cos_[i];
    sin_[i] += other.sin_[i];
  }
  return *this;
}

}  // namespace needlet
