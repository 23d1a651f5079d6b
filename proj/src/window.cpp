#include "needlet/window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "needlet/error.hpp"

namespace needlet {

double bump(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u)));
}

WindowPair::WindowPair() : phi_(kTableIntervals + 1), slope_(kTableIntervals + 1) {
  const double h = 1.0 / kTableIntervals;
  std::vector<double> cumulative(kTableIntervals + 1, 0.0);
  for (int i = 0; i < kTableIntervals; ++i) {
    const double u0 = i * h;
    cumulative[i + 1] =
        cumulative[i] + h / 6.0 * (bump(u0) + 4.0 * bump(u0 + 0.5 * h) + bump(u0 + h));
  }
  const double total = cumulative.back();
  for (int i = 0; i <= kTableIntervals; ++i) {
    phi_[i] = cumulative[i] / total;
    slope_[i] = bump(i * h) / total;
  }
  // Pin the endpoints and the symmetric midpoint exactly.
  phi_.front() = 0.0;
  phi_.back() = 1.0;
  phi_[kTableIntervals / 2] = 0.5;

  floor_ = certify_floor();
  if (!(floor_ > 0.0)) throw NumericalError("window floor of b on [1, 7/4] is not positive");
}

double WindowPair::profile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double pos = u * kTableIntervals;
  const int i = std::min(static_cast<int>(pos), kTableIntervals - 1);
  const double h = 1.0 / kTableIntervals;
  const double s = pos - i;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * phi_[i] + h10 * h * slope_[i] + h01 * phi_[i + 1] + h11 * h * slope_[i + 1];
}

double WindowPair::eval_a(double x) const {
  if (std::isnan(x) || x < 0.0) throw DomainError("window argument must be nonnegative");
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  return 1.0 - profile(2.0 * x - 1.0);
}

double WindowPair::eval_b(double x) const { return eval_a(0.5 * x) - eval_a(x); }

double WindowPair::certify_floor() const {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kFloorGridPoints; ++i) {
    const double x = 1.0 + 0.75 * i / (kFloorGridPoints - 1);
    lo = std::min(lo, eval_b(x));
  }
  return lo;
}

}  // namespace needlet
