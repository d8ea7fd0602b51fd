#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "iscc/metrics.hpp"

namespace iscc {

double fa_threshold(double pfa) {
  if (!(pfa > 0.0 && pfa <= 1.0)) throw std::domain_error("false-alarm probability must be in (0, 1]");
  return -2.0 * std::log(pfa);
}

// Q_1(a, b) = P(Y <= J) for independent Y ~ Poisson(b^2/2), J ~ Poisson(a^2/2),
// which is the Poisson-mixture form of the non-central chi-square (2 dof) tail.
// We sum the complement sum_j P(J = j) P(Y > j) over the j where both factors
// are non-negligible.
double marcum_q1(double a, double b) {
  if (a < 0.0 || b < 0.0) throw std::domain_error("marcum_q1 arguments must be non-negative");
  const double y = 0.5 * b * b;
  const double mu = 0.5 * a * a;
  if (y == 0.0) return 1.0;
  if (mu == 0.0) return std::exp(-y);

  constexpr double kSpread = 40.0;
  const int y_hi = static_cast<int>(std::ceil(y + kSpread * std::sqrt(y) + kSpread));
  const int j_lo = static_cast<int>(std::max(0.0, std::floor(mu - kSpread * std::sqrt(mu) - kSpread)));
  if (j_lo > y_hi) return 1.0;

  // Survival function P(Y > j), j = 0..y_hi, accumulated from the far tail.
  std::vector<double> survival(y_hi + 1, 0.0);
  const double log_y = std::log(y);
  double acc = 0.0;
  for (int j = y_hi; j >= 0; --j) {
    survival[j] = acc;
    acc += std::exp(-y + j * log_y - std::lgamma(j + 1.0));
  }

  const double log_mu = std::log(mu);
  double miss = 0.0;
  for (int j = j_lo; j <= y_hi; ++j) {
    miss += std::exp(-mu + j * log_mu - std::lgamma(j + 1.0)) * survival[j];
  }
  return std::clamp(1.0 - miss, 0.0, 1.0);
}

double detection_probability(double sinr, double pfa) {
  if (sinr < 0.0) throw std::domain_error("sensing SINR must be non-negative");
  const double psi = fa_threshold(pfa);
  if (sinr == 0.0) return std::exp(-0.5 * psi);
  return marcum_q1(std::sqrt(sinr), std::sqrt(psi));
}

}  // namespace iscc
