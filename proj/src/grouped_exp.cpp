#include "mm/grouped_exp.hpp"

#include <cmath>

namespace mm {

namespace {

// e^x/(e^x - 1) * d  and  e^{x/2} d^2/4 / (e^{x/2}-1)^2 with x = lambda d,
// series branches for tiny x to dodge 0/0.
double interior_mean_term(double lambda, double d) {
  const double x = lambda * d;
  if (x < 1e-8) return 1.0 / lambda + 0.5 * d + x * d / 12.0;
  return d / (-std::expm1(-x));
}

double curvature_term(double lambda, double d) {
  const double y = 0.5 * lambda * d;
  if (y < 5e-9) return 1.0 / (lambda * lambda) - d * d / 48.0;
  const double e = std::expm1(y);
  return std::exp(y) * d * d / 4.0 / (e * e);
}

}  // namespace

void GroupedExpData::validate() const {
  const auto m = thresholds.size();
  if (m < 1) throw std::invalid_argument("GroupedExpData: need at least 1 threshold");
  if (counts.size() != m + 1)
    throw std::invalid_argument("GroupedExpData: counts must have thresholds+1 entries");
  double prev = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(thresholds[i] > prev))
      throw std::invalid_argument("GroupedExpData: thresholds must be strictly increasing and positive");
    prev = thresholds[i];
  }
  if ((counts.array() < 0.0).any() || !(counts.sum() > 0.0))
    throw std::invalid_argument("GroupedExpData: counts must be nonnegative with positive total");
}

VectorXd GroupedExpData::gaps() const {
  const auto m = thresholds.size();
  VectorXd d(m);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    d[i] = thresholds[i] - prev;
    prev = thresholds[i];
  }
  return d;
}

double grouped_loglik(double lambda, const GroupedExpData& data) {
  if (!(lambda > 0.0)) throw std::invalid_argument("grouped_loglik: lambda must be positive");
  const auto m = data.thresholds.size();
  const VectorXd d = data.gaps();
  double L = -data.counts[m] * lambda * data.thresholds[m - 1];
  for (Eigen::Index i = 0; i < m; ++i) {
    L -= lambda * data.counts[i] * data.thresholds[i];
    if (data.counts[i] > 0.0)
      L += data.counts[i] * std::log(std::expm1(lambda * d[i]));
  }
  return L;
}

double grouped_mm_update(double lambda, const GroupedExpData& data) {
  if (!(lambda > 0.0)) throw std::invalid_argument("grouped_mm_update: lambda must be positive");
  const auto m = data.thresholds.size();
  const VectorXd d = data.gaps();
  double num = -data.counts[m] * data.thresholds[m - 1];
  double den = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (data.counts[i] == 0.0) continue;
    num += data.counts[i] * (interior_mean_term(lambda, d[i]) - data.thresholds[i]);
    den += data.counts[i] * curvature_term(lambda, d[i]);
  }
  if (!(den > 0.0)) throw DomainError("grouped_mm_update: no interior mass");
  return std::max(0.5 * lambda, lambda + num / den);
}

double grouped_em_update(double lambda, const GroupedExpData& data) {
  if (!(lambda > 0.0)) throw std::invalid_argument("grouped_em_update: lambda must be positive");
  const auto m = data.thresholds.size();
  double den = data.counts[m] * (data.thresholds[m - 1] + 1.0 / lambda);
  double lo = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double hi = data.thresholds[i];
    // conditional mean of Exp(lambda) on (lo, hi]
    const double elo = std::exp(-lambda * lo), ehi = std::exp(-lambda * hi);
    const double ebar = 1.0 / lambda + (lo * elo - hi * ehi) / (elo - ehi);
    den += data.counts[i] * ebar;
    lo = hi;
  }
  if (!(den > 0.0)) throw DomainError("grouped_em_update: no interior mass");
  return data.counts.sum() / den;
}

}  // namespace mm
