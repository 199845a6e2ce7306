#include "mm/power_series.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace mm {

PowerSeriesFamily truncated_poisson_family() {
  PowerSeriesFamily f;
  f.name = "trunc-poisson";
  f.lo = 0.0;
  f.hi = std::numeric_limits<double>::infinity();
  f.q = [](double t) { return std::expm1(t); };
  f.dq = [](double t) { return std::exp(t); };
  f.d2q = [](double t) { return std::exp(t); };
  return f;
}

PowerSeriesFamily geometric_family() {
  PowerSeriesFamily f;
  f.name = "geometric";
  f.lo = 0.0;
  f.hi = 1.0;
  f.q = [](double t) { return 1.0 / (1.0 - t); };
  f.dq = [](double t) { return 1.0 / ((1.0 - t) * (1.0 - t)); };
  f.d2q = [](double t) { return 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t)); };
  return f;
}

PowerSeriesFamily logarithmic_family() {
  PowerSeriesFamily f;
  f.name = "logarithmic";
  f.lo = 0.0;
  f.hi = 1.0;
  f.q = [](double t) { return -std::log1p(-t); };
  f.dq = [](double t) { return 1.0 / (1.0 - t); };
  f.d2q = [](double t) { return 1.0 / ((1.0 - t) * (1.0 - t)); };
  return f;
}

PowerSeriesFamily family_from_coefficients(std::string name,
                                           std::vector<double> coeffs,
                                           double lo, double hi) {
  if (coeffs.empty())
    throw std::invalid_argument("family_from_coefficients: empty coefficient list");
  PowerSeriesFamily f;
  f.name = std::move(name);
  f.lo = lo;
  f.hi = hi;
  auto c = std::make_shared<std::vector<double>>(std::move(coeffs));
  f.coefficients = *c;
  f.q = [c](double t) {
    double s = 0.0;
    for (size_t k = c->size(); k-- > 0;) s = s * t + (*c)[k];
    return s;
  };
  f.dq = [c](double t) {
    double s = 0.0;
    for (size_t k = c->size(); k-- > 1;) s = s * t + static_cast<double>(k) * (*c)[k];
    return s;
  };
  f.d2q = [c](double t) {
    double s = 0.0;
    for (size_t k = c->size(); k-- > 2;)
      s = s * t + static_cast<double>(k) * static_cast<double>(k - 1) * (*c)[k];
    return s;
  };
  return f;
}

double ps_iterate(double theta, const PowerSeriesFamily& family,
                  const PowerSeriesSample& sample) {
  if (!family.contains(theta))
    throw std::invalid_argument("ps_iterate: theta outside family domain");
  const double next = sample.xbar * family.q(theta) / family.dq(theta);
  if (!family.contains(next))
    throw DomainError("iterate escaped domain of family " + family.name);
  return next;
}

double ps_loglik(double theta, const PowerSeriesFamily& family,
                 const PowerSeriesSample& sample) {
  if (!family.contains(theta))
    throw std::invalid_argument("ps_loglik: theta outside family domain");
  return sample.m * (sample.xbar * std::log(theta) - std::log(family.q(theta)));
}

double ps_local_rate(double theta_hat, const PowerSeriesFamily& family) {
  if (!family.contains(theta_hat))
    throw std::invalid_argument("ps_local_rate: theta outside family domain");
  const double q = family.q(theta_hat);
  const double mu = theta_hat * family.dq(theta_hat) / q;
  if (mu == 0.0) throw std::invalid_argument("ps_local_rate: degenerate (mu = 0)");
  const double fac2 = theta_hat * theta_hat * family.d2q(theta_hat) / q;
  const double sigma2 = mu + fac2 - mu * mu;
  return 1.0 - sigma2 / mu;
}

LogConcavity log_concavity_check(const std::vector<double>& coefficients) {
  if (coefficients.empty())
    throw std::invalid_argument("log_concavity_check: empty sequence");
  for (double a : coefficients)
    if (!(a > 0.0)) return LogConcavity::Inconclusive;
  // sequence read as a_1, a_2, ...; test ratio (k+1) a_{k+1}/a_k
  double prev = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j + 1 < coefficients.size(); ++j) {
    const double k = static_cast<double>(j) + 1.0;
    const double ratio = (k + 1.0) * coefficients[j + 1] / coefficients[j];
    if (ratio > prev * (1.0 + 1e-12)) return LogConcavity::Inconclusive;
    prev = ratio;
  }
  return LogConcavity::LogConcave;
}

PowerSeriesProblem make_power_series_problem(const std::string& family_name,
                                             PowerSeriesSample sample) {
  if (family_name == "trunc-poisson")
    return {truncated_poisson_family(), sample, true};
  if (family_name == "geometric") return {geometric_family(), sample, false};
  if (family_name == "logarithmic") return {logarithmic_family(), sample, false};
  throw std::invalid_argument("unknown power series family: " + family_name);
}

}  // namespace mm
