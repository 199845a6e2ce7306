#pragma once

#include "mm/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mm {

// Discrete family p_k(theta) = c_k theta^k / q(theta) on an open interval.
struct PowerSeriesFamily {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(double)> q;
  std::function<double(double)> dq;
  std::function<double(double)> d2q;
  std::vector<double> coefficients;  // optional, empty unless finite series

  bool contains(double theta) const { return theta > lo && theta < hi; }
};

PowerSeriesFamily truncated_poisson_family();  // q = e^t - 1 on (0, inf)
PowerSeriesFamily geometric_family();          // q = 1/(1-t) on (0, 1)
PowerSeriesFamily logarithmic_family();        // q = -ln(1-t) on (0, 1)

// Finite polynomial family from its coefficient list (a_0, ..., a_M).
PowerSeriesFamily family_from_coefficients(std::string name,
                                           std::vector<double> coeffs,
                                           double lo, double hi);

struct PowerSeriesSample {
  double xbar = 0.0;
  int m = 0;
};

// M(theta) = xbar q/q'; throws DomainError when the result escapes the domain.
double ps_iterate(double theta, const PowerSeriesFamily& family,
                  const PowerSeriesSample& sample);

double ps_loglik(double theta, const PowerSeriesFamily& family,
                 const PowerSeriesSample& sample);

// M'(theta_hat) = 1 - sigma^2/mu at a stationary point.
double ps_local_rate(double theta_hat, const PowerSeriesFamily& family);

enum class LogConcavity { LogConcave, Inconclusive };

// Sufficient ratio test: (k+1)a_{k+1}/a_k non-increasing. The sequence is
// read as a_1, a_2, ... (the families here have no constant term).
LogConcavity log_concavity_check(const std::vector<double>& coefficients);

class PowerSeriesProblem : public MMProblem {
 public:
  PowerSeriesProblem(PowerSeriesFamily family, PowerSeriesSample sample,
                     bool declared_monotone)
      : family_(std::move(family)), sample_(sample), monotone_(declared_monotone) {}

  int dimension() const override { return 1; }
  Sense sense() const override { return Sense::Maximize; }
  bool monotone() const override { return monotone_; }
  bool feasible(const VectorXd& theta) const override {
    return family_.contains(theta[0]);
  }
  double objective(const VectorXd& theta) const override {
    return ps_loglik(theta[0], family_, sample_);
  }
  VectorXd mm_map(const VectorXd& theta) const override {
    VectorXd out(1);
    out[0] = ps_iterate(theta[0], family_, sample_);
    return out;
  }
  const PowerSeriesFamily& family() const { return family_; }

 private:
  PowerSeriesFamily family_;
  PowerSeriesSample sample_;
  bool monotone_;
};

// Convenience: built-in problem with the right monotonicity declaration
// (only the truncated Poisson has log-concave q).
PowerSeriesProblem make_power_series_problem(const std::string& family_name,
                                             PowerSeriesSample sample);

}  // namespace mm
