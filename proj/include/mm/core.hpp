#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>
#include <iosfwd>

namespace mm {

using Eigen::VectorXd;

enum class Sense { Minimize, Maximize };

// Iterate left the feasible domain (divergent family, nonexistent MLE, ...).
// The driver records this and stops instead of aborting.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite objective or parameter; always fatal.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contract every solver exposes to the generic driver: an objective, the MM
// map, and the direction the map is supposed to move the objective.
class MMProblem {
 public:
  virtual ~MMProblem() = default;

  virtual int dimension() const = 0;
  virtual Sense sense() const = 0;
  virtual double objective(const VectorXd& theta) const = 0;
  virtual VectorXd mm_map(const VectorXd& theta) const = 0;

  // Maps that can move the objective the wrong way (logarithmic power-series
  // iteration) declare themselves non-monotone; the driver logs either way.
  virtual bool monotone() const { return true; }
  virtual bool feasible(const VectorXd&) const { return true; }
};

struct IterationStep {
  int n = 0;
  VectorXd theta;
  double f = 0.0;
  bool monotone = true;
  bool doubled = false;  // doubled candidate accepted this step
};

struct IterationTrace {
  std::vector<IterationStep> steps;

  int size() const { return static_cast<int>(steps.size()); }
  const IterationStep& back() const { return steps.back(); }
  // Header: n,f,monotone,theta_0,...,theta_{d-1}; 10 significant digits.
  void write_csv(std::ostream& os) const;
};

struct StoppingRule {
  int max_iterations = 500;
  double param_tol = 1e-8;     // sup-norm of theta change; 0 disables
  double objective_tol = 0.0;  // |f change|; 0 disables

  void validate() const;
};

enum class RunStatus { Converged, MaxIterations, Diverged };

struct ConvergenceReport {
  VectorXd theta_final;
  int iterations = 0;
  std::optional<double> rate_estimate;  // nullopt = not estimable
  bool monotone_throughout = true;
  RunStatus status = RunStatus::Converged;
  std::string message;
};

struct DriverOptions {
  bool step_doubling = false;
};

std::pair<IterationTrace, ConvergenceReport> run_mm(const MMProblem& problem,
                                                    const VectorXd& theta0,
                                                    const StoppingRule& rule,
                                                    const DriverOptions& opts = {});

// theta + 2[M(theta) - theta] when feasible and no worse than the plain step,
// else M(theta).
VectorXd step_double(const MMProblem& problem, const VectorXd& theta);

// Median of ||dtheta_{n+1}||/||dtheta_n|| (sup-norm) over the last 5 steps.
// Requires >= 4 iterates; nullopt when a denominator drops below 1e-14.
std::optional<double> estimate_rate(const IterationTrace& trace);

struct SpectralRadiusEstimate {
  double rho = 0.0;
  bool converged = true;  // power iteration settled
};

// |dominant eigenvalue| of the finite-difference Jacobian of the MM map at a
// near-fixed point (||M(theta)-theta||_inf < 1e-8 enforced).
SpectralRadiusEstimate spectral_radius_numeric(const MMProblem& problem,
                                               const VectorXd& theta_inf);

}  // namespace mm
