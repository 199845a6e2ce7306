#include "mm/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mm {

namespace {

constexpr double kMonotoneTol = 1e-12;

bool finite(const VectorXd& v) { return v.allFinite(); }

// Objective moved in the declared sense, up to roundoff scaled by |f_prev|.
bool step_monotone(Sense sense, double f_prev, double f_new) {
  const double tol = kMonotoneTol * std::max(1.0, std::abs(f_prev));
  return sense == Sense::Maximize ? f_new >= f_prev - tol : f_new <= f_prev + tol;
}

bool at_least_as_good(Sense sense, double cand, double ref) {
  return sense == Sense::Maximize ? cand >= ref : cand <= ref;
}

struct DoubledStep {
  VectorXd point;
  bool doubled = false;
};

DoubledStep step_double_impl(const MMProblem& problem, const VectorXd& theta) {
  VectorXd plain = problem.mm_map(theta);
  VectorXd candidate = theta + 2.0 * (plain - theta);
  if (!finite(candidate) || !problem.feasible(candidate)) return {plain, false};
  double f_cand;
  try {
    f_cand = problem.objective(candidate);
  } catch (const DomainError&) {
    return {plain, false};
  }
  if (!std::isfinite(f_cand)) return {plain, false};
  const double f_plain = problem.objective(plain);
  if (at_least_as_good(problem.sense(), f_cand, f_plain)) return {candidate, true};
  return {plain, false};
}

}  // namespace

void StoppingRule::validate() const {
  if (max_iterations <= 0)
    throw std::invalid_argument("StoppingRule: max_iterations must be positive");
  if (param_tol < 0.0 || objective_tol < 0.0)
    throw std::invalid_argument("StoppingRule: tolerances must be nonnegative");
  if (param_tol == 0.0 && objective_tol == 0.0 && max_iterations <= 0)
    throw std::invalid_argument("StoppingRule: no active criterion");
}

void IterationTrace::write_csv(std::ostream& os) const {
  const int d = steps.empty() ? 0 : static_cast<int>(steps.front().theta.size());
  os << "n,f,monotone";
  for (int j = 0; j < d; ++j) os << ",theta_" << j;
  os << '\n';
  char buf[64];
  for (const auto& s : steps) {
    os << s.n << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", s.f);
    os << buf << ',' << (s.monotone ? 1 : 0);
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.10g", s.theta[j]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

VectorXd step_double(const MMProblem& problem, const VectorXd& theta) {
  return step_double_impl(problem, theta).point;
}

std::pair<IterationTrace, ConvergenceReport> run_mm(const MMProblem& problem,
                                                    const VectorXd& theta0,
                                                    const StoppingRule& rule,
                                                    const DriverOptions& opts) {
  rule.validate();
  if (theta0.size() != problem.dimension())
    throw std::invalid_argument("run_mm: theta0 has dimension " +
                                std::to_string(theta0.size()) + ", problem expects " +
                                std::to_string(problem.dimension()));

  IterationTrace trace;
  ConvergenceReport report;

  VectorXd theta = theta0;
  double f = problem.objective(theta);
  if (!finite(theta) || !std::isfinite(f))
    throw NumericError("run_mm: non-finite objective or parameter at iteration 0");
  trace.steps.push_back({0, theta, f, true, false});

  RunStatus status = RunStatus::MaxIterations;
  for (int n = 1; n <= rule.max_iterations; ++n) {
    VectorXd theta_new;
    bool doubled = false;
    try {
      if (opts.step_doubling) {
        auto step = step_double_impl(problem, theta);
        theta_new = std::move(step.point);
        doubled = step.doubled;
      } else {
        theta_new = problem.mm_map(theta);
      }
    } catch (const DomainError& e) {
      status = RunStatus::Diverged;
      report.message = e.what();
      break;
    }
    if (theta_new.size() != problem.dimension())
      throw NumericError("run_mm: mm_map changed dimension at iteration " +
                         std::to_string(n));
    if (!finite(theta_new))
      throw NumericError("run_mm: non-finite parameter at iteration " +
                         std::to_string(n));
    const double f_new = problem.objective(theta_new);
    if (!std::isfinite(f_new))
      throw NumericError("run_mm: non-finite objective at iteration " +
                         std::to_string(n));

    const bool mono = step_monotone(problem.sense(), f, f_new);
    trace.steps.push_back({n, theta_new, f_new, mono, doubled});
    report.monotone_throughout = report.monotone_throughout && mono;

    const double dtheta = (theta_new - theta).lpNorm<Eigen::Infinity>();
    const double df = std::abs(f_new - f);
    theta = std::move(theta_new);
    f = f_new;
    if ((rule.param_tol > 0.0 && dtheta < rule.param_tol) ||
        (rule.objective_tol > 0.0 && df < rule.objective_tol)) {
      status = RunStatus::Converged;
      break;
    }
  }

  report.theta_final = theta;
  report.iterations = trace.size() - 1;
  report.status = status;
  if (trace.size() >= 4) report.rate_estimate = estimate_rate(trace);
  return {std::move(trace), std::move(report)};
}

std::optional<double> estimate_rate(const IterationTrace& trace) {
  const int n = trace.size();
  if (n < 4) throw std::invalid_argument("estimate_rate: need at least 4 iterates");

  std::vector<double> diffs(n - 1);
  for (int i = 1; i < n; ++i)
    diffs[i - 1] = (trace.steps[i].theta - trace.steps[i - 1].theta)
                       .lpNorm<Eigen::Infinity>();

  std::vector<double> ratios;
  const int nratios = static_cast<int>(diffs.size()) - 1;
  const int take = std::min(5, nratios);
  for (int i = nratios - take; i < nratios; ++i) {
    if (diffs[i] < 1e-14) return std::nullopt;
    ratios.push_back(diffs[i + 1] / diffs[i]);
  }
  if (ratios.empty()) return std::nullopt;
  std::sort(ratios.begin(), ratios.end());
  const size_t m = ratios.size();
  return m % 2 == 1 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
}

SpectralRadiusEstimate spectral_radius_numeric(const MMProblem& problem,
                                               const VectorXd& theta_inf) {
  const int d = problem.dimension();
  if (theta_inf.size() != d)
    throw std::invalid_argument("spectral_radius_numeric: dimension mismatch");
  const double residual =
      (problem.mm_map(theta_inf) - theta_inf).lpNorm<Eigen::Infinity>();
  if (residual >= 1e-8)
    throw std::invalid_argument(
        "spectral_radius_numeric: theta_inf is not a fixed point (residual " +
        std::to_string(residual) + ")");

  Eigen::MatrixXd jac(d, d);
  for (int j = 0; j < d; ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta_inf[j]));
    VectorXd lo = theta_inf, hi = theta_inf;
    lo[j] -= h;
    hi[j] += h;
    jac.col(j) = (problem.mm_map(hi) - problem.mm_map(lo)) / (2.0 * h);
  }

  VectorXd v = VectorXd::Ones(d).normalized();
  double rho = 0.0;
  bool settled = false;
  for (int it = 0; it < 200; ++it) {
    VectorXd w = jac * v;
    const double norm = w.norm();
    if (norm == 0.0) return {0.0, true};
    const double change = std::abs(norm - rho) / std::max(norm, 1e-300);
    rho = norm;
    v = w / norm;
    if (it > 0 && change < 1e-10) {
      settled = true;
      break;
    }
  }
  return {rho, settled};
}

}  // namespace mm
