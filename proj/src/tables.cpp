#include "mm/tables.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace mm {

double round5(double x) { return std::round(x * 1e5) / 1e5; }

std::string format5(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5f", round5(x));
  return buf;
}

namespace {

std::vector<SeriesRow> series_rows(const PowerSeriesFamily& family,
                                   const PowerSeriesSample& sample,
                                   double theta0, int iterations) {
  std::vector<SeriesRow> rows;
  double theta = theta0;
  rows.push_back({0, theta, ps_loglik(theta, family, sample)});
  for (int n = 1; n <= iterations; ++n) {
    theta = ps_iterate(theta, family, sample);
    rows.push_back({n, theta, ps_loglik(theta, family, sample)});
  }
  return rows;
}

}  // namespace

std::vector<SeriesRow> table1_rows() {
  return series_rows(truncated_poisson_family(), {2.0, 10}, 1.0, 13);
}

std::vector<SeriesRow> table2_rows() {
  return series_rows(logarithmic_family(), {2.0, 10}, 0.99, 17);
}

GroupedExpData table3_data() {
  GroupedExpData data;
  data.thresholds = Eigen::Vector3d(1.0, 3.0, 10.0);
  data.counts = Eigen::Vector4d(0.185, 0.266, 0.410, 0.139);
  return data;
}

std::vector<GroupedRow> table3_rows() {
  const GroupedExpData data = table3_data();
  std::vector<GroupedRow> rows;
  double mm = 1.0, em = 1.0;
  rows.push_back({0, mm, grouped_loglik(mm, data), em, grouped_loglik(em, data)});
  for (int n = 1; n <= 7; ++n) {
    mm = grouped_mm_update(mm, data);
    em = grouped_em_update(em, data);
    rows.push_back({n, mm, grouped_loglik(mm, data), em, grouped_loglik(em, data)});
  }
  return rows;
}

GraphExperiment run_graph_experiment(int m, std::uint64_t seed,
                                     const StoppingRule& rule) {
  if (m < 2) throw std::invalid_argument("run_graph_experiment: m must be >= 2");
  GraphExperiment ex;
  ex.p_true.resize(m);
  for (int i = 0; i < m; ++i) ex.p_true[i] = (i + 0.5) / m;

  const auto t0 = std::chrono::steady_clock::now();
  GraphProblem problem(graph_simulate(ex.p_true, seed));
  ex.p_init = graph_init(problem.graph());
  auto [trace, report] = run_mm(problem, ex.p_init, rule);

  ex.p_hat = report.theta_final;
  ex.iterations = report.iterations;
  ex.monotone = report.monotone_throughout;
  for (int s = 1; s < trace.size(); ++s) {
    const double prev = trace.steps[s - 1].f;
    const double drop = prev - trace.steps[s].f;  // ascent means drop <= 0
    if (drop > 0.0)
      ex.max_relative_ascent_violation = std::max(
          ex.max_relative_ascent_violation, drop / std::max(1.0, std::abs(prev)));
  }
  ex.max_stationarity_residual =
      graph_stationarity_residual(problem.graph(), ex.p_hat).maxCoeff();
  ex.mean_abs_error = (ex.p_hat - ex.p_true).cwiseAbs().mean();
  ex.max_abs_error = (ex.p_hat - ex.p_true).lpNorm<Eigen::Infinity>();
  ex.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return ex;
}

void write_table1_csv(std::ostream& os) {
  os << "n,theta,L\n";
  for (const auto& r : table1_rows())
    os << r.n << ',' << format5(r.theta) << ',' << format5(r.loglik) << '\n';
}

void write_table2_csv(std::ostream& os) {
  os << "n,theta,L\n";
  for (const auto& r : table2_rows())
    os << r.n << ',' << format5(r.theta) << ',' << format5(r.loglik) << '\n';
}

void write_table3_csv(std::ostream& os) {
  os << "n,lambda_mm,L_mm,lambda_em,L_em\n";
  for (const auto& r : table3_rows())
    os << r.n << ',' << format5(r.lambda_mm) << ',' << format5(r.loglik_mm)
       << ',' << format5(r.lambda_em) << ',' << format5(r.loglik_em) << '\n';
}

void write_graph_experiment_csv(std::ostream& os, const GraphExperiment& ex) {
  char buf[64];
  const auto g = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return std::string(buf);
  };
  os << "nodes," << ex.p_true.size() << '\n'
     << "iterations," << ex.iterations << '\n'
     << "monotone," << (ex.monotone ? 1 : 0) << '\n'
     << "max_relative_ascent_violation," << g(ex.max_relative_ascent_violation) << '\n'
     << "max_stationarity_residual," << g(ex.max_stationarity_residual) << '\n'
     << "mean_abs_error," << g(ex.mean_abs_error) << '\n'
     << "max_abs_error," << g(ex.max_abs_error) << '\n'
     << "seconds," << g(ex.seconds) << '\n';
  os << "node,p_true,p_init,p_hat\n";
  for (int i = 0; i < ex.p_true.size(); ++i)
    os << i << ',' << g(ex.p_true[i]) << ',' << g(ex.p_init[i]) << ','
       << g(ex.p_hat[i]) << '\n';
}

}  // namespace mm
