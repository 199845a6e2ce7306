#pragma once

#include "mm/grouped_exp.hpp"
#include "mm/power_series.hpp"
#include "mm/random_graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mm {

// half-away-from-zero to 5 decimals, the print convention of the reference
// tables
double round5(double x);
std::string format5(double x);

struct SeriesRow {
  int n = 0;
  double theta = 0.0;
  double loglik = 0.0;
};

// Truncated-Poisson run, xbar = 2, m = 10, theta0 = 1; 14 rows (n = 0..13).
std::vector<SeriesRow> table1_rows();
// Logarithmic run, xbar = 2, m = 10, theta0 = 0.99; 18 rows (n = 0..17).
std::vector<SeriesRow> table2_rows();

struct GroupedRow {
  int n = 0;
  double lambda_mm = 0.0, loglik_mm = 0.0;
  double lambda_em = 0.0, loglik_em = 0.0;
};

// Thresholds (1,3,10), counts (0.185,0.266,0.410,0.139), lambda0 = 1;
// 8 rows (n = 0..7).
std::vector<GroupedRow> table3_rows();
GroupedExpData table3_data();

struct GraphExperiment {
  VectorXd p_true;
  VectorXd p_init;
  VectorXd p_hat;
  int iterations = 0;
  bool monotone = true;
  double max_relative_ascent_violation = 0.0;
  double max_stationarity_residual = 0.0;
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  double seconds = 0.0;
};

// Simulate m nodes with p_i = (i - 1/2)/m under the seed, then fit from the
// density-based initialization.
GraphExperiment run_graph_experiment(int m, std::uint64_t seed,
                                     const StoppingRule& rule);

void write_table1_csv(std::ostream& os);
void write_table2_csv(std::ostream& os);
void write_table3_csv(std::ostream& os);
void write_graph_experiment_csv(std::ostream& os, const GraphExperiment& ex);

}  // namespace mm
