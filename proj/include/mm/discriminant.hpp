#pragma once

#include "mm/core.hpp"

#include <Eigen/Dense>

namespace mm {

using Eigen::MatrixXd;

// Binary labels are -1/+1; multicategory labels are 1..k+1.
struct LabeledDataset {
  MatrixXd features;
  Eigen::VectorXi labels;

  int cases() const { return static_cast<int>(features.rows()); }
  int predictors() const { return static_cast<int>(features.cols()); }
  void validate_binary() const;
  int validate_multicategory() const;  // returns category count k+1
};

// Coefficients of r(u|u_n) = (u+|u_n|)^2/(4|u_n|+eps): a u^2 + b u + c.
struct QuadCoeffs {
  double a = 0.0, b = 0.0, c = 0.0;
  double eval(double u) const { return (a * u + b) * u + c; }
};

QuadCoeffs hinge_majorizer(double u_n, double eps_reg);

struct BinaryClassifier {
  double alpha = 0.0;
  VectorXd beta;
};

enum class HingeMode { FullWls, Coordinate };

struct FitReport {
  int iterations = 0;
  double objective = 0.0;
  double train_error = 0.0;
  double seconds = 0.0;
  bool monotone = true;
  std::vector<double> objective_trace;
};

double hinge_objective(const LabeledDataset& data, const BinaryClassifier& model,
                       double lambda_ridge);

std::pair<BinaryClassifier, FitReport> hinge_mm_fit(const LabeledDataset& data,
                                                    double lambda_ridge,
                                                    HingeMode mode,
                                                    const StoppingRule& rule);

// k+1 unit-norm vertices in R^k, pairwise inner products -1/k (rows).
MatrixXd simplex_vertices(int k);

// max(||v|| - eps, 0)
double eps_distance(const VectorXd& v, double eps);

struct VdaModel {
  MatrixXd coeffs;     // k x p
  VectorXd intercept;  // k
  MatrixXd vertices;   // (k+1) x k
};

double vda_objective(const LabeledDataset& data, const VdaModel& model,
                     double lambda, double eps);

std::pair<VdaModel, FitReport> vda_fit(const LabeledDataset& data, double lambda,
                                       double eps, const StoppingRule& rule);

// Quadratic-in-v surrogate for (||v||-eps)_+ built at v_n:
// alpha ||v||^2 + beta.v + constant, tangent at v_n.
struct VdaCaseSurrogate {
  double alpha = 0.0;
  VectorXd beta;
  double constant = 0.0;
  bool dead = false;  // ||v_n|| below threshold: contribution frozen at 0
};

VdaCaseSurrogate vda_case_surrogate(const VectorXd& v_n, double eps,
                                    double eps_reg);

int classify(const BinaryClassifier& model, const VectorXd& z);   // -1/+1
int classify(const VdaModel& model, const VectorXd& z);           // 1..k+1

}  // namespace mm
