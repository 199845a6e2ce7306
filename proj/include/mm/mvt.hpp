#pragma once

#include "mm/core.hpp"

#include <Eigen/Dense>

namespace mm {

using Eigen::MatrixXd;

// Rows are observations.
struct MvtSample {
  MatrixXd data;

  int cases() const { return static_cast<int>(data.rows()); }
  int dim() const { return static_cast<int>(data.cols()); }
  void validate() const;
};

struct MvtParams {
  VectorXd mu;
  MatrixXd omega;  // symmetric positive definite scale
  double nu = 1.0; // degrees of freedom, fixed

  void validate() const;
};

struct CaseWeights {
  VectorXd w;  // (nu+p)/(nu+d_i)
  VectorXd d;  // Mahalanobis distances
  double s = 0.0;
};

CaseWeights compute_weights(const MvtSample& sample, const MvtParams& params);

// Classic EM/MM update: omega normalized by m.
MvtParams em_update(const MvtSample& sample, const MvtParams& params);
// Kent-Tyler-Vardi variant: omega normalized by the weight sum s.
MvtParams ktv_update(const MvtSample& sample, const MvtParams& params);

double mvt_loglik(const MvtSample& sample, const MvtParams& params);

// mu = sample mean, omega = sample covariance.
MvtParams mvt_init(const MvtSample& sample, double nu);

enum class MvtVariant { Em, Ktv };

// theta = [mu; lower triangle of omega, column-major].
class MvtProblem : public MMProblem {
 public:
  MvtProblem(MvtSample sample, double nu, MvtVariant variant);

  int dimension() const override;
  Sense sense() const override { return Sense::Maximize; }
  double objective(const VectorXd& theta) const override;
  VectorXd mm_map(const VectorXd& theta) const override;
  bool feasible(const VectorXd& theta) const override;

  VectorXd pack(const MvtParams& params) const;
  MvtParams unpack(const VectorXd& theta) const;

 private:
  MvtSample sample_;
  double nu_;
  MvtVariant variant_;
};

struct MvtFit {
  MvtParams params;
  IterationTrace trace;
  ConvergenceReport report;
};

MvtFit mvt_fit(const MvtSample& sample, double nu, MvtVariant variant,
               const StoppingRule& rule);

}  // namespace mm
