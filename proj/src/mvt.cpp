#include "mm/mvt.hpp"

#include <cmath>
#include <numbers>

namespace mm {

namespace {

Eigen::LLT<MatrixXd> factor_scale(const MatrixXd& omega) {
  if (omega.rows() != omega.cols())
    throw std::invalid_argument("mvt: omega must be square");
  if ((omega - omega.transpose()).lpNorm<Eigen::Infinity>() > 1e-12)
    throw DomainError("mvt: omega not symmetric");
  Eigen::LLT<MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success)
    throw DomainError("mvt: omega not positive definite");
  return llt;
}

double log_det_from_llt(const Eigen::LLT<MatrixXd>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

void MvtSample::validate() const {
  if (!data.allFinite()) throw std::invalid_argument("MvtSample: non-finite entries");
  if (cases() < dim() + 1)
    throw std::invalid_argument("MvtSample: need at least p+1 observations");
}

void MvtParams::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("MvtParams: nu must be positive");
  factor_scale(omega);  // throws unless symmetric positive definite
}

CaseWeights compute_weights(const MvtSample& sample, const MvtParams& params) {
  const int m = sample.cases();
  const int p = sample.dim();
  const auto llt = factor_scale(params.omega);

  CaseWeights cw;
  cw.w.resize(m);
  cw.d.resize(m);
  for (int i = 0; i < m; ++i) {
    VectorXd diff = sample.data.row(i).transpose() - params.mu;
    // d_i = ||L^{-1} diff||^2, no explicit inverse
    cw.d[i] = llt.matrixL().solve(diff).squaredNorm();
    cw.w[i] = (params.nu + p) / (params.nu + cw.d[i]);
  }
  cw.s = cw.w.sum();
  return cw;
}

namespace {

MvtParams weighted_update(const MvtSample& sample, const MvtParams& params,
                          bool divide_by_s) {
  const int m = sample.cases();
  const CaseWeights cw = compute_weights(sample, params);

  MvtParams next;
  next.nu = params.nu;
  next.mu = (cw.w.asDiagonal() * sample.data).colwise().sum().transpose() / cw.s;

  MatrixXd centered = sample.data.rowwise() - next.mu.transpose();
  next.omega = centered.transpose() * cw.w.asDiagonal() * centered /
               (divide_by_s ? cw.s : static_cast<double>(m));
  Eigen::LLT<MatrixXd> llt(next.omega);
  if (llt.info() != Eigen::Success) throw DomainError("mvt: scale collapsed");
  return next;
}

}  // namespace

MvtParams em_update(const MvtSample& sample, const MvtParams& params) {
  return weighted_update(sample, params, false);
}

MvtParams ktv_update(const MvtSample& sample, const MvtParams& params) {
  return weighted_update(sample, params, true);
}

double mvt_loglik(const MvtSample& sample, const MvtParams& params) {
  const int m = sample.cases();
  const int p = sample.dim();
  const double nu = params.nu;
  const auto llt = factor_scale(params.omega);
  const double log_norm = std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) -
                          0.5 * p * std::log(nu * std::numbers::pi) -
                          0.5 * log_det_from_llt(llt);
  double L = m * log_norm;
  for (int i = 0; i < m; ++i) {
    VectorXd diff = sample.data.row(i).transpose() - params.mu;
    const double d = llt.matrixL().solve(diff).squaredNorm();
    L -= 0.5 * (nu + p) * std::log1p(d / nu);
  }
  return L;
}

MvtParams mvt_init(const MvtSample& sample, double nu) {
  sample.validate();
  const int m = sample.cases();
  MvtParams params;
  params.nu = nu;
  params.mu = sample.data.colwise().mean().transpose();
  MatrixXd centered = sample.data.rowwise() - params.mu.transpose();
  params.omega = centered.transpose() * centered / static_cast<double>(m - 1);
  return params;
}

MvtProblem::MvtProblem(MvtSample sample, double nu, MvtVariant variant)
    : sample_(std::move(sample)), nu_(nu), variant_(variant) {
  sample_.validate();
  if (!(nu > 0.0)) throw std::invalid_argument("MvtProblem: nu must be positive");
}

int MvtProblem::dimension() const {
  const int p = sample_.dim();
  return p + p * (p + 1) / 2;
}

VectorXd MvtProblem::pack(const MvtParams& params) const {
  const int p = sample_.dim();
  VectorXd theta(dimension());
  theta.head(p) = params.mu;
  int idx = p;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) theta[idx++] = params.omega(i, j);
  return theta;
}

MvtParams MvtProblem::unpack(const VectorXd& theta) const {
  const int p = sample_.dim();
  MvtParams params;
  params.nu = nu_;
  params.mu = theta.head(p);
  params.omega.setZero(p, p);
  int idx = p;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) {
      params.omega(i, j) = theta[idx];
      params.omega(j, i) = theta[idx];
      ++idx;
    }
  return params;
}

double MvtProblem::objective(const VectorXd& theta) const {
  return mvt_loglik(sample_, unpack(theta));
}

VectorXd MvtProblem::mm_map(const VectorXd& theta) const {
  const MvtParams params = unpack(theta);
  return pack(variant_ == MvtVariant::Em ? em_update(sample_, params)
                                         : ktv_update(sample_, params));
}

bool MvtProblem::feasible(const VectorXd& theta) const {
  Eigen::LLT<MatrixXd> llt(unpack(theta).omega);
  return llt.info() == Eigen::Success;
}

MvtFit mvt_fit(const MvtSample& sample, double nu, MvtVariant variant,
               const StoppingRule& rule) {
  MvtProblem problem(sample, nu, variant);
  auto [trace, report] = run_mm(problem, problem.pack(mvt_init(sample, nu)), rule);
  return {problem.unpack(report.theta_final), std::move(trace), std::move(report)};
}

}  // namespace mm
