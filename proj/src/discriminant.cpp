#include "mm/discriminant.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <set>

namespace mm {

namespace {

constexpr double kEpsReg = 1e-5;
constexpr double kJitter = 1e-10;
constexpr double kDeadZone = 1e-12;

double positive_part(double u) { return u > 0.0 ? u : 0.0; }

// Ridge-penalized weighted least squares over [intercept; coeffs]; the
// intercept is not penalized. Singular systems get a jitter ridge and a
// warning, per contract.
VectorXd solve_penalized_wls(const MatrixXd& design, const VectorXd& weights,
                             const VectorXd& targets, double lambda) {
  const int q = static_cast<int>(design.cols());
  MatrixXd normal = design.transpose() * weights.asDiagonal() * design;
  for (int j = 1; j < q; ++j) normal(j, j) += lambda;
  VectorXd rhs = design.transpose() * (weights.asDiagonal() * targets);
  Eigen::LDLT<MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    std::cerr << "warning: singular weighted system, adding ridge jitter\n";
    normal.diagonal().array() += kJitter;
    ldlt.compute(normal);
  }
  return ldlt.solve(rhs);
}

}  // namespace

void LabeledDataset::validate_binary() const {
  if (!features.allFinite())
    throw std::invalid_argument("LabeledDataset: non-finite features");
  bool pos = false, neg = false;
  for (int i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) pos = true;
    else if (labels[i] == -1) neg = true;
    else throw std::invalid_argument("LabeledDataset: binary labels must be -1/+1");
  }
  if (!pos || !neg)
    throw std::invalid_argument("LabeledDataset: both classes must be present");
}

int LabeledDataset::validate_multicategory() const {
  if (!features.allFinite())
    throw std::invalid_argument("LabeledDataset: non-finite features");
  const int ncat = labels.maxCoeff();
  if (labels.minCoeff() < 1)
    throw std::invalid_argument("LabeledDataset: category labels must be 1..k+1");
  std::set<int> present(labels.begin(), labels.end());
  for (int c = 1; c <= ncat; ++c)
    if (!present.count(c))
      throw std::invalid_argument("LabeledDataset: category " + std::to_string(c) +
                                  " absent");
  return ncat;
}

QuadCoeffs hinge_majorizer(double u_n, double eps_reg) {
  if (!(eps_reg > 0.0)) throw std::invalid_argument("hinge_majorizer: eps_reg must be positive");
  const double c = std::abs(u_n);
  const double den = 4.0 * c + eps_reg;
  return {1.0 / den, 2.0 * c / den, c * c / den};
}

double hinge_objective(const LabeledDataset& data, const BinaryClassifier& model,
                       double lambda_ridge) {
  double loss = 0.0;
  for (int i = 0; i < data.cases(); ++i) {
    const double h = model.alpha + data.features.row(i).dot(model.beta);
    loss += positive_part(1.0 - data.labels[i] * h);
  }
  return loss + lambda_ridge * model.beta.squaredNorm();
}

std::pair<BinaryClassifier, FitReport> hinge_mm_fit(const LabeledDataset& data,
                                                    double lambda_ridge,
                                                    HingeMode mode,
                                                    const StoppingRule& rule) {
  data.validate_binary();
  rule.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = data.cases();
  const int p = data.predictors();

  MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = data.features;

  VectorXd coef = VectorXd::Zero(p + 1);  // [alpha; beta]
  BinaryClassifier model{0.0, VectorXd::Zero(p)};
  FitReport report;
  double obj = hinge_objective(data, model, lambda_ridge);
  report.objective_trace.push_back(obj);

  for (int iter = 1; iter <= rule.max_iterations; ++iter) {
    // Majorize each hinge term at u_i = 1 - y_i h_i, giving a WLS problem
    // with weights 1/(4|u_i|+eps) and targets y_i (1 + |u_i|).
    VectorXd weights(n), targets(n);
    for (int i = 0; i < n; ++i) {
      const double u = 1.0 - data.labels[i] * design.row(i).dot(coef);
      const double au = std::abs(u);
      weights[i] = 1.0 / (4.0 * au + kEpsReg);
      targets[i] = data.labels[i] * (1.0 + au);
    }

    VectorXd next = coef;
    if (mode == HingeMode::FullWls) {
      next = solve_penalized_wls(design, weights, targets, lambda_ridge);
    } else {
      // one cyclic pass of exact coordinate minimization of the surrogate
      VectorXd resid = targets - design * next;
      for (int j = 0; j <= p; ++j) {
        const auto col = design.col(j);
        const double denom =
            (weights.array() * col.array().square()).sum() + (j > 0 ? lambda_ridge : 0.0);
        if (denom <= 0.0) continue;
        const double num = (weights.array() * col.array() *
                            (resid.array() + next[j] * col.array())).sum();
        const double updated = num / denom;
        resid += col * (next[j] - updated);
        next[j] = updated;
      }
    }

    const double dcoef = (next - coef).lpNorm<Eigen::Infinity>();
    coef = next;
    model.alpha = coef[0];
    model.beta = coef.tail(p);
    const double new_obj = hinge_objective(data, model, lambda_ridge);
    if (new_obj > obj + 1e-12 * std::max(1.0, std::abs(obj))) report.monotone = false;
    report.objective_trace.push_back(new_obj);
    report.iterations = iter;
    const double dobj = std::abs(new_obj - obj);
    obj = new_obj;
    if ((rule.param_tol > 0.0 && dcoef < rule.param_tol) ||
        (rule.objective_tol > 0.0 && dobj < rule.objective_tol))
      break;
  }

  report.objective = obj;
  int errors = 0;
  for (int i = 0; i < n; ++i)
    if (classify(model, data.features.row(i).transpose()) != data.labels[i]) ++errors;
  report.train_error = static_cast<double>(errors) / n;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(model), std::move(report)};
}

MatrixXd simplex_vertices(int k) {
  if (k < 1) throw std::invalid_argument("simplex_vertices: k must be positive");
  // Centered standard basis of R^{k+1} projected onto the complement of the
  // ones vector, scaled to unit norm.
  VectorXd ones = VectorXd::Ones(k + 1);
  Eigen::HouseholderQR<MatrixXd> qr(ones);
  MatrixXd qfull = qr.householderQ();
  MatrixXd basis = qfull.rightCols(k);  // (k+1) x k, orthonormal, _|_ ones

  MatrixXd centered = MatrixXd::Identity(k + 1, k + 1) -
                      MatrixXd::Constant(k + 1, k + 1, 1.0 / (k + 1));
  MatrixXd vertices = std::sqrt((k + 1.0) / k) * (centered * basis);
  if (k == 1 && vertices(0, 0) < 0.0) vertices = -vertices;  // convention {+1,-1}
  return vertices;
}

double eps_distance(const VectorXd& v, double eps) {
  return positive_part(v.norm() - eps);
}

VdaCaseSurrogate vda_case_surrogate(const VectorXd& v_n, double eps,
                                    double eps_reg) {
  VdaCaseSurrogate s;
  s.beta = VectorXd::Zero(v_n.size());
  const double w_n = v_n.norm();
  if (w_n < kDeadZone) {
    s.dead = true;
    return s;
  }
  // scalar majorizer of (w-eps)_+ at w_n, as a quadratic in w
  const QuadCoeffs r = hinge_majorizer(w_n - eps, eps_reg);
  const double a_w = r.a;
  const double b_w = r.b - 2.0 * r.a * eps;
  const double c_w = (r.a * eps - r.b) * eps + r.c;

  s.alpha = a_w;  // a_w w^2 == a_w ||v||^2 exactly
  s.constant = c_w;
  if (b_w >= 0.0) {
    // w <= (||v||^2 + w_n^2)/(2 w_n), tight at v_n
    s.alpha += 0.5 * b_w / w_n;
    s.constant += 0.5 * b_w * w_n;
  } else {
    // w >= v.v_n/w_n (Cauchy-Schwarz), tight at v_n
    s.beta = (b_w / w_n) * v_n;
  }
  return s;
}

double vda_objective(const LabeledDataset& data, const VdaModel& model,
                     double lambda, double eps) {
  const int n = data.cases();
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    VectorXd v = model.vertices.row(data.labels[i] - 1).transpose() -
                 model.coeffs * data.features.row(i).transpose() - model.intercept;
    loss += eps_distance(v, eps);
  }
  return loss / n + lambda * model.coeffs.rowwise().squaredNorm().sum();
}

std::pair<VdaModel, FitReport> vda_fit(const LabeledDataset& data, double lambda,
                                       double eps, const StoppingRule& rule) {
  rule.validate();
  const int ncat = data.validate_multicategory();
  if (ncat < 2) throw std::invalid_argument("vda_fit: need at least 2 categories");
  const int k = ncat - 1;
  const double cutoff = 0.5 * std::sqrt((2.0 * k + 2.0) / k);
  if (eps >= cutoff)
    std::cerr << "warning: eps " << eps << " at or above the overlap cutoff "
              << cutoff << "\n";

  const auto t0 = std::chrono::steady_clock::now();
  const int n = data.cases();
  const int p = data.predictors();

  VdaModel model;
  model.vertices = simplex_vertices(k);
  model.coeffs = MatrixXd::Zero(k, p);
  model.intercept = VectorXd::Zero(k);

  MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = data.features;
  MatrixXd targets(n, k);
  for (int i = 0; i < n; ++i) targets.row(i) = model.vertices.row(data.labels[i] - 1);

  FitReport report;
  double obj = vda_objective(data, model, lambda, eps);
  report.objective_trace.push_back(obj);

  for (int iter = 1; iter <= rule.max_iterations; ++iter) {
    // Per-case quadratic surrogate coefficients at the current residuals.
    VectorXd weights(n);
    MatrixXd shift(n, k);  // beta_i / (2 alpha_i) correction to the target
    for (int i = 0; i < n; ++i) {
      VectorXd v = targets.row(i).transpose() -
                   model.coeffs * data.features.row(i).transpose() - model.intercept;
      const auto s = vda_case_surrogate(v, eps, kEpsReg);
      if (s.dead) {
        weights[i] = 0.0;
        shift.row(i).setZero();
      } else {
        weights[i] = s.alpha;
        shift.row(i) = s.beta.transpose() / (2.0 * s.alpha);
      }
    }

    // k independent penalized WLS problems; loss carries 1/n, penalty lambda.
    double dparam = 0.0;
    MatrixXd new_coeffs(k, p);
    VectorXd new_intercept(k);
    VectorXd w_scaled = weights / n;
    for (int j = 0; j < k; ++j) {
      VectorXd target_j = targets.col(j) + shift.col(j);
      VectorXd sol = solve_penalized_wls(design, w_scaled, target_j, lambda);
      new_intercept[j] = sol[0];
      new_coeffs.row(j) = sol.tail(p).transpose();
    }
    dparam = std::max((new_coeffs - model.coeffs).lpNorm<Eigen::Infinity>(),
                      (new_intercept - model.intercept).lpNorm<Eigen::Infinity>());
    model.coeffs = std::move(new_coeffs);
    model.intercept = std::move(new_intercept);

    const double new_obj = vda_objective(data, model, lambda, eps);
    if (new_obj > obj + 1e-12 * std::max(1.0, std::abs(obj))) report.monotone = false;
    report.objective_trace.push_back(new_obj);
    report.iterations = iter;
    const double dobj = std::abs(new_obj - obj);
    obj = new_obj;
    if ((rule.param_tol > 0.0 && dparam < rule.param_tol) ||
        (rule.objective_tol > 0.0 && dobj < rule.objective_tol))
      break;
  }

  report.objective = obj;
  int errors = 0;
  for (int i = 0; i < n; ++i)
    if (classify(model, data.features.row(i).transpose()) != data.labels[i]) ++errors;
  report.train_error = static_cast<double>(errors) / n;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(model), std::move(report)};
}

int classify(const BinaryClassifier& model, const VectorXd& z) {
  return model.alpha + z.dot(model.beta) >= 0.0 ? 1 : -1;
}

int classify(const VdaModel& model, const VectorXd& z) {
  VectorXd pred = model.coeffs * z + model.intercept;
  int best = 1;
  double best_dist = (model.vertices.row(0).transpose() - pred).norm();
  for (int c = 1; c < model.vertices.rows(); ++c) {
    const double dist = (model.vertices.row(c).transpose() - pred).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = c + 1;
    }
  }
  return best;
}

}  // namespace mm
