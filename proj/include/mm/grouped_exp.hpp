#pragma once

#include "mm/core.hpp"

namespace mm {

// Interval-grouped exponential counts: thresholds t_1 < ... < t_m (t_0 = 0
// implicit), counts c_0..c_m with c_m the right-censored mass. Counts are
// reals so proportions can be used directly.
struct GroupedExpData {
  VectorXd thresholds;
  VectorXd counts;

  void validate() const;
  VectorXd gaps() const;  // d_i = t_{i+1} - t_i, i = 0..m-1
};

double grouped_loglik(double lambda, const GroupedExpData& data);

// Quadratic-lower-bound update, safeguarded below at lambda/2.
double grouped_mm_update(double lambda, const GroupedExpData& data);

// Conditional-mean EM comparator.
double grouped_em_update(double lambda, const GroupedExpData& data);

enum class GroupedExpAlgo { Mm, Em };

class GroupedExpProblem : public MMProblem {
 public:
  GroupedExpProblem(GroupedExpData data, GroupedExpAlgo algo)
      : data_(std::move(data)), algo_(algo) {
    data_.validate();
  }

  int dimension() const override { return 1; }
  Sense sense() const override { return Sense::Maximize; }
  bool feasible(const VectorXd& theta) const override { return theta[0] > 0.0; }
  double objective(const VectorXd& theta) const override {
    return grouped_loglik(theta[0], data_);
  }
  VectorXd mm_map(const VectorXd& theta) const override {
    VectorXd out(1);
    out[0] = algo_ == GroupedExpAlgo::Mm ? grouped_mm_update(theta[0], data_)
                                         : grouped_em_update(theta[0], data_);
    return out;
  }

 private:
  GroupedExpData data_;
  GroupedExpAlgo algo_;
};

}  // namespace mm
