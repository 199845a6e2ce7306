#pragma once

#include "mm/core.hpp"

#include <Eigen/Dense>

namespace mm {

using Eigen::MatrixXd;

struct ImageGrid {
  MatrixXd values;  // height x width intensities, nominally 0-255

  int height() const { return static_cast<int>(values.rows()); }
  int width() const { return static_cast<int>(values.cols()); }
  void validate() const;
};

// true = pixel carries trustworthy data
struct PixelMask {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> accept;

  static PixelMask full(int height, int width);
  int accepted_count() const { return static_cast<int>(accept.count()); }
};

struct TVConfig {
  double lambda = 15.0;
  double eps = 1.0;
  int sweeps = 200;

  void validate() const;
};

// sqrt(x^2 + eps)
double tv_norm(double x, double eps);

// Data misfit over accepted pixels plus the smoothed-TV roughness penalty
// summed over every pixel's clipped 4-neighborhood (each unordered neighbor
// pair therefore counts twice).
double tv_objective(const ImageGrid& mu, const ImageGrid& y,
                    const PixelMask& mask, const TVConfig& config);

// One checkerboard pass: weighted-average updates of the (i+j) even block
// with TV weights frozen at the incoming image, then the odd block with the
// weights refreshed. The objective never increases across a sweep.
ImageGrid checkerboard_sweep(const ImageGrid& mu, const ImageGrid& y,
                             const PixelMask& mask, const TVConfig& config);

// Runs sweeps until the sup-norm pixel change drops below 1e-4; the trace
// records the objective after each sweep (step 0 = the initial image).
std::pair<ImageGrid, IterationTrace> restore(const ImageGrid& y,
                                             const PixelMask& mask,
                                             const TVConfig& config);

}  // namespace mm
