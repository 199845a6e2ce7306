#include "mm/imaging.hpp"

#include <cmath>
#include <iostream>

namespace mm {

namespace {

constexpr double kSweepTol = 1e-4;

void check_shapes(const ImageGrid& mu, const ImageGrid& y,
                  const PixelMask& mask) {
  if (mu.height() != y.height() || mu.width() != y.width() ||
      mask.accept.rows() != y.height() || mask.accept.cols() != y.width())
    throw std::invalid_argument("imaging: shape mismatch");
}

// Exact minimizer of the majorized objective in one pixel, neighbors fixed.
// Every unordered neighbor pair enters the objective twice, so the roughness
// weights carry a factor 2 against the single data term.
double pixel_update(const MatrixXd& mu, const ImageGrid& y,
                    const PixelMask& mask, const TVConfig& config, int i,
                    int j) {
  const int h = static_cast<int>(mu.rows());
  const int w = static_cast<int>(mu.cols());
  double wsum = 0.0, vsum = 0.0;
  const auto add_neighbor = [&](int k, int l) {
    const double t = tv_norm(mu(i, j) - mu(k, l), config.eps);
    wsum += 1.0 / t;
    vsum += mu(k, l) / t;
  };
  if (i > 0) add_neighbor(i - 1, j);
  if (i + 1 < h) add_neighbor(i + 1, j);
  if (j > 0) add_neighbor(i, j - 1);
  if (j + 1 < w) add_neighbor(i, j + 1);

  if (mask.accept(i, j))
    return (y.values(i, j) + config.lambda * vsum) /
           (1.0 + config.lambda * wsum);
  if (wsum == 0.0)
    throw std::invalid_argument(
        "imaging: masked-out pixel with no neighbors has no defined update");
  return vsum / wsum;
}

}  // namespace

void ImageGrid::validate() const {
  if (height() <= 0 || width() <= 0)
    throw std::invalid_argument("ImageGrid: empty image");
  if (!values.allFinite())
    throw std::invalid_argument("ImageGrid: non-finite intensities");
}

PixelMask PixelMask::full(int height, int width) {
  PixelMask m;
  m.accept.setConstant(height, width, true);
  return m;
}

void TVConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("TVConfig: lambda must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("TVConfig: eps must be positive");
  if (sweeps <= 0) throw std::invalid_argument("TVConfig: sweeps must be positive");
}

double tv_norm(double x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("tv_norm: eps must be positive");
  return std::sqrt(x * x + eps);
}

double tv_objective(const ImageGrid& mu, const ImageGrid& y,
                    const PixelMask& mask, const TVConfig& config) {
  check_shapes(mu, y, mask);
  const int h = mu.height();
  const int w = mu.width();
  double misfit = 0.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      if (mask.accept(i, j)) {
        const double r = y.values(i, j) - mu.values(i, j);
        misfit += r * r;
      }
  // one direction of each pair, doubled
  double rough = 0.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      if (i + 1 < h)
        rough += tv_norm(mu.values(i, j) - mu.values(i + 1, j), config.eps);
      if (j + 1 < w)
        rough += tv_norm(mu.values(i, j) - mu.values(i, j + 1), config.eps);
    }
  return misfit + 2.0 * config.lambda * rough;
}

ImageGrid checkerboard_sweep(const ImageGrid& mu, const ImageGrid& y,
                             const PixelMask& mask, const TVConfig& config) {
  check_shapes(mu, y, mask);
  config.validate();
  ImageGrid next = mu;
  for (int parity = 0; parity <= 1; ++parity) {
    // freeze the weights at the current image for this half-sweep
    const MatrixXd frozen = next.values;
    for (int i = 0; i < next.height(); ++i)
      for (int j = (i + parity) % 2; j < next.width(); j += 2)
        next.values(i, j) = pixel_update(frozen, y, mask, config, i, j);
  }
  return next;
}

std::pair<ImageGrid, IterationTrace> restore(const ImageGrid& y,
                                             const PixelMask& mask,
                                             const TVConfig& config) {
  y.validate();
  check_shapes(y, y, mask);
  config.validate();

  ImageGrid mu = y;
  if (mask.accepted_count() == 0) {
    std::cerr << "warning: empty mask, restoration is data-free\n";
    mu.values.setConstant(y.values.mean());
  } else if (mask.accepted_count() < y.height() * y.width()) {
    const double fill =
        mask.accept.select(y.values.array(), 0.0).sum() / mask.accepted_count();
    mu.values = mask.accept.select(y.values.array(), fill);
  }

  IterationTrace trace;
  double obj = tv_objective(mu, y, mask, config);
  trace.steps.push_back({0, VectorXd(), obj, true, false});
  for (int s = 1; s <= config.sweeps; ++s) {
    ImageGrid next = checkerboard_sweep(mu, y, mask, config);
    const double change = (next.values - mu.values).lpNorm<Eigen::Infinity>();
    const double new_obj = tv_objective(next, y, mask, config);
    const bool mono = new_obj <= obj + 1e-12 * std::max(1.0, std::abs(obj));
    trace.steps.push_back({s, VectorXd(), new_obj, mono, false});
    mu = std::move(next);
    obj = new_obj;
    if (change < kSweepTol) break;
  }
  return {std::move(mu), std::move(trace)};
}

}  // namespace mm
