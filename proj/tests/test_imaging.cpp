#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mm/imaging.hpp"
#include "mm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

using namespace mm;

namespace {

ImageGrid make_grid(int h, int w, double value) {
  ImageGrid g;
  g.values = MatrixXd::Constant(h, w, value);
  return g;
}

ImageGrid random_grid(int h, int w, std::mt19937_64& rng, double lo = 0.0,
                      double hi = 255.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  ImageGrid g;
  g.values.resize(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) g.values(i, j) = unif(rng);
  return g;
}

// independent objective: misfit over accepted pixels plus lambda times the
// smoothed roughness summed over ordered neighbor pairs (each unordered pair
// appears twice, matching the documented double-count convention)
double brute_objective(const ImageGrid& mu, const ImageGrid& y,
                       const PixelMask& mask, const TVConfig& config) {
  const int h = mu.height(), w = mu.width();
  double total = 0.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      if (mask.accept(i, j)) {
        const double r = y.values(i, j) - mu.values(i, j);
        total += r * r;
      }
      const int di[4] = {-1, 1, 0, 0};
      const int dj[4] = {0, 0, -1, 1};
      for (int t = 0; t < 4; ++t) {
        const int k = i + di[t], l = j + dj[t];
        if (k < 0 || k >= h || l < 0 || l >= w) continue;
        total += config.lambda *
                 std::sqrt(std::pow(mu.values(i, j) - mu.values(k, l), 2) +
                           config.eps);
      }
    }
  return total;
}

// independent replica of one checkerboard pass, written from the update rule
ImageGrid brute_sweep(const ImageGrid& mu, const ImageGrid& y,
                      const PixelMask& mask, const TVConfig& config) {
  ImageGrid next = mu;
  const int h = mu.height(), w = mu.width();
  for (int parity = 0; parity <= 1; ++parity) {
    const MatrixXd frozen = next.values;
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        if ((i + j) % 2 != parity) continue;
        double wsum = 0.0, vsum = 0.0;
        const int di[4] = {-1, 1, 0, 0};
        const int dj[4] = {0, 0, -1, 1};
        for (int t = 0; t < 4; ++t) {
          const int k = i + di[t], l = j + dj[t];
          if (k < 0 || k >= h || l < 0 || l >= w) continue;
          const double tnorm =
              std::sqrt(std::pow(frozen(i, j) - frozen(k, l), 2) + config.eps);
          wsum += 1.0 / tnorm;
          vsum += frozen(k, l) / tnorm;
        }
        if (mask.accept(i, j))
          next.values(i, j) = (y.values(i, j) + config.lambda * vsum) /
                              (1.0 + config.lambda * wsum);
        else
          next.values(i, j) = vsum / wsum;
      }
  }
  return next;
}

}  // namespace

TEST_CASE("tv_norm") {
  CHECK(tv_norm(0.0, 1.0) == 1.0);
  CHECK(tv_norm(1.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(tv_norm(-3.0, 0.25) == tv_norm(3.0, 0.25));
  CHECK(tv_norm(4.0, 9.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK_THROWS_AS(tv_norm(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tv_norm(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("tv_objective hand values") {
  // 1x2 image with a unit step, mu == y: misfit 0, one pair counted twice
  ImageGrid mu;
  mu.values.resize(1, 2);
  mu.values << 0.0, 1.0;
  const PixelMask full = PixelMask::full(1, 2);
  CHECK(tv_objective(mu, mu, full, TVConfig{1.0, 1.0, 1}) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));

  // constant 3x4 image: only the sqrt(eps) floor remains; 17 ordered pairs
  const ImageGrid flat = make_grid(3, 4, 7.0);
  const int pairs = 3 * 3 + 2 * 4;  // horizontal + vertical unordered pairs
  CHECK(tv_objective(flat, flat, PixelMask::full(3, 4), TVConfig{2.5, 4.0, 1}) ==
        doctest::Approx(2.0 * 2.5 * pairs * 2.0).epsilon(1e-13));

  // misfit counts only accepted pixels
  ImageGrid y = flat;
  y.values(1, 1) += 3.0;
  PixelMask holed = PixelMask::full(3, 4);
  holed.accept(1, 1) = false;
  CHECK(tv_objective(flat, y, holed, TVConfig{2.5, 4.0, 1}) ==
        doctest::Approx(2.0 * 2.5 * pairs * 2.0).epsilon(1e-13));

  CHECK_THROWS_AS(tv_objective(flat, make_grid(2, 2, 0.0), holed,
                               TVConfig{1.0, 1.0, 1}),
                  std::invalid_argument);
}

TEST_CASE("tv_objective matches the brute-force oracle") {
  std::mt19937_64 rng(67);
  for (int rep = 0; rep < 20; ++rep) {
    const ImageGrid mu = random_grid(4, 4, rng);
    const ImageGrid y = random_grid(4, 4, rng);
    PixelMask mask = PixelMask::full(4, 4);
    mask.accept(rep % 4, (rep / 4) % 4) = false;
    const TVConfig config{0.5 + rep, 0.5 + 0.1 * rep, 1};
    CHECK(std::abs(tv_objective(mu, y, mask, config) -
                   brute_objective(mu, y, mask, config)) <
          1e-12 * std::max(1.0, brute_objective(mu, y, mask, config)));
  }
}

TEST_CASE("checkerboard_sweep fixed point and masked fill") {
  // constant image equal to its data is a fixed point
  const ImageGrid flat = make_grid(5, 5, 42.0);
  const ImageGrid swept =
      checkerboard_sweep(flat, flat, PixelMask::full(5, 5), TVConfig{});
  CHECK((swept.values - flat.values).lpNorm<Eigen::Infinity>() < 1e-13);

  // masked-out pixel surrounded by equal neighbors takes their value
  PixelMask holed = PixelMask::full(3, 3);
  holed.accept(1, 1) = false;
  ImageGrid mu = make_grid(3, 3, 7.0);
  mu.values(1, 1) = 123.0;
  const ImageGrid filled = checkerboard_sweep(mu, make_grid(3, 3, 7.0), holed,
                                              TVConfig{});
  CHECK(filled.values(1, 1) == doctest::Approx(7.0).epsilon(1e-13));
}

TEST_CASE("checkerboard_sweep matches the per-pixel closed-form oracle") {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 20; ++rep) {
    const ImageGrid mu = random_grid(5, 6, rng);
    const ImageGrid y = random_grid(5, 6, rng);
    PixelMask mask = PixelMask::full(5, 6);
    mask.accept(rep % 5, rep % 6) = false;
    const TVConfig config{15.0, 1.0, 1};
    const ImageGrid a = checkerboard_sweep(mu, y, mask, config);
    const ImageGrid b = brute_sweep(mu, y, mask, config);
    CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("masked-out pixel with no neighbors has no update") {
  ImageGrid single = make_grid(1, 1, 5.0);
  PixelMask none;
  none.accept.setConstant(1, 1, false);
  CHECK_THROWS_AS(checkerboard_sweep(single, single, none, TVConfig{}),
                  std::invalid_argument);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((TVConfig{0.0, 1.0, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((TVConfig{1.0, 0.0, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((TVConfig{1.0, 1.0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ImageGrid{}).validate(), std::invalid_argument);
  ImageGrid bad = make_grid(2, 2, 0.0);
  bad.values(0, 0) = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sweeps never increase the objective on randomized instances") {
  std::mt19937_64 rng(73);
  std::uniform_int_distribution<int> size(2, 7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int h = size(rng), w = size(rng);
    ImageGrid mu = random_grid(h, w, rng);
    const ImageGrid y = random_grid(h, w, rng);
    PixelMask mask = PixelMask::full(h, w);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        if (unif(rng) < 0.2) mask.accept(i, j) = false;
    // keep at least one neighbor chain intact for isolated masked pixels
    if (h == 1 && w == 1) mask.accept(0, 0) = true;
    const TVConfig config{0.5 + 30.0 * unif(rng), 0.2 + 2.0 * unif(rng), 1};
    double obj = tv_objective(mu, y, mask, config);
    for (int s = 0; s < 5; ++s) {
      mu = checkerboard_sweep(mu, y, mask, config);
      const double next = tv_objective(mu, y, mask, config);
      CHECK(next <= obj + 1e-10 * std::max(1.0, std::abs(obj)));
      obj = next;
    }
  }
}

TEST_CASE("restore trivial cases") {
  // constant data is already optimal: one sweep, no change
  const ImageGrid flat = make_grid(4, 4, 100.0);
  const auto [restored, trace] = restore(flat, PixelMask::full(4, 4), TVConfig{});
  CHECK((restored.values - flat.values).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(trace.steps.size() == 2);  // initial objective + the single sweep
  for (const auto& step : trace.steps) CHECK(step.monotone);

  // single excluded pixel in constant surroundings is filled exactly
  ImageGrid y = make_grid(3, 3, 10.0);
  y.values(1, 1) = -999.0;  // corrupted reading, excluded below
  PixelMask holed = PixelMask::full(3, 3);
  holed.accept(1, 1) = false;
  const auto [filled, trace2] = restore(y, holed, TVConfig{});
  CHECK(std::abs(filled.values(1, 1) - 10.0) < 1e-10);
  CHECK((filled.values.array() - 10.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("restore denoises a two-region image") {
  std::mt19937_64 rng(79);
  std::normal_distribution<double> noise(0.0, 10.0);
  ImageGrid clean;
  clean.values.resize(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) clean.values(i, j) = j < 4 ? 50.0 : 200.0;
  ImageGrid noisy = clean;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) noisy.values(i, j) += noise(rng);

  const auto [restored, trace] = restore(noisy, PixelMask::full(8, 8), TVConfig{});
  for (size_t s = 1; s < trace.steps.size(); ++s) {
    CHECK(trace.steps[s].monotone);
    CHECK(trace.steps[s].f <= trace.steps[s - 1].f + 1e-10);
  }
  const double mse_noisy = (noisy.values - clean.values).squaredNorm() / 64.0;
  const double mse_restored = (restored.values - clean.values).squaredNorm() / 64.0;
  CHECK(mse_restored < mse_noisy);

  // every update is a convex combination of data and neighbors
  CHECK(restored.values.minCoeff() >= noisy.values.minCoeff() - 1e-10);
  CHECK(restored.values.maxCoeff() <= noisy.values.maxCoeff() + 1e-10);
}

TEST_CASE("restore with an empty mask settles on a constant") {
  ImageGrid y = make_grid(3, 3, 0.0);
  y.values(0, 0) = 90.0;  // mean 10
  PixelMask none;
  none.accept.setConstant(3, 3, false);
  const auto [restored, trace] = restore(y, none, TVConfig{});
  CHECK((restored.values.array() - 10.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("pgm round trip is bit exact") {
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<int> level(0, 255);
  ImageGrid img;
  img.values.resize(9, 13);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 13; ++j) img.values(i, j) = level(rng);

  const std::string path1 = "/tmp/mm_test_rt1.pgm";
  const std::string path2 = "/tmp/mm_test_rt2.pgm";
  write_pgm(path1, img);
  const ImageGrid back = read_pgm(path1);
  CHECK((back.values - img.values).lpNorm<Eigen::Infinity>() == 0.0);
  write_pgm(path2, back);

  std::ifstream f1(path1, std::ios::binary), f2(path2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(!b1.empty());

  // masks: zero excluded, everything else accepted
  ImageGrid maskimg = img;
  maskimg.values(4, 4) = 0.0;
  maskimg.values(0, 1) = 0.0;
  write_pgm(path1, maskimg);
  const PixelMask mask = read_mask_pgm(path1);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 13; ++j)
      CHECK(mask.accept(i, j) == (maskimg.values(i, j) != 0.0));
  std::remove(path1.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("write_pgm clamps and rounds") {
  ImageGrid img;
  img.values.resize(1, 4);
  img.values << -3.0, 12.49, 12.5, 300.0;
  const std::string path = "/tmp/mm_test_clamp.pgm";
  write_pgm(path, img);
  const ImageGrid back = read_pgm(path);
  CHECK(back.values(0, 0) == 0.0);
  CHECK(back.values(0, 1) == 12.0);
  CHECK(back.values(0, 2) == 13.0);
  CHECK(back.values(0, 3) == 255.0);
  std::remove(path.c_str());
}
