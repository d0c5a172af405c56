#include <doctest.h>

#include <cmath>
#include <numbers>

#include "image_oracles.hpp"
#include "support.hpp"
#include "ubp/blur.hpp"
#include "ubp/error.hpp"

using namespace ubp;
using namespace ubp::testing;

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("radius_to_kernel discretization") {
  CHECK(radius_to_kernel(0.25).is_identity());
  CHECK(radius_to_kernel(-9.75).is_identity());
  CHECK(radius_to_kernel(0.999).is_identity());

  const auto k11 = radius_to_kernel(11);
  CHECK(k11.half_width == 5);
  CHECK(k11.size() == 11);
  CHECK(k11.sigma == doctest::Approx(11.0 / 6.0).epsilon(1e-15));

  CHECK(radius_to_kernel(1).half_width == 1);
  CHECK(radius_to_kernel(10.25).half_width == 5);
  CHECK(radius_to_kernel(41).half_width == 20);
}

TEST_CASE("gaussian_kernel_1d") {
  const auto k = gaussian_kernel_1d(1, 1.0);
  CHECK(std::abs(k.weights[0] - 0.274068619061197) < 1e-12);
  CHECK(std::abs(k.weights[1] - 0.45186276187760605) < 1e-12);
  CHECK(k.weights[0] == k.weights[2]);

  const auto flat = gaussian_kernel_1d(1, 1e3);
  for (double wv : flat.weights) CHECK(std::abs(wv - 1.0 / 3.0) < 1e-3);

  for (std::size_t hw : {1u, 2u, 5u, 20u})
    for (double s : {(2.0 * hw + 1.0) / 6.0, 0.5 * hw, 7.0, 100.0}) {
      const auto g = gaussian_kernel_1d(hw, s);
      CHECK(g.size() == 2 * hw + 1);
      CHECK(std::abs(sum(g.weights) - 1.0) < 1e-6);
      for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g.weights[i] > 0.0);
        CHECK(g.weights[i] == g.weights[g.size() - 1 - i]);
      }
    }

  CHECK_THROWS_AS(gaussian_kernel_1d(1, 0.0), ContractViolation);
  CHECK_THROWS_AS(gaussian_kernel_1d(1, -1.0), ContractViolation);
}

TEST_CASE("reflect101 borders") {
  CHECK(reflect101(-1, 5) == 1);
  CHECK(reflect101(-2, 5) == 2);
  CHECK(reflect101(5, 5) == 3);
  CHECK(reflect101(6, 5) == 2);
  CHECK(reflect101(3, 5) == 3);
  CHECK(reflect101(-30, 5) >= 0);
  CHECK(reflect101(-30, 5) < 5);
  CHECK(reflect101(7, 1) == 0);
}

TEST_CASE("uniform_blur basic cases") {
  const auto img = textured(13, 9, 3, 1);
  CHECK(uniform_blur(img, Kernel::identity()) == img);

  const Image flat(10, 12, 1, 0.37);
  const auto blurred = uniform_blur(flat, radius_to_kernel(11));
  for (double v : blurred.data()) CHECK(std::abs(v - 0.37) < 1e-6);

  Image impulse(7, 7, 1);
  impulse.at(0, 3, 3) = 1.0;
  const auto k = gaussian_kernel_1d(1, 1.0);
  const auto out = uniform_blur(impulse, k);
  for (std::size_t y = 0; y < 7; ++y)
    for (std::size_t x = 0; x < 7; ++x) {
      double expected = 0.0;
      if (y >= 2 && y <= 4 && x >= 2 && x <= 4) expected = k.weights[y - 2] * k.weights[x - 2];
      CHECK(std::abs(out.at(0, y, x) - expected) < 1e-10);
    }
}

TEST_CASE("uniform_blur matches direct 2-D convolution and the serial reference") {
  for (double r : {1.0, 5.0, 11.0}) {
    const auto img = textured(17, 23, 3, 4);
    const auto k = radius_to_kernel(r);
    const auto fast = uniform_blur(img, k);
    const auto slow = conv2d(img, k);
    double worst = 0.0;
    for (std::size_t i = 0; i < fast.data().size(); ++i)
      worst = std::max(worst, std::abs(fast.data()[i] - slow.data()[i]));
    CHECK(worst < 1e-10);
    CHECK(fast == reference::uniform_blur(img, k));
  }
}

TEST_CASE("uniform_blur keeps range and mean") {
  const auto img = textured(32, 32, 3, 7);
  for (double r : {1.0, 5.0, 11.0, 21.0, 41.0}) {
    const auto out = uniform_blur(img, radius_to_kernel(r));
    for (double v : out.data()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // Reflect-101 is not exactly mean-preserving on textured images; loose bound.
    CHECK(std::abs(out.mean() - img.mean()) < 2e-2);
  }
}

TEST_CASE("high-frequency energy is non-increasing in radius") {
  const auto img = textured(64, 64, 3, 11);
  double previous = laplacian_energy(img);
  for (double r : {1.0, 5.0, 11.0, 21.0, 41.0}) {
    const double e = laplacian_energy(uniform_blur(img, radius_to_kernel(r)));
    CHECK(e <= previous);
    previous = e;
  }
}

TEST_CASE("fovea_alpha_map") {
  const auto a = fovea_alpha_map(9, 9, 2.0);
  CHECK(a(4, 4) == 1.0);
  CHECK(std::abs(a(0, 0) - std::exp(-2.0)) < 1e-12);
  CHECK(std::abs(a(8, 8) - std::exp(-2.0)) < 1e-12);
  CHECK(a(4, 5) < 1.0);
  CHECK(a(4, 6) < a(4, 5));

  double lowest = 1.0;
  for (double v : a.data()) lowest = std::min(lowest, v);
  CHECK(std::abs(lowest - std::exp(-2.0)) < 1e-12);

  const auto ones = fovea_alpha_map(5, 7, 0.0);
  for (double v : ones.data()) CHECK(v == 1.0);

  const auto off = fovea_alpha_map(6, 6, 1.0, PixelCoord{1, 2});
  CHECK(off(1, 2) == 1.0);
  CHECK(std::abs(off(5, 5) - std::exp(-1.0)) < 1e-12);

  CHECK_THROWS_AS(fovea_alpha_map(4, 4, -1.0), ContractViolation);
  CHECK_THROWS_AS(fovea_alpha_map(4, 4, 1.0, PixelCoord{4, 0}), ContractViolation);
}

TEST_CASE("fovea_blur identities and limits") {
  const auto img = textured(21, 21, 3, 5);
  CHECK(fovea_blur(img, {0.25, 2.0, {}}) == img);
  CHECK(fovea_blur(img, {-9.75, 2.0, {}}) == img);
  CHECK(fovea_blur(img, {11.0, 0.0, {}}) == img);

  const auto sharp_view = fovea_blur(img, {11.0, 50.0, {}});
  const auto ub = uniform_blur(img, radius_to_kernel(11.0));
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 21; ++y)
      for (std::size_t x = 0; x < 21; ++x) {
        if (y == 10 && x == 10) {
          CHECK(sharp_view.at(c, y, x) == img.at(c, y, x));
          continue;
        }
        if (std::hypot(double(y) - 10, double(x) - 10) < 2.0) continue;
        CHECK(std::abs(sharp_view.at(c, y, x) - ub.at(c, y, x)) < 1e-3);
      }
}

TEST_CASE("fovea_blur is a convex blend") {
  const auto img = textured(30, 40, 3, 9);
  for (double r : {5.0, 11.0, 21.0}) {
    const auto ub = uniform_blur(img, radius_to_kernel(r));
    const auto fb = fovea_blur(img, {r, 2.0, {}});
    for (std::size_t i = 0; i < img.data().size(); ++i) {
      const double lo = std::min(img.data()[i], ub.data()[i]);
      const double hi = std::max(img.data()[i], ub.data()[i]);
      CHECK(fb.data()[i] >= lo - 1e-15);
      CHECK(fb.data()[i] <= hi + 1e-15);
    }
  }
}

TEST_CASE("blend with constant half alpha") {
  const auto img = textured(8, 8, 1, 3);
  const auto ub = uniform_blur(img, radius_to_kernel(5));
  const auto out = blend(img, ub, MatrixD(8, 8, 0.5));
  for (std::size_t i = 0; i < img.data().size(); ++i)
    CHECK(out.data()[i] == 0.5 * img.data()[i] + 0.5 * ub.data()[i]);
  CHECK_THROWS_AS(blend(img, ub, MatrixD(7, 8, 0.5)), ContractViolation);
}

TEST_CASE("image construction rejects out-of-range data") {
  CHECK_THROWS_AS(Image(2, 2, 1, std::vector<double>{0, 0.5, 1.0, 1.2}), ContractViolation);
  CHECK_THROWS_AS(Image(2, 2, 2, 0.0), ContractViolation);
  CHECK_THROWS_AS(Image(0, 2, 1, 0.0), ContractViolation);
}
