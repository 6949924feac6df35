#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hairrec/core/errors.hpp"
#include "hairrec/orient2d/gabor.hpp"
#include "helpers.hpp"

using namespace hairrec;
using orient2d::GaborBank;
using orient2d::GaborBankConfig;

namespace {

double mean_abs_error_deg(const OrientationMap& omap, double truth, int margin = 12) {
  double sum = 0.0;
  long n = 0;
  for (int y = margin; y < omap.height() - margin; ++y)
    for (int x = margin; x < omap.width() - margin; ++x) {
      if (!omap.masked(x, y)) continue;
      sum += rad2deg(test::orientation_diff(omap.angle(x, y), truth));
      ++n;
    }
  REQUIRE(n > 0);
  return sum / n;
}

double median_confidence(const ConfidenceMap& cmap, int margin = 12) {
  std::vector<float> v;
  for (int y = margin; y < cmap.height() - margin; ++y)
    for (int x = margin; x < cmap.width() - margin; ++x) v.push_back(cmap.value(x, y));
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("bank construction: defaults give 180 zero-mean 17x17 kernels") {
  const GaborBank bank = GaborBank::build({});
  CHECK(bank.size() == 180);
  CHECK(bank.kernel_size() == 17);
  for (int j = 0; j < bank.size(); j += 17) {
    const auto& k = bank.kernel(j);
    REQUIRE(k.size() == 17u * 17u);
    const double mean = std::accumulate(k.begin(), k.end(), 0.0) / k.size();
    CHECK(std::abs(mean) < 1e-6);
    double l2 = 0.0;
    for (float t : k) l2 += static_cast<double>(t) * t;
    CHECK(std::sqrt(l2) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(bank.angle(j) == doctest::Approx(j * M_PI / 180.0));
  }
}

TEST_CASE("bank construction rejects invalid parameters") {
  GaborBankConfig even;
  even.kernel_size = 4;
  CHECK_THROWS_AS(GaborBank::build(even), ValidationError);

  GaborBankConfig sigma;
  sigma.sigma_x = 0.0;
  CHECK_THROWS_AS(GaborBank::build(sigma), ValidationError);

  GaborBankConfig freq;
  freq.frequency = -1.0;
  CHECK_THROWS_AS(GaborBank::build(freq), ValidationError);

  GaborBankConfig n;
  n.n_orientations = 1;
  CHECK_THROWS_AS(GaborBank::build(n), ValidationError);
}

TEST_CASE("grating at 30 degrees: mean absolute angle error < 2 degrees") {
  const GaborBank bank = GaborBank::build({});
  const double truth = deg2rad(30.0);
  const Image img = test::make_grating(96, 96, truth);
  const auto [omap, cmap] = extract_orientation(img, bank, test::full_mask(96, 96));
  CHECK(mean_abs_error_deg(omap, truth) < 2.0);
}

TEST_CASE("constant image: confidence ~0 everywhere") {
  const GaborBank bank = GaborBank::build({});
  const Image img(64, 64, 1, 0.5f);
  const auto [omap, cmap] = extract_orientation(img, bank, test::full_mask(64, 64));
  for (int y = 0; y < 64; y += 7)
    for (int x = 0; x < 64; x += 7) CHECK(cmap.value(x, y) < 1e-3f);
}

TEST_CASE("orientation is pi-periodic: grating at theta and theta+180 identical") {
  const GaborBank bank = GaborBank::build({});
  const double theta = deg2rad(53.0);
  const Image a = test::make_grating(64, 64, theta);
  const Image b = test::make_grating(64, 64, theta + M_PI);
  const auto [oa, ca] = extract_orientation(a, bank, test::full_mask(64, 64));
  const auto [ob, cb] = extract_orientation(b, bank, test::full_mask(64, 64));
  REQUIRE(oa.raster().data().size() == ob.raster().data().size());
  for (size_t i = 0; i < oa.raster().data().size(); ++i)
    CHECK(oa.raster().data()[i] == ob.raster().data()[i]);
  // ... and both recover theta mod pi, so the equality is not vacuous.
  CHECK(mean_abs_error_deg(ob, theta) < 2.0);
}

TEST_CASE("unmasked pixels keep the sentinel; empty mask is empty, not an error") {
  const GaborBank bank = GaborBank::build({});
  const Image img = test::make_grating(48, 48, 1.0);

  Image mask(48, 48, 1, 0.0f);
  for (int y = 10; y < 20; ++y)
    for (int x = 10; x < 20; ++x) mask.at(x, y) = 1.0f;

  const auto [omap, cmap] = extract_orientation(img, bank, mask);
  CHECK_FALSE(omap.masked(0, 0));
  CHECK(omap.angle(0, 0) == OrientationMap::kSentinel);
  CHECK(cmap.value(0, 0) == 0.0f);
  CHECK(omap.masked(15, 15));
  CHECK(omap.angle(15, 15) >= 0.0f);
  CHECK(omap.angle(15, 15) < static_cast<float>(M_PI));

  const auto [oe, ce] = extract_orientation(img, bank, Image(48, 48, 1, 0.0f));
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) CHECK_FALSE(oe.masked(x, y));
}

TEST_CASE("image/mask dimension mismatch raises") {
  const GaborBank bank = GaborBank::build({});
  const Image img = test::make_grating(32, 32, 0.3);
  CHECK_THROWS_AS(extract_orientation(img, bank, Image(16, 32, 1, 1.0f)),
                  DimensionMismatchError);
}

TEST_CASE("equivariance: rotating the grating shifts angles accordingly (within 1 degree)") {
  const GaborBank bank = GaborBank::build({});
  // Multiples of pi/n with n=180 means 1-degree steps; use a few spread ones.
  for (double base_deg : {10.0, 77.0, 139.0}) {
    CAPTURE(base_deg);
    const Image img = test::make_grating(96, 96, deg2rad(base_deg));
    const auto [omap, cmap] = extract_orientation(img, bank, test::full_mask(96, 96));
    CHECK(mean_abs_error_deg(omap, deg2rad(base_deg)) < 1.0);
  }
}

TEST_CASE("confidence monotonicity: more grating noise never raises median confidence") {
  const GaborBank bank = GaborBank::build({});
  double prev = std::numeric_limits<double>::infinity();
  for (double sigma : {0.0, 0.1, 0.25, 0.5}) {
    CAPTURE(sigma);
    const Image img = test::make_grating(96, 96, deg2rad(30.0), 4.0, sigma);
    const auto [omap, cmap] = extract_orientation(img, bank, test::full_mask(96, 96));
    const double med = median_confidence(cmap);
    CHECK(med <= prev + 1e-9);
    prev = med;
  }
}

TEST_CASE("luminance conversion: Rec.709 weights on 3-channel, pass-through on 1") {
  Image rgb(2, 1, 3);
  rgb.at(0, 0, 0) = 1.0f;  // pure red
  rgb.at(1, 0, 1) = 1.0f;  // pure green
  const Image lum = orient2d::to_luminance(rgb);
  REQUIRE(lum.channels() == 1);
  CHECK(lum.at(0, 0) == doctest::Approx(0.2126).epsilon(1e-4));
  CHECK(lum.at(1, 0) == doctest::Approx(0.7152).epsilon(1e-4));

  const Image gray(3, 3, 1, 0.25f);
  const Image same = orient2d::to_luminance(gray);
  CHECK(same.data() == gray.data());
}

TEST_CASE("parallel and serial extraction agree exactly") {
  const GaborBank bank = GaborBank::build({});
  const Image img = test::make_grating(80, 60, deg2rad(64.0), 4.0, 0.2);
  Image mask(80, 60, 1, 0.0f);
  for (int y = 0; y < 60; ++y)
    for (int x = 0; x < 80; ++x) mask.at(x, y) = (x + y) % 3 ? 1.0f : 0.0f;

  const auto [op, cp] = extract_orientation(img, bank, mask);
  const auto [os, cs] = orient2d::extract_orientation_serial(img, bank, mask);
  CHECK(op.raster().data() == os.raster().data());
  CHECK(cp.raster().data() == cs.raster().data());
}
