#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "cloudseg/predict.hpp"
#include "cloudseg/rng.hpp"

using namespace cloudseg;
using namespace cloudseg::pipeline;

namespace {

io::Raster random_band(int w, int h, io::BandId band, std::uint64_t seed) {
  Rng rng(seed);
  io::Raster r;
  r.width = w;
  r.height = h;
  r.band = band;
  r.samples.resize(static_cast<std::size_t>(w) * h);
  for (auto& s : r.samples) s = static_cast<std::uint16_t>(rng.below(65536));
  return r;
}

io::SceneBands random_scene(int w, int h, std::uint64_t seed) {
  io::SceneBands scene;
  scene.scene_id = "synthetic";
  scene.red = random_band(w, h, io::BandId::red, seed);
  scene.green = random_band(w, h, io::BandId::green, seed + 1);
  scene.blue = random_band(w, h, io::BandId::blue, seed + 2);
  scene.nir = random_band(w, h, io::BandId::nir, seed + 3);
  return scene;
}

unet::NetworkConfig tiny_net() {
  unet::NetworkConfig cfg;
  cfg.input_size = 16;
  cfg.in_channels = 4;
  cfg.base_channels = 2;
  cfg.channel_cap = 4;
  cfg.encode_blocks = 2;
  cfg.decode_blocks = 1;
  return cfg;
}

}  // namespace

TEST_CASE("binarize marks pixels at or above the threshold") {
  Plane p(3, 1);
  p.values = {0.2, 0.5, 0.8};
  const auto mask = binarize(p, 0.5);
  CHECK(!mask.at(0, 0));
  CHECK(mask.at(0, 1));  // exactly at threshold counts
  CHECK(mask.at(0, 2));

  SUBCASE("extreme thresholds") {
    const auto all = binarize(p, 0.0);
    CHECK(all.count_set() == 3);
    const auto one = binarize(p, 1.0);
    CHECK(one.count_set() == 0);

    Plane certain(2, 1);
    certain.values = {1.0, 0.3};
    CHECK(binarize(certain, 1.0).count_set() == 1);
  }
  SUBCASE("threshold range is enforced") {
    CHECK_THROWS_AS(binarize(p, -0.1), DomainError);
    CHECK_THROWS_AS(binarize(p, 1.1), DomainError);
  }
  SUBCASE("malformed planes are rejected") {
    Plane broken;
    broken.width = 2;
    broken.height = 2;
    broken.values = {0.1};
    CHECK_THROWS_AS(binarize(broken, 0.5), ShapeError);
  }
}

TEST_CASE("planes_to_tensor stacks four equal planes") {
  std::array<Plane, 4> planes = {Plane(2, 2, 0.1), Plane(2, 2, 0.2),
                                 Plane(2, 2, 0.3), Plane(2, 2, 0.4)};
  const auto t = planes_to_tensor<double>(planes);
  CHECK(t.channels == 4);
  CHECK(t.at(0, 0, 1, 1) == 0.1);
  CHECK(t.at(0, 3, 0, 0) == 0.4);

  planes[2] = Plane(3, 2);
  CHECK_THROWS_AS(planes_to_tensor<double>(planes), ShapeError);
}

TEST_CASE("an all-zero network yields a half-probability scene") {
  const auto params = unet::make_params<float>(tiny_net());
  const auto scene = random_scene(50, 34, 9);

  PredictOptions opt;
  opt.patch_size = 32;
  const auto pred = predict_scene(params, scene, opt);

  CHECK(pred.probability.width == 50);
  CHECK(pred.probability.height == 34);
  for (double v : pred.probability.values) CHECK(v == 0.5);
  // 0.5 >= threshold 0.5, so the default mask marks everything.
  CHECK(pred.mask.count_set() == pred.mask.pixel_count());

  SUBCASE("a higher threshold empties the mask") {
    PredictOptions strict;
    strict.patch_size = 32;
    strict.threshold = 0.6;
    const auto strict_pred = predict_scene(params, scene, strict);
    CHECK(strict_pred.mask.count_set() == 0);
  }
}

TEST_CASE("prediction output tracks the scene size") {
  const auto params = unet::init_params<float>(tiny_net(), 17);
  PredictOptions opt;
  opt.patch_size = 16;  // matches the network input: no patch resampling
  const auto scene = random_scene(16, 16, 11);
  const auto pred = predict_scene(params, scene, opt);
  CHECK(pred.probability.width == 16);
  CHECK(pred.probability.height == 16);
  for (double v : pred.probability.values) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }

  SUBCASE("scene dimensions that are not multiples of the patch size") {
    const auto odd_scene = random_scene(23, 9, 12);
    const auto odd = predict_scene(params, odd_scene, opt);
    CHECK(odd.probability.width == 23);
    CHECK(odd.probability.height == 9);
    CHECK(odd.mask.width == 23);
    CHECK(odd.mask.height == 9);
  }
}

TEST_CASE("prediction validates its configuration") {
  const auto scene = random_scene(16, 16, 13);

  SUBCASE("network channel count") {
    auto cfg = tiny_net();
    cfg.in_channels = 3;
    const auto params = unet::make_params<float>(cfg);
    CHECK_THROWS_AS(predict_scene(params, scene, PredictOptions{}), ConfigError);
  }
  SUBCASE("patch size") {
    const auto params = unet::make_params<float>(tiny_net());
    PredictOptions opt;
    opt.patch_size = 0;
    CHECK_THROWS_AS(predict_scene(params, scene, opt), DomainError);
  }
  SUBCASE("inconsistent band dimensions") {
    auto broken = scene;
    broken.nir = random_band(15, 16, io::BandId::nir, 14);
    const auto params = unet::make_params<float>(tiny_net());
    CHECK_THROWS_AS(predict_scene(params, broken, PredictOptions{}), ShapeError);
  }
}
