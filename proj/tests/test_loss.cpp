#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cloudseg/loss.hpp"
#include "cloudseg/rng.hpp"
#include "oracles.hpp"

using namespace cloudseg;
using cloudseg::train::jaccard_loss;
using cloudseg::train::jaccard_loss_per_sample;

namespace {

Tensor4<double> row(std::vector<double> vals) {
  Tensor4<double> t(1, 1, 1, static_cast<int>(vals.size()));
  t.values = std::move(vals);
  return t;
}

}  // namespace

TEST_CASE("hand-computed loss values") {
  const double eps = 1e-7;

  SUBCASE("all truth, all-zero prediction") {
    const auto loss = jaccard_loss(row({1, 1, 1, 1}), row({0, 0, 0, 0}), eps);
    CHECK(loss.value == -eps / (4.0 + eps));
  }
  SUBCASE("perfect prediction approaches -1") {
    const auto loss = jaccard_loss(row({1, 0, 1, 1}), row({1, 0, 1, 1}), eps);
    CHECK(loss.value == doctest::Approx(-1.0).epsilon(1e-7));
  }
  SUBCASE("half-confident prediction") {
    // intersection 0.5, union 1 + 1 - 0.5 = 1.5
    const auto loss = jaccard_loss(row({1, 0}), row({0.5, 0.5}), eps);
    CHECK(loss.value == doctest::Approx(-(0.5 + eps) / (1.5 + eps)).epsilon(1e-12));
  }
  SUBCASE("no truth pixels, confident nothing") {
    const auto loss = jaccard_loss(row({0, 0, 0}), row({0, 0, 0}), eps);
    CHECK(loss.value == -1.0);  // eps/eps
  }
}

TEST_CASE("loss stays within [-1, 0] on a dense grid") {
  const double eps = 1e-7;
  // Every binary truth and every prediction on a 0.25 grid, lengths 1..3.
  for (int n = 1; n <= 3; ++n) {
    const int tcount = 1 << n;
    int pcount = 1;
    for (int i = 0; i < n; ++i) pcount *= 5;
    for (int tb = 0; tb < tcount; ++tb) {
      std::vector<double> t(n);
      for (int i = 0; i < n; ++i) t[i] = (tb >> i) & 1;
      for (int pb = 0; pb < pcount; ++pb) {
        std::vector<double> p(n);
        int rest = pb;
        for (int i = 0; i < n; ++i) {
          p[i] = 0.25 * (rest % 5);
          rest /= 5;
        }
        const auto loss = jaccard_loss(row(t), row(p), eps);
        REQUIRE(loss.value >= -1.0);
        REQUIRE(loss.value <= 0.0);
        REQUIRE(std::isfinite(loss.value));
      }
    }
  }
}

TEST_CASE("loss gradients agree with finite differences") {
  Rng rng(13);
  Tensor4<double> truth(2, 1, 3, 3);
  Tensor4<double> pred(2, 1, 3, 3);
  for (auto& v : truth.values) v = rng.coin() ? 1.0 : 0.0;
  for (auto& v : pred.values) v = rng.uniform(0.05, 0.95);

  const double eps = 1e-7;
  const auto loss = jaccard_loss(truth, pred, eps);

  for (std::size_t i = 0; i < pred.size(); ++i) {
    auto objective = [&]() { return jaccard_loss(truth, pred, eps).value; };
    const double fd = oracles::central_diff(objective, pred.values[i], 1e-5);
    CHECK(oracles::rel_error(fd, loss.grad.values[i]) < 1e-8);
  }
}

TEST_CASE("gradient direction rewards matching the truth") {
  const double eps = 1e-7;
  const auto loss = jaccard_loss(row({1, 0}), row({0.5, 0.5}), eps);
  CHECK(loss.grad.values[0] < 0.0);  // raising p toward truth lowers the loss
  CHECK(loss.grad.values[1] > 0.0);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(jaccard_loss(row({0.5}), row({0.5}), 1e-7), DomainError);
  CHECK_THROWS_AS(jaccard_loss(row({1}), row({1}), 0.0), DomainError);
  CHECK_THROWS_AS(jaccard_loss(row({1}), row({1}), -1.0), DomainError);
  Tensor4<double> a(1, 1, 2, 2), b(1, 1, 2, 3);
  CHECK_THROWS_AS(jaccard_loss(a, b, 1e-7), ShapeError);
}

TEST_CASE("per-sample mode averages independent sample losses") {
  const double eps = 1e-7;
  Tensor4<double> truth(2, 1, 1, 2);
  Tensor4<double> pred(2, 1, 1, 2);
  truth.values = {1, 0, 1, 1};
  pred.values = {0.8, 0.1, 0.3, 0.9};

  const auto joint = jaccard_loss_per_sample(truth, pred, eps);

  const auto first = jaccard_loss(truth.batch_slice(0), pred.batch_slice(0), eps);
  const auto second = jaccard_loss(truth.batch_slice(1), pred.batch_slice(1), eps);
  CHECK(joint.value == doctest::Approx(0.5 * (first.value + second.value)).epsilon(1e-14));

  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(joint.grad.values[i] ==
          doctest::Approx(0.5 * first.grad.values[i]).epsilon(1e-14));
    CHECK(joint.grad.values[2 + i] ==
          doctest::Approx(0.5 * second.grad.values[i]).epsilon(1e-14));
  }

  SUBCASE("differs from the joint pool when sample sizes of truth differ") {
    const auto pooled = jaccard_loss(truth, pred, eps);
    CHECK(pooled.value != doctest::Approx(joint.value).epsilon(1e-9));
  }
}
