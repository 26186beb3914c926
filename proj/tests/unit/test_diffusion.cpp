// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>

#include "colddiff/diffusion.hpp"
#include "colddiff/error.hpp"
#include "colddiff/losses.hpp"
#include "colddiff/util.hpp"
#include "support/oracles.hpp"

using namespace colddiff;

namespace {

SpectroTensor random_tensor(std::uint64_t seed, int bins = 17, int frames = 9) {
  SpectroTensor s(bins, frames, 2 * (bins - 1), 8, 44100.0);
  Rng rng(seed);
  for (double& v : s.values()) v = rng.normal();
  return s;
}

double rel(const SpectroTensor& a, const SpectroTensor& b) { return oracle::rel_l2(a.values(), b.values()); }

}  // namespace

TEST_CASE("forward mix endpoints and midpoint") {
  const SpectroTensor x0 = random_tensor(1), y = random_tensor(2);
  const Schedule s = make_schedule(16);
  CHECK(forward_mix(x0, y, s, 0) == x0);
  CHECK(forward_mix(x0, y, s, 16) == y);
  const SpectroTensor mid = forward_mix(x0, y, s, 8);
  for (std::size_t i = 0; i < mid.size(); ++i)
    CHECK(mid.values()[i] == doctest::Approx(0.5 * (x0.values()[i] + y.values()[i])).epsilon(1e-14));
  CHECK_THROWS_AS(forward_mix(x0, y, s, 17), UsageError);
  CHECK_THROWS_AS(forward_mix(x0, random_tensor(3, 9), s, 1), UsageError);
}

TEST_CASE("forward and reverse interleave through the delta target") {
  const SpectroTensor x0 = random_tensor(4), y = random_tensor(5);
  const Schedule s = make_schedule(16);
  for (int t = 1; t <= 16; ++t) {
    const SpectroTensor xt = forward_mix(x0, y, s, t), xp = forward_mix(x0, y, s, t - 1);
    const SpectroTensor v = v_target(xp, xt, s.step_size(t));
    CHECK(rel(xt + s.step_size(t) * v, xp) < 1e-12);
    // v_t is the same for every t: x0 - y.
    CHECK(rel(v, x0 - y) < 1e-12);
  }
}

TEST_CASE("oracle predictors") {
  const SpectroTensor x0 = random_tensor(6), y = random_tensor(7);
  const Schedule s = make_schedule(8);
  const auto direct = oracle_predictor(x0, y, s, ReverseMode::kDirect);
  CHECK(direct->predict(forward_mix(x0, y, s, 1), 1) == x0);
  const auto delta = oracle_predictor(x0, x0, s, ReverseMode::kDeltaNormalized);
  for (int t = 1; t <= 8; ++t) {
    const SpectroTensor out = delta->predict(x0, t);
    for (double v : out.values()) REQUIRE(std::abs(v) < 1e-12);
  }
  CHECK_THROWS_AS(oracle_predictor(x0, random_tensor(8, 9), s, ReverseMode::kDirect), UsageError);
}

TEST_CASE("oracle sampling recovers x0 in both modes") {
  for (int T : {1, 2, 4, 16})
    for (auto mode : {ReverseMode::kDirect, ReverseMode::kDeltaNormalized}) {
      const SpectroTensor x0 = random_tensor(100 + T), y = random_tensor(200 + T);
      const Schedule s = make_schedule(T);
      std::vector<SpectroTensor> traj;
      const SpectroTensor est = reverse_sample(y, *oracle_predictor(x0, y, s, mode), s, mode, &traj);
      CHECK(rel(est, x0) < 1e-9);
      REQUIRE(traj.size() == static_cast<std::size_t>(T + 1));
      CHECK(traj[T] == y);
      CHECK(traj[0] == est);
    }
}

TEST_CASE("zero delta predictor leaves y unchanged") {
  const SpectroTensor y = random_tensor(9);
  const FunctionPredictor zero([](const SpectroTensor& x, int) {
    SpectroTensor z = x;
    for (double& v : z.values()) v = 0.0;
    return z;
  });
  CHECK(reverse_sample(y, zero, make_schedule(16), ReverseMode::kDeltaNormalized) == y);
}

TEST_CASE("a direct predictor wrapped as delta gives the same trajectory") {
  const SpectroTensor y = random_tensor(10);
  const FunctionPredictor direct([](const SpectroTensor& x, int t) {
    SpectroTensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i)
      out.values()[i] = 0.9 * x.values()[i] + 0.01 * t * std::sin(static_cast<double>(i));
    return out;
  });
  const Schedule s = make_schedule(16);
  std::vector<SpectroTensor> a, b;
  reverse_sample(y, direct, s, ReverseMode::kDirect, &a);
  reverse_sample(y, *direct_as_delta(direct, s), s, ReverseMode::kDeltaNormalized, &b);
  for (int t = 0; t <= 16; ++t) CHECK(rel(b[t], a[t]) < 1e-12);
}

TEST_CASE("sampler errors name the failing step") {
  const SpectroTensor y = random_tensor(11);
  const Schedule s = make_schedule(4);
  const FunctionPredictor bad([](const SpectroTensor& x, int t) {
    SpectroTensor out = x;
    if (t == 3) out.values()[0] = NAN;
    return out;
  });
  try {
    reverse_sample(y, bad, s, ReverseMode::kDirect);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("t=3") != std::string::npos);
  }
  const FunctionPredictor wrong_shape([](const SpectroTensor&, int) { return random_tensor(1, 9); });
  CHECK_THROWS_AS(reverse_sample(y, wrong_shape, s, ReverseMode::kDirect), UsageError);
  CHECK(reverse_mode_from_string("direct") == ReverseMode::kDirect);
  CHECK(reverse_mode_from_string("delta") == ReverseMode::kDeltaNormalized);
  CHECK_THROWS_AS(reverse_mode_from_string("sideways"), UsageError);
}
