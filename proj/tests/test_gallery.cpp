#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mercer/gallery.hpp"
#include "oracles.hpp"

using namespace mercer;

namespace {

// v_n of the localized family, built from the trig form of U~ and the
// partition endpoints summed directly in long double.
double v_oracle(std::size_t n, double x, std::size_t M) {
  const std::size_t m = (n + 1) / 2;
  const long double c = 12.0L / (std::numbers::pi_v<long double> * std::numbers::pi_v<long double>);
  long double a = -1.0L;
  for (std::size_t j = 1; j < m; ++j) a += c / (static_cast<long double>(j) * j);
  const long double b = a + c / (static_cast<long double>(m) * m);
  if (m > M || x < a || x >= b) return 0.0;
  const double t = static_cast<double>((2.0L * x - a - b) / (b - a));
  const double amp = static_cast<double>(m) * std::numbers::pi / std::sqrt(6.0);
  return n % 2 == 1 ? -amp * oracle::chebu_trig(2 * m, t) : amp * oracle::chebu_trig(2 * m + 2, t);
}

}  // namespace

TEST(MakeBuiltin, Examples) {
  const auto tanh_k = make_builtin("tanh", {{"scale", 100.0}});
  EXPECT_NEAR(tanh_k(0.0, 0.0), std::tanh(1.0), 1e-15);
  EXPECT_NEAR(tanh_k(0.0, 0.0), 0.76159, 1e-5);
  const auto pyr = make_builtin("pyramid");
  EXPECT_EQ(pyr(0.5, 0.6), 0.0);
  EXPECT_NEAR(pyr(0.2, 0.3), 0.5, 1e-15);
}

TEST(MakeBuiltin, DefaultTanhScaleIs100) {
  const auto k = make_builtin("tanh");
  EXPECT_NEAR(k(0.3, -0.2), std::tanh(100.0 * 0.3 * -0.2 + 1.0), 1e-15);
}

TEST(MakeBuiltin, DomainsAndMetadata) {
  for (const auto& entry : gallery_entries()) {
    const auto k = make_builtin(entry.name);
    EXPECT_EQ(k.name, entry.name);
    if (entry.name == "k_pt") {
      EXPECT_EQ(k.x_domain, Interval(-std::numbers::pi, std::numbers::pi));
      EXPECT_EQ(k.y_domain, Interval(-std::numbers::pi, std::numbers::pi));
    } else {
      EXPECT_EQ(k.x_domain, Interval{});
      EXPECT_EQ(k.y_domain, Interval{});
    }
  }
  const auto pyr = make_builtin("pyramid");
  ASSERT_TRUE(pyr.smoothness_r && pyr.variation_V);
  EXPECT_EQ(*pyr.smoothness_r, 1);
  EXPECT_EQ(*pyr.variation_V, 2.0);
  EXPECT_TRUE(make_builtin("tanh").analytic);
  EXPECT_FALSE(make_builtin("k_as").symmetric);
  EXPECT_FALSE(make_builtin("separable").symmetric);
}

TEST(MakeBuiltin, RejectsUnknownNamesAndKeys) {
  EXPECT_THROW(make_builtin("gaussian"), InvalidArgument);
  EXPECT_THROW(make_builtin("pyramid", {{"scale", 2.0}}), InvalidArgument);
  EXPECT_THROW(make_builtin("k_pt", {{"n_blocks", 4.0}}), UnsupportedScale);
  EXPECT_THROW(make_builtin("k_uni", {{"M", 0.5}}), InvalidArgument);
}

TEST(MakeBuiltin, SymmetricKernelsAreSymmetric) {
  const auto xs = oracle::uniform_points(1000, -1.0, 1.0, 21);
  const auto ys = oracle::uniform_points(1000, -1.0, 1.0, 22);
  for (const char* name : {"tanh", "pyramid", "modulated_pyramid", "exp_xy", "zero"}) {
    const auto k = make_builtin(name);
    ASSERT_TRUE(k.symmetric);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(k(xs[i], ys[i]), k(ys[i], xs[i]), 1e-12) << name;
  }
  const auto kpt = make_builtin("k_pt");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::numbers::pi * xs[i], y = std::numbers::pi * ys[i];
    EXPECT_NEAR(kpt(x, y), kpt(y, x), 1e-12);
  }
  const auto kabs = make_builtin("k_abs", {{"n_terms", 200.0}});
  const auto kuni = make_builtin("k_uni", {{"M", 1000.0}});
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_EQ(kabs(xs[i], ys[i]), kabs(ys[i], xs[i]));
    EXPECT_NEAR(kuni(xs[i], ys[i]), kuni(ys[i], xs[i]), 1e-12);
  }
}

TEST(Partition, ConsistencyAtDefaultCap) {
  const IntervalPartition p(100000);
  const double M = 1e5;
  EXPECT_LT(p.endpoint(100000), 1.0);
  EXPECT_GT(p.tail_length(), 0.0);
  EXPECT_LE(p.tail_length(), 12.0 / (std::numbers::pi * std::numbers::pi * M) * (1.0 + 1.0 / M));
  long double total = 0.0L;
  for (std::size_t n = 1; n <= 100000; ++n) total += IntervalPartition::length(n);
  EXPECT_NEAR(static_cast<double>(total) + p.tail_length(), 2.0, 1e-12);
}

TEST(Partition, EndpointsMatchDirectSums) {
  const IntervalPartition p(500);
  const long double c = 12.0L / (std::numbers::pi_v<long double> * std::numbers::pi_v<long double>);
  long double e = -1.0L;
  for (std::size_t n = 1; n <= 500; ++n) {
    e += c / (static_cast<long double>(n) * n);
    EXPECT_NEAR(p.endpoint(n), static_cast<double>(e), 1e-15);
  }
}

TEST(Partition, LocateUsesHalfOpenIntervals) {
  const IntervalPartition p(100);
  EXPECT_EQ(p.locate(-1.0), 1u);
  EXPECT_EQ(p.locate(p.endpoint(1)), 2u);
  EXPECT_EQ(p.locate(std::nextafter(p.endpoint(1), -2.0)), 1u);
  EXPECT_FALSE(p.locate(1.0).has_value());
  EXPECT_THROW(p.locate(1.5), DomainError);
}

TEST(VFunctions, MatchOracleAndVanishOutsideSupport) {
  const IntervalPartition p(1000);
  for (std::size_t n = 1; n <= 12; ++n) {
    const std::size_t m = (n + 1) / 2;
    const auto I = p.interval(m);
    for (double x : oracle::uniform_points(50, I.lo(), I.hi(), n)) {
      EXPECT_NEAR(v_function(n, x, p), v_oracle(n, x, 1000), 1e-11) << "n = " << n;
    }
    EXPECT_EQ(v_function(n, 0.999, p), 0.0);
  }
}

TEST(KAbs, CornerValue) {
  const double limit = -2.0 * std::log(2.0) - std::numbers::pi * std::numbers::pi / 24.0;
  EXPECT_NEAR(limit, -1.79753, 1e-5);
  EXPECT_NEAR(k_abs_eval(1.0, 1.0, 10000).value, limit, 1e-3);
}

TEST(KAbs, SymmetricExactly) {
  EXPECT_EQ(k_abs_eval(0.3, 0.9, 1000).value, k_abs_eval(0.9, 0.3, 1000).value);
}

TEST(KAbs, InteriorValueMatchesBruteForce) {
  // Brute-force long double partial sums; pair-averaged at 2e6 terms.
  const long double x = 0.3L, y = 0.9L;
  long double px0 = 1.0L, px1 = x, py0 = 1.0L, py1 = y, s = 0.0L, prev = 0.0L;
  const std::size_t N = 2000000;
  for (std::size_t k = 1; k < 2 * (N + 1); ++k) {
    const long double kd = static_cast<long double>(k);
    const long double px2 = ((2.0L * kd + 1.0L) * x * px1 - kd * px0) / (kd + 1.0L);
    const long double py2 = ((2.0L * kd + 1.0L) * y * py1 - kd * py0) / (kd + 1.0L);
    px0 = px1;
    px1 = px2;
    py0 = py1;
    py1 = py2;
    if (k % 2 == 0) continue;
    const long double n = static_cast<long double>((k + 1) / 2);
    prev = s;
    s += (((k + 1) / 2) % 2 == 0 ? 1.0L : -1.0L) / (n * n) * (2.0L * n + 0.5L) * px1 * py1;
  }
  const double ref = static_cast<double>(0.5L * (s + prev));
  const auto v = k_abs_eval(0.3, 0.9, 1000000);
  EXPECT_NEAR(v.value, ref, 1e-6);
  EXPECT_GE(v.error, 0.0);
}

TEST(KAbs, RejectsTooFewTerms) { EXPECT_THROW(k_abs_eval(0.1, 0.2, 1), InvalidArgument); }

TEST(KUni, OffDiagonalBlocksVanish) {
  const IntervalPartition p(1000);
  const double x = p.interval(1).midpoint(), y = p.interval(2).midpoint();
  EXPECT_EQ(k_uni_eval(x, y, p).value, 0.0);
  const auto corner = k_uni_eval(1.0, 1.0, p);
  EXPECT_EQ(corner.value, 0.0);
  EXPECT_TRUE(corner.truncated);
}

TEST(KUni, MatchesSeriesOracleOnFirstBlocks) {
  const IntervalPartition p(1000);
  for (std::size_t m : {1u, 2u, 5u}) {
    const auto I = p.interval(m);
    const auto xs = oracle::uniform_points(20, I.lo(), I.hi(), 40 + m);
    const auto ys = oracle::uniform_points(20, I.lo(), I.hi(), 80 + m);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double ref = 0.0;
      for (std::size_t n = 1; n <= 2 * m + 2; ++n) {
        const double k = static_cast<double>((n + 1) / 2);
        ref += (n % 2 == 0 ? 1.0 : -1.0) / (k * k * k) * v_oracle(n, xs[i], 1000) * v_oracle(n, ys[i], 1000);
      }
      EXPECT_NEAR(k_uni_eval(xs[i], ys[i], p).value, ref, 1e-11) << "m = " << m;
    }
  }
  const double mid = p.interval(1).midpoint();
  double ref = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const double k = static_cast<double>((n + 1) / 2);
    ref += (n % 2 == 0 ? 1.0 : -1.0) / (k * k * k) * v_oracle(n, mid, 1000) * v_oracle(n, mid, 1000);
  }
  EXPECT_NEAR(k_uni_eval(mid, mid, p).value, ref, 1e-12);
}

TEST(KUni, DecaysNearCorner) {
  // |K_uni| <= C m^{-1/2} on I_m x I_m with one constant C.
  const IntervalPartition p(10000);
  double C = 0.0;
  std::vector<double> scaled;
  for (std::size_t m : {1u, 10u, 100u, 1000u, 10000u}) {
    const auto I = p.interval(m);
    double mx = 0.0;
    for (double x : cheb_points(65, I)) {
      for (double y : cheb_points(65, I)) mx = std::max(mx, std::abs(k_uni_eval(x, y, p).value));
    }
    scaled.push_back(mx * std::sqrt(static_cast<double>(m)));
    C = std::max(C, scaled.back());
  }
  const double bound = std::numbers::pi * std::numbers::pi / 6.0 * 2.0 * std::sqrt(2.0 / std::numbers::pi) * 2.0 *
                       std::sqrt(20.0 / std::numbers::pi);
  EXPECT_LE(C, bound);
}

TEST(KAs, Examples) {
  const IntervalPartition p(1000);
  EXPECT_EQ(k_as_eval(1.0, p.interval(3).midpoint(), p).value, 0.0);
  const auto beyond = k_as_eval(0.0, 0.9999, p);
  EXPECT_EQ(beyond.value, 0.0);
  EXPECT_TRUE(beyond.truncated);
}

TEST(KAs, MatchesTwoTermOracle) {
  const IntervalPartition p(1000);
  for (std::size_t m : {1u, 3u}) {
    const double y = p.interval(m).midpoint() + 0.1 * p.interval(m).half_width();
    for (double x : {0.2, -0.7, 0.95}) {
      double ref = 0.0;
      for (std::size_t n = 2 * m - 1; n <= 2 * m; ++n) {
        const double d = 2.0 * static_cast<double>((n + 1) / 2);
        ref += oracle::chebu_trig(2 * n, x) * v_oracle(n, y, 1000) / (d * d);
      }
      EXPECT_NEAR(k_as_eval(x, y, p).value, ref, 1e-12) << "m = " << m << ", x = " << x;
    }
  }
}

TEST(Fejer, Examples) {
  EXPECT_EQ(fejer_f(0.0, 3), 0.0);
  EXPECT_NEAR(fejer_f(std::numbers::pi, 1), -1.0, 1e-15);
  for (double t : oracle::uniform_points(100, -std::numbers::pi, std::numbers::pi, 9)) {
    EXPECT_EQ(fejer_f(t, 3), fejer_f(-t, 3));
  }
  EXPECT_THROW(fejer_f(0.1, 4), UnsupportedScale);
  EXPECT_THROW(fejer_f(0.1, 0), InvalidArgument);
}

TEST(Fejer, KptWrapsDifference) {
  const auto k = make_builtin("k_pt", {{"n_blocks", 1.0}});
  const double x = 3.0, y = -3.0;
  EXPECT_NEAR(k(x, y), fejer_f(6.0 - 2.0 * std::numbers::pi, 1), 1e-14);
  EXPECT_NEAR(wrap_to_pi(3.0 * std::numbers::pi), std::numbers::pi, 1e-14);
}
