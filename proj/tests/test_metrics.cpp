#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rdeg/error.hpp"
#include "rdeg/metrics.hpp"
#include "rdeg/rng.hpp"

namespace rdeg {
namespace {

std::vector<ScoredSample> make(std::initializer_list<double> fake, std::initializer_list<double> real) {
  std::vector<ScoredSample> out;
  for (double s : fake) out.push_back({Label::fake, s});
  for (double s : real) out.push_back({Label::real, s});
  return out;
}

double brute_force_auc(const std::vector<ScoredSample>& s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& f : s) {
    if (f.label != Label::fake) continue;
    for (const auto& r : s) {
      if (r.label != Label::real) continue;
      pairs += 1.0;
      if (f.score > r.score) wins += 1.0;
      else if (f.score == r.score) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Random set with at least one sample of each class; coarse grids force ties.
std::vector<ScoredSample> random_set(RngStream& rng, bool ties) {
  const auto n = static_cast<std::size_t>(rng.uniform_int(2, 500));
  std::vector<ScoredSample> s(n);
  const double levels = static_cast<double>(rng.uniform_int(2, 20));
  for (std::size_t i = 0; i < n; ++i) {
    const Label l = i == 0 ? Label::real : i == 1 ? Label::fake : (rng.bernoulli(0.5) ? Label::fake : Label::real);
    double v = rng.uniform();
    if (ties) v = std::floor(v * levels) / levels;
    s[i] = {l, v};
  }
  return s;
}

TEST(MetricsTest, AucExamples) {
  EXPECT_EQ(auc(make({0.9, 0.8}, {0.1, 0.2})), 1.0);
  EXPECT_EQ(auc(make({0.8, 0.4}, {0.6, 0.2})), 0.75);
  EXPECT_EQ(auc(make({0.5, 0.5}, {0.5})), 0.5);
  EXPECT_EQ(auc(make({0.1}, {0.9})), 0.0);
}

// Enumerated by hand: 0.8 -> tp, 0.4 -> fn, 0.6 -> fp, 0.2 -> tn.
TEST(MetricsTest, EvaluateFixedThresholdExample) {
  const auto s = make({0.8, 0.4}, {0.6, 0.2});
  EXPECT_EQ(confusion(s, 0.5), (Confusion{1, 1, 1, 1}));
  const EvalMetrics m = evaluate(s, FixedThreshold{0.5});
  EXPECT_DOUBLE_EQ(m.acc, 0.5);
  EXPECT_DOUBLE_EQ(m.auc, 0.75);
  EXPECT_DOUBLE_EQ(m.f1, 0.5);
  EXPECT_EQ(m.n_real, 2u);
  EXPECT_EQ(m.n_fake, 2u);
}

TEST(MetricsTest, ConfusionArithmetic) {
  EXPECT_EQ(accuracy(Confusion{1, 0, 1, 0}), 1.0);
  EXPECT_EQ(f1(Confusion{1, 0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(f1(Confusion{2, 1, 0, 1}), 2.0 / 3.0);
  EXPECT_EQ(accuracy(Confusion{0, 0, 5, 0}), 1.0);
  EXPECT_EQ(f1(Confusion{0, 0, 5, 0}), 1.0);
  EXPECT_THROW(accuracy(Confusion{}), MetricError);
  EXPECT_THROW(f1(Confusion{}), MetricError);
  EXPECT_THROW(accuracy(std::vector<ScoredSample>{}, 0.5), MetricError);
}

TEST(MetricsTest, SeparableScoresGiveUnitMetrics) {
  const auto s = make({0.9, 0.7, 0.51}, {0.49, 0.2, 0.0});
  const EvalMetrics fixed = evaluate(s);
  EXPECT_EQ(fixed.acc, 1.0);
  EXPECT_EQ(fixed.auc, 1.0);
  EXPECT_EQ(fixed.f1, 1.0);
  const EvalMetrics y = evaluate(s, YoudenThreshold{});
  EXPECT_EQ(y.acc, 1.0);
  EXPECT_EQ(y.threshold, 0.51);
}

TEST(MetricsTest, ThresholdIsInclusive) {
  const auto s = make({0.5}, {0.49});
  EXPECT_EQ(confusion(s, 0.5), (Confusion{1, 0, 1, 0}));
}

TEST(MetricsTest, YoudenTiesGoToLowestThreshold) {
  // t=0.9: J = 1/2 - 0; t=0.3: J = 1 - 1/2. Equal, so 0.3 wins.
  const auto s = make({0.9, 0.3}, {0.5, 0.1});
  EXPECT_EQ(youden_threshold(s), 0.3);
}

TEST(MetricsTest, SortedAucEqualsBruteForce) {
  RngStream rng = derive_rng(1, "auc", "oracle");
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_set(rng, trial % 2 == 0);
    ASSERT_LE(std::abs(auc(s) - brute_force_auc(s)), 1e-12) << "trial " << trial;
  }
}

TEST(MetricsTest, AucInvariantUnderMonotoneTransform) {
  RngStream rng = derive_rng(2, "auc", "monotone");
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_set(rng, trial % 2 == 0);
    const double before = auc(s);
    for (auto& x : s) x.score = x.score * x.score * x.score;
    ASSERT_LE(std::abs(auc(s) - before), 1e-12);
    for (auto& x : s) x.score = 0.25 + 0.5 * x.score;
    ASSERT_LE(std::abs(auc(s) - before), 1e-12);
  }
}

TEST(MetricsTest, FlippingLabelsComplementsAuc) {
  RngStream rng = derive_rng(3, "auc", "flip");
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_set(rng, false);
    const double before = auc(s);
    for (auto& x : s) x.label = x.label == Label::fake ? Label::real : Label::fake;
    ASSERT_NEAR(auc(s), 1.0 - before, 1e-12);
  }
}

TEST(MetricsTest, BoundsAndCountsOnRandomSets) {
  RngStream rng = derive_rng(4, "metrics", "bounds");
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_set(rng, true);
    const double t = rng.uniform();
    const Confusion c = confusion(s, t);
    ASSERT_EQ(c.total(), s.size());
    const double a = accuracy(s, t);
    const double f = f1(s, t);
    ASSERT_TRUE(a >= 0.0 && a <= 1.0);
    ASSERT_TRUE(f >= 0.0 && f <= 1.0);
    auto j_at = [&](double th) {
      const Confusion k = confusion(s, th);
      return double(k.tp) / double(k.tp + k.fn) - double(k.fp) / double(k.fp + k.tn);
    };
    const double best = j_at(youden_threshold(s));
    for (const auto& x : s) ASSERT_LE(j_at(x.score), best + 1e-12);
  }
}

TEST(MetricsTest, InvalidInputs) {
  EXPECT_THROW(auc(make({0.4, 0.6}, {})), MetricError);
  EXPECT_THROW(auc(make({}, {0.4})), MetricError);
  EXPECT_THROW(youden_threshold(make({0.4}, {})), MetricError);
  EXPECT_THROW(evaluate(make({}, {0.3})), MetricError);
  EXPECT_THROW(auc(make({1.5}, {0.2})), ParameterError);
  EXPECT_THROW(auc(make({NAN}, {0.2})), ParameterError);
}

}  // namespace
}  // namespace rdeg
