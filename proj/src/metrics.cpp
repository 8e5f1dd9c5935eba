#include "rdeg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rdeg/error.hpp"

namespace rdeg {
namespace {

void check_scores(std::span<const ScoredSample> samples) {
  for (const auto& s : samples) {
    if (!std::isfinite(s.score) || s.score < 0.0 || s.score > 1.0) {
      throw ParameterError("score outside [0, 1]: " + std::to_string(s.score));
    }
    if (s.label != Label::real && s.label != Label::fake) {
      throw ParameterError("label must be real or fake");
    }
  }
}

struct ClassCounts {
  std::size_t real = 0;
  std::size_t fake = 0;
};

ClassCounts count_classes(std::span<const ScoredSample> samples) {
  ClassCounts c;
  for (const auto& s : samples) (s.label == Label::fake ? c.fake : c.real)++;
  return c;
}

void require_both_classes(const ClassCounts& c, const char* what) {
  if (c.real == 0 || c.fake == 0) {
    throw MetricError(std::string(what) + " is undefined without both real and fake samples");
  }
}

}  // namespace

double auc(std::span<const ScoredSample> samples) {
  check_scores(samples);
  const ClassCounts counts = count_classes(samples);
  require_both_classes(counts, "AUC");

  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredSample& a, const ScoredSample& b) { return a.score < b.score; });

  // Twice the Mann-Whitney U, kept integral so ties cost no precision.
  unsigned long long twice_u = 0;
  std::size_t reals_below = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    std::size_t reals = 0;
    std::size_t fakes = 0;
    for (; j < sorted.size() && sorted[j].score == sorted[i].score; ++j) {
      (sorted[j].label == Label::fake ? fakes : reals)++;
    }
    twice_u += 2ULL * fakes * reals_below + static_cast<unsigned long long>(fakes) * reals;
    reals_below += reals;
    i = j;
  }
  return (static_cast<double>(twice_u) / 2.0) /
         (static_cast<double>(counts.fake) * static_cast<double>(counts.real));
}

Confusion confusion(std::span<const ScoredSample> samples, double threshold) {
  check_scores(samples);
  Confusion c;
  for (const auto& s : samples) {
    const bool predicted_fake = s.score >= threshold;
    if (s.label == Label::fake) {
      (predicted_fake ? c.tp : c.fn)++;
    } else {
      (predicted_fake ? c.fp : c.tn)++;
    }
  }
  return c;
}

double accuracy(const Confusion& c) {
  if (c.total() == 0) throw MetricError("accuracy is undefined on empty input");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double accuracy(std::span<const ScoredSample> samples, double threshold) {
  return accuracy(confusion(samples, threshold));
}

double f1(const Confusion& c) {
  if (c.total() == 0) throw MetricError("F1 is undefined on empty input");
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double f1(std::span<const ScoredSample> samples, double threshold) {
  return f1(confusion(samples, threshold));
}

double youden_threshold(std::span<const ScoredSample> samples) {
  check_scores(samples);
  const ClassCounts counts = count_classes(samples);
  require_both_classes(counts, "Youden threshold");

  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredSample& a, const ScoredSample& b) { return a.score > b.score; });

  // Sweep thresholds from high to low; at each distinct score t the
  // operating point counts everything with score >= t as fake.
  double best_j = -2.0;
  double best_t = sorted.front().score;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == t; ++i) {
      (sorted[i].label == Label::fake ? tp : fp)++;
    }
    const double j = static_cast<double>(tp) / counts.fake - static_cast<double>(fp) / counts.real;
    if (j >= best_j) {  // ">=" so that ties resolve to the lower threshold
      best_j = j;
      best_t = t;
    }
  }
  return best_t;
}

EvalMetrics evaluate(std::span<const ScoredSample> samples, const ThresholdPolicy& policy) {
  check_scores(samples);
  const ClassCounts counts = count_classes(samples);
  require_both_classes(counts, "evaluation");

  EvalMetrics m;
  m.threshold = std::holds_alternative<FixedThreshold>(policy)
                    ? std::get<FixedThreshold>(policy).value
                    : youden_threshold(samples);
  const Confusion c = confusion(samples, m.threshold);
  m.acc = accuracy(c);
  m.f1 = f1(c);
  m.auc = auc(samples);
  m.n_real = counts.real;
  m.n_fake = counts.fake;
  return m;
}

}  // namespace rdeg
