#pragma once

#include <cstddef>
#include <span>
#include <variant>

// Score-based binary classification metrics. Label 1 is "fake" (positive),
// higher scores mean "more likely fake".
namespace rdeg {

enum class Label : int { real = 0, fake = 1 };

struct ScoredSample {
  Label label;
  double score;  ///< finite, in [0, 1]
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct EvalMetrics {
  double acc = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
};

/// Mann-Whitney AUC: P(fake > real) + P(tie)/2, exact, O(n log n).
/// Throws MetricError unless both classes are present; ParameterError for a
/// score outside [0,1].
double auc(std::span<const ScoredSample> samples);

/// Predicts fake iff score >= threshold.
Confusion confusion(std::span<const ScoredSample> samples, double threshold);

/// (tp + tn) / n. Throws MetricError on empty input.
double accuracy(std::span<const ScoredSample> samples, double threshold);
double accuracy(const Confusion& c);

/// 2tp / (2tp + fp + fn). When tp = fp = fn = 0 (nothing positive, nothing
/// predicted positive) the result is defined as 1.
double f1(std::span<const ScoredSample> samples, double threshold);
double f1(const Confusion& c);

struct FixedThreshold {
  double value = 0.5;
};
/// Maximise TPR - FPR over the ROC operating points; ties go to the lowest
/// threshold.
struct YoudenThreshold {};
using ThresholdPolicy = std::variant<FixedThreshold, YoudenThreshold>;

/// Threshold chosen by Youden's J over the distinct observed scores.
double youden_threshold(std::span<const ScoredSample> samples);

EvalMetrics evaluate(std::span<const ScoredSample> samples,
                     const ThresholdPolicy& policy = FixedThreshold{});

}  // namespace rdeg
