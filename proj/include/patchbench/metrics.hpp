#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace patchbench {

/// Labels of a score-ranked list: -1 negative, 0 ignored, +1 positive.
/// positive_count, when set, overrides the number of positives used as the
/// recall denominator (truncated AP); it must be >= the number of +1 labels.
struct RankedLabels
{
    std::vector<std::int8_t> labels;
    std::optional<int> positive_count;
};

/// Permute labels by strictly decreasing score. Ties keep ascending original
/// index (stable), so results are deterministic for degenerate scorers.
/// Throws std::invalid_argument on length mismatch or non-finite scores.
RankedLabels sort_by_score(std::span<const double> scores,
                           std::span<const std::int8_t> labels);

/// Precision at rank i (1-based): positives / non-ignored entries in the
/// top-i prefix. An all-ignored prefix yields 0.
double precision_at(std::span<const std::int8_t> labels, int rank);

/// Recall at rank i (1-based) against a fixed positive total.
double recall_at(std::span<const std::int8_t> labels, int rank, int positive_total);

/// Average precision of a ranked label list. Ignored entries contribute to
/// neither numerator nor denominator. With positive_count unset the
/// denominator is the number of +1 labels (which must then be nonzero).
double average_precision(const RankedLabels& ranked);
double average_precision(std::span<const std::int8_t> labels,
                         std::optional<int> positive_count = std::nullopt);

/// Arithmetic mean of a non-empty AP list.
double mean_ap(std::span<const double> aps);

} // namespace patchbench
