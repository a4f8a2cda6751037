#include "patchbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace patchbench {

RankedLabels sort_by_score(std::span<const double> scores,
                           std::span<const std::int8_t> labels)
{
    if (scores.size() != labels.size())
        throw std::invalid_argument("sort_by_score: length mismatch");
    for (double s : scores)
        if (!std::isfinite(s))
            throw std::invalid_argument("sort_by_score: non-finite score");

    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });

    RankedLabels out;
    out.labels.reserve(labels.size());
    for (int idx : order)
        out.labels.push_back(labels[idx]);
    return out;
}

double precision_at(std::span<const std::int8_t> labels, int rank)
{
    if (rank < 1 || rank > static_cast<int>(labels.size()))
        throw std::invalid_argument("precision_at: rank out of range");
    int pos = 0, counted = 0;
    for (int k = 0; k < rank; ++k) {
        if (labels[k] == 0)
            continue;
        ++counted;
        if (labels[k] > 0)
            ++pos;
    }
    return counted == 0 ? 0.0 : static_cast<double>(pos) / counted;
}

double recall_at(std::span<const std::int8_t> labels, int rank, int positive_total)
{
    if (rank < 1 || rank > static_cast<int>(labels.size()))
        throw std::invalid_argument("recall_at: rank out of range");
    if (positive_total < 1)
        throw std::invalid_argument("recall_at: positive total must be >= 1");
    int pos = 0;
    for (int k = 0; k < rank; ++k)
        if (labels[k] > 0)
            ++pos;
    return static_cast<double>(pos) / positive_total;
}

double average_precision(std::span<const std::int8_t> labels,
                         std::optional<int> positive_count)
{
    int n_pos = 0;
    for (std::int8_t y : labels)
        if (y > 0)
            ++n_pos;

    int denom = n_pos;
    if (positive_count) {
        if (*positive_count < n_pos)
            throw std::invalid_argument(
                "average_precision: positive_count below actual positives");
        denom = *positive_count;
    }
    if (denom < 1)
        throw std::invalid_argument("average_precision: no positives and no count");

    double sum = 0.0;
    int pos = 0, counted = 0;
    for (std::int8_t y : labels) {
        if (y == 0)
            continue;
        ++counted;
        if (y > 0) {
            ++pos;
            sum += static_cast<double>(pos) / counted;
        }
    }
    return sum / denom;
}

double average_precision(const RankedLabels& ranked)
{
    return average_precision(ranked.labels, ranked.positive_count);
}

double mean_ap(std::span<const double> aps)
{
    if (aps.empty())
        throw std::invalid_argument("mean_ap: empty list");
    double sum = 0.0;
    for (double a : aps)
        sum += a;
    return sum / static_cast<double>(aps.size());
}

} // namespace patchbench
