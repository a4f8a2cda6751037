#include <doctest.h>

#include <vector>

#include "patchbench/metrics.hpp"
#include "patchbench/rng.hpp"
#include "oracles.hpp"

using namespace patchbench;

namespace {

std::vector<std::int8_t> labels(std::initializer_list<int> values)
{
    std::vector<std::int8_t> out;
    for (int v : values)
        out.push_back(static_cast<std::int8_t>(v));
    return out;
}

} // namespace

TEST_CASE("sort_by_score permutes by decreasing score")
{
    const std::vector<double> scores = {0.9, 0.1, 0.5};
    const auto y = labels({+1, -1, +1});
    const RankedLabels ranked = sort_by_score(scores, y);
    CHECK(ranked.labels == labels({+1, +1, -1}));
}

TEST_CASE("sort_by_score keeps original order on ties")
{
    const std::vector<double> scores = {0.5, 0.5, 0.5, 0.5};
    const auto y = labels({+1, -1, 0, +1});
    CHECK(sort_by_score(scores, y).labels == y);
}

TEST_CASE("sorting sorted input is idempotent")
{
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> scores(20);
        std::vector<std::int8_t> y(20);
        for (int i = 0; i < 20; ++i) {
            scores[i] = rng.uniform();
            y[i] = static_cast<std::int8_t>(rng.uniform_int(3) - 1);
        }
        RankedLabels once = sort_by_score(scores, y);
        std::vector<double> sorted_scores = scores;
        std::sort(sorted_scores.begin(), sorted_scores.end(), std::greater<>());
        CHECK(sort_by_score(sorted_scores, once.labels).labels == once.labels);
    }
}

TEST_CASE("sort_by_score rejects bad input")
{
    const std::vector<double> scores = {1.0, 2.0};
    CHECK_THROWS_AS((void)sort_by_score(scores, labels({+1})), std::invalid_argument);
    const std::vector<double> bad = {1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS((void)sort_by_score(bad, labels({+1, -1})), std::invalid_argument);
}

TEST_CASE("precision and recall at rank")
{
    const auto y = labels({+1, -1, +1});
    CHECK(precision_at(y, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    const auto ignored = labels({0, 0, +1});
    CHECK(precision_at(ignored, 3) == doctest::Approx(1.0).epsilon(1e-12));

    const auto one = labels({+1});
    CHECK(recall_at(one, 1, 1) == doctest::Approx(1.0));

    CHECK_THROWS_AS((void)precision_at(y, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)precision_at(y, 4), std::invalid_argument);
}

TEST_CASE("worked AP values")
{
    CHECK(average_precision(labels({+1, -1, +1})) ==
          doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
    CHECK(average_precision(labels({+1, 0, -1, +1}), 3) ==
          doctest::Approx((1.0 + 2.0 / 3.0) / 3.0).epsilon(1e-12));
    CHECK(average_precision(labels({+1, +1, +1})) == doctest::Approx(1.0));
}

TEST_CASE("AP error cases")
{
    CHECK_THROWS_AS((void)average_precision(labels({+1, +1}), 1), std::invalid_argument);
    CHECK_THROWS_AS((void)average_precision(labels({-1, -1})), std::invalid_argument);
    // No positives with an explicit count is a legal zero (used by matching).
    CHECK(average_precision(labels({-1, -1}), 4) == 0.0);
}

TEST_CASE("ignore-invariance: zero labels never change AP")
{
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + rng.uniform_int(20);
        std::vector<std::int8_t> y;
        int pos = 0;
        for (int i = 0; i < n; ++i) {
            const std::int8_t v = rng.uniform() < 0.4 ? +1 : -1;
            pos += v > 0;
            y.push_back(v);
        }
        if (pos == 0)
            y[0] = +1;
        const double base = average_precision(y);

        std::vector<std::int8_t> padded = y;
        for (int k = 0; k < 5; ++k)
            padded.insert(padded.begin() + rng.uniform_int(static_cast<int>(padded.size()) + 1), 0);
        CHECK(average_precision(padded) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("swapping an adjacent (+1,-1) to (-1,+1) never increases AP")
{
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 4 + rng.uniform_int(12);
        std::vector<std::int8_t> y;
        for (int i = 0; i < n; ++i)
            y.push_back(rng.uniform() < 0.5 ? +1 : -1);
        y[rng.uniform_int(n)] = +1;

        for (int i = 0; i + 1 < n; ++i)
            if (y[i] == +1 && y[i + 1] == -1) {
                std::vector<std::int8_t> worse = y;
                std::swap(worse[i], worse[i + 1]);
                CHECK(average_precision(worse) <= average_precision(y) + 1e-12);
            }
    }
}

TEST_CASE("AP is 1 iff every positive precedes every negative")
{
    CHECK(average_precision(labels({+1, +1, 0, -1, -1})) == doctest::Approx(1.0));
    CHECK(average_precision(labels({+1, -1, +1})) < 1.0);
    Rng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + rng.uniform_int(10);
        std::vector<std::int8_t> y;
        bool seen_neg = false, broken = false;
        for (int i = 0; i < n; ++i) {
            const std::int8_t v = rng.uniform() < 0.5 ? +1 : -1;
            if (v < 0)
                seen_neg = true;
            else if (seen_neg)
                broken = true;
            y.push_back(v);
        }
        y.push_back(+1);
        if (seen_neg)
            broken = true;
        const double ap = average_precision(y);
        if (broken)
            CHECK(ap < 1.0);
        else
            CHECK(ap == doctest::Approx(1.0));
    }
}

TEST_CASE("AP matches the step-PR oracle on random sequences")
{
    Rng rng(31);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + rng.uniform_int(40);
        std::vector<std::int8_t> y;
        int pos = 0;
        for (int i = 0; i < n; ++i) {
            const std::int8_t v = static_cast<std::int8_t>(rng.uniform_int(3) - 1);
            pos += v > 0;
            y.push_back(v);
        }
        if (pos == 0) {
            y.push_back(+1);
            ++pos;
        }
        const int k = pos + rng.uniform_int(4);
        CHECK(average_precision(y) ==
              doctest::Approx(oracles::ap_step_pr(y)).epsilon(1e-12));
        CHECK(average_precision(y, k) ==
              doctest::Approx(oracles::ap_step_pr(y, k)).epsilon(1e-12));
    }
}

TEST_CASE("mean_ap")
{
    const std::vector<double> one = {1.0};
    CHECK(mean_ap(one) == doctest::Approx(1.0));
    const std::vector<double> two = {0.0, 1.0};
    CHECK(mean_ap(two) == doctest::Approx(0.5));
    const std::vector<double> none;
    CHECK_THROWS_AS((void)mean_ap(none), std::invalid_argument);
}
