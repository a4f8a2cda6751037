#include <doctest.h>

#include "patchbench/rng.hpp"

using patchbench::Rng;

TEST_CASE("same seed reproduces the stream")
{
    Rng a(1234), b(1234);
    for (int i = 0; i < 1000; ++i)
        CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in range and degenerate interval is exact")
{
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform(-2.5, 4.0);
        CHECK(u >= -2.5);
        CHECK(u < 4.0);
    }
    CHECK(rng.uniform(0.0, 0.0) == 0.0);
    CHECK(rng.uniform(3.0, 3.0) == 3.0);
}

TEST_CASE("uniform_int covers [0, n)")
{
    Rng rng(9);
    int counts[5] = {};
    for (int i = 0; i < 50000; ++i) {
        const int v = rng.uniform_int(5);
        REQUIRE(v >= 0);
        REQUIRE(v < 5);
        ++counts[v];
    }
    for (int c : counts)
        CHECK(c > 9000); // ~10000 each
}

TEST_CASE("derived substreams differ per label and ignore stream position")
{
    const std::uint64_t base = 42;
    CHECK(patchbench::derive_seed(base, 1) != patchbench::derive_seed(base, 2));
    CHECK(patchbench::derive_seed(base, 1, 0) != patchbench::derive_seed(base, 0, 1));
    CHECK(patchbench::derive_seed(base, 1, 2, 3) == patchbench::derive_seed(base, 1, 2, 3));
}

TEST_CASE("normal draws have roughly standard moments")
{
    Rng rng(11);
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sum2 / n - 1.0) < 0.03);
}
