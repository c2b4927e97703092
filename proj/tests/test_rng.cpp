#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <ccl/rng.hpp>

using namespace ccl;

TEST_SUITE("rng") {

TEST_CASE("splitmix64 matches the reference sequence from seed zero") {
    // First outputs of the standard splitmix64 generator, state = 0.
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
    CHECK(splitmix64(state) == 0x06c45d188009454fULL);
}

TEST_CASE("derive_seed separates streams and bases") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
    // A handful of nearby streams must not collide.
    std::vector<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 64; ++s) seen.push_back(derive_seed(7, s));
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("engine output is pinned to the mt19937_64 standard") {
    // Guarantees datasets are reproducible across standard libraries.
    Rng rng(5489);
    CHECK(rng.next_u64() == 14514284786278117030ULL);
}

TEST_CASE("uniform lands in [0, 1) with the right mean") {
    Rng rng(123);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform(lo, hi) stays inside the interval") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-3.0, 2.0);
        REQUIRE(x >= -3.0);
        REQUIRE(x < 2.0);
    }
}

TEST_CASE("uniform_index covers [0, n) roughly uniformly") {
    Rng rng(99);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t x = rng.uniform_index(7);
        REQUIRE(x < 7);
        ++counts[static_cast<std::size_t>(x)];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
    CHECK_THROWS_AS(rng.uniform_index(0), InvalidParameterError);
}

TEST_CASE("normal draws have standard moments and tail mass") {
    Rng rng(2024);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    int within_one = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
        if (std::abs(z) < 1.0) ++within_one;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    CHECK(static_cast<double>(within_one) / n == doctest::Approx(0.6827).epsilon(0.01));
}

TEST_CASE("sample_indices draws distinct indices and whole permutations") {
    Rng rng(5);
    const auto some = rng.sample_indices(100, 10);
    REQUIRE(some.size() == 10);
    auto sorted = some;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(sorted.back() < 100);

    auto all = rng.sample_indices(8, 8);
    std::sort(all.begin(), all.end());
    for (std::uint64_t i = 0; i < 8; ++i) CHECK(all[i] == i);

    CHECK_THROWS_AS(rng.sample_indices(3, 4), InvalidParameterError);
}

} // TEST_SUITE
