#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "wfc/oracle.hpp"

using namespace wfc;
using namespace wfc::oracle;

namespace {

std::vector<double> random_path(std::mt19937_64& gen, std::int64_t n, bool signed_values) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (auto& x : c) x = signed_values ? 1.0 - e(gen) * 1.3 : e(gen);
    return c;
}

}  // namespace

TEST_CASE("d = 1 clips every increment at w") {
    std::mt19937_64 gen(1);
    for (int i = 0; i < 50; ++i) {
        const auto c = random_path(gen, 15, i % 2 == 1);
        const SamplePath path(c);
        const double w = 0.2 + 0.1 * (i % 7);
        for (std::int64_t s = 0; s <= 15; s += 3)
            for (std::int64_t t = s; t <= 15; ++t) {
                double expect = 0.0;
                for (std::int64_t k = s; k < t; ++k) expect += std::min(c[static_cast<std::size_t>(k)], w);
                CHECK(swin_exact_dp(path, {w, 1}, s, t) == doctest::Approx(expect).epsilon(1e-12));
            }
    }
}

TEST_CASE("small path against enumeration over index sets") {
    const std::vector<double> c{3, 1, 4};
    const SamplePath path(c);
    CHECK(swin_exact_dp(path, {2.0, 2}, 0, 3) == support::swin_index_sets(c, 2.0, 2, 0, 3));
    std::mt19937_64 gen(2);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_path(gen, 10, false);
        const SamplePath sp(p);
        const std::int64_t d = 1 + i % 4;
        const double w = 0.3 + 0.4 * (i % 5);
        for (std::int64_t t = 0; t <= 10; ++t)
            CHECK(swin_exact_dp(sp, {w, d}, 0, t) == doctest::Approx(support::swin_index_sets(p, w, d, 0, t)).epsilon(1e-12));
    }
}

TEST_CASE("signed paths against enumeration over covers") {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_path(gen, 10, true);
        const SamplePath sp(p);
        const std::int64_t d = 1 + i % 3;
        const double w = 0.3 + 0.5 * (i % 4);
        for (std::int64_t s = 0; s <= 10; s += 5)
            for (std::int64_t t = s; t <= 10; ++t)
                CHECK(swin_exact_dp(sp, {w, d}, s, t) == doctest::Approx(support::swin_covers(p, w, d, s, t)).epsilon(1e-12));
    }
}

TEST_CASE("huge window leaves the service unchanged") {
    std::mt19937_64 gen(4);
    const auto p = random_path(gen, 20, false);
    const SamplePath sp(p);
    for (std::int64_t t = 0; t <= 20; ++t) CHECK(swin_exact_dp(sp, {1e12, 3}, 0, t) == doctest::Approx(sp.service(0, t)));
}

TEST_CASE("closure route agrees with the DP") {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 60; ++i) {
        const auto p = random_path(gen, 12, i % 3 == 2);
        const SamplePath sp(p);
        const bounds::FeedbackParams params{0.2 + 0.3 * (i % 6), std::int64_t{1} + i % 5};
        const auto closure = swin_exact_closure(sp, params);
        for (std::int64_t s = 0; s <= 12; ++s) {
            const auto row = swin_row(sp, params, s);
            for (std::int64_t t = s; t <= 12; ++t)
                CHECK(std::abs(closure(s, t) - row[static_cast<std::size_t>(t - s)]) <= 1e-9);
        }
    }
    CHECK_THROWS_AS(swin_exact_closure(SamplePath(std::vector<double>(kClosureMaxHorizon + 1, 1.0)), {1.0, 1}),
                    std::invalid_argument);
}

TEST_CASE("deterministic service") {
    const std::int64_t T = 400;
    const SamplePath sp(std::vector<double>(T, 1.0));
    for (std::int64_t d : {1, 4, 10}) {
        const bounds::FeedbackParams params{0.1 * d, d};
        const double v = swin_exact_dp(sp, params, 0, T);
        const auto sw = apriori_sandwich(sp, params, 0, T);
        CHECK(sw.lower == doctest::Approx(0.1 * T).epsilon(1e-12));
        CHECK(v >= sw.lower - 1e-9);
        CHECK(v <= sw.upper + 1e-9);
        CHECK(v / T == doctest::Approx(0.1).epsilon(0.03));
    }
}

TEST_CASE("a-priori sandwich") {
    std::mt19937_64 gen(6);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_path(gen, 20, i % 4 == 3);
        const SamplePath sp(p);
        const bounds::FeedbackParams params{0.1 + 0.2 * (i % 9), std::int64_t{1} + i % 6};
        for (std::int64_t s = 0; s <= 20; s += 4)
            for (std::int64_t t = s; t <= 20; ++t) {
                const double v = swin_exact_dp(sp, params, s, t);
                const auto sw = apriori_sandwich(sp, params, s, t);
                CHECK(sw.lower <= v + 1e-12);
                CHECK(v <= sw.upper + 1e-12);
                if (params.delay() == 1) CHECK(sw.lower == doctest::Approx(v).epsilon(1e-12));
            }
    }
}

TEST_CASE("path validation") {
    CHECK_THROWS(SamplePath(std::vector<double>{1.0, std::numeric_limits<double>::infinity()}));
    CHECK_THROWS(bounds::FeedbackParams(0.0, 1));
    CHECK_THROWS(bounds::FeedbackParams(1.0, 0));
}
