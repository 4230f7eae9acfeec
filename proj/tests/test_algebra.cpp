#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "wfc/algebra.hpp"
#include "wfc/oracle.hpp"

using namespace wfc::algebra;

namespace {

// Nonnegative, non-decreasing in t, f(t,t) = 0; occasionally +inf beyond a point.
BivariateFunction random_member(std::mt19937_64& gen, std::int64_t horizon) {
    std::uniform_int_distribution<int> inc(0, 4);
    BivariateFunction f(horizon);
    for (std::int64_t s = 0; s <= horizon; ++s) {
        double v = 0.0;
        for (std::int64_t t = s + 1; t <= horizon; ++t) {
            v += inc(gen);
            f.set(s, t, v);
        }
    }
    return f;
}

BivariateFunction additive(std::vector<double> inc) { return BivariateFunction::additive(inc); }

}  // namespace

TEST_CASE("delta entries") {
    const auto d = make_delta(3);
    CHECK(d(1, 1) == 0.0);
    CHECK(d(1, 2) == kInf);
    const auto dw = make_delta_plus_w(4, 2.0);
    CHECK(dw(2, 2) == 2.0);
    CHECK(dw(1, 3) == kInf);
    CHECK(make_delta_shift(5, 0) == make_delta(5));
    CHECK_THROWS(make_delta_plus_w(4, 0.0));
    CHECK_THROWS(make_delta_shift(4, -1));
}

TEST_CASE("delta is neutral and delta+w commutes") {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 20; ++i) {
        const auto f = random_member(gen, 8);
        CHECK(convolve(make_delta(8), f) == f);
        CHECK(convolve(f, make_delta(8)) == f);
        const auto dw = make_delta_plus_w(8, 1.5);
        const auto left = convolve(f, dw);
        CHECK(left == convolve(dw, f));
        for (std::int64_t s = 0; s <= 8; ++s)
            for (std::int64_t t = s; t <= 8; ++t) CHECK(left(s, t) == f(s, t) + 1.5);
    }
}

TEST_CASE("shift by one slot on an additive path") {
    const auto f = additive({1, 2, 3});
    CHECK(convolve(f, make_delta_shift(3, 1))(0, 3) == 3.0);
}

TEST_CASE("service followed by a delay is not subadditive") {
    const auto f = convolve(additive({1, 1, 1, 1}), make_delta_shift(4, 1));
    CHECK(f(0, 2) + f(2, 4) < f(0, 4));
}

TEST_CASE("pointwise minimum") {
    std::mt19937_64 gen(3);
    const auto f = random_member(gen, 6);
    CHECK(pointwise_min(f, f) == f);
    CHECK(pointwise_min(make_delta(6), make_delta_plus_w(6, 1.0)) == make_delta(6));
    for (int i = 0; i < 20; ++i) {
        const auto a = random_member(gen, 6), b = random_member(gen, 6), c = random_member(gen, 6);
        CHECK(convolve(a, pointwise_min(b, c)) == pointwise_min(convolve(a, b), convolve(a, c)));
    }
}

TEST_CASE("convolution") {
    const auto f = additive({2, 5, 1});
    CHECK(convolve(f, make_delta(3)) == f);
    CHECK(convolve(f, f)(0, 3) == f(0, 3));
    std::mt19937_64 gen(5);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_member(gen, 8), b = random_member(gen, 8), c = random_member(gen, 8);
        CHECK(convolve(convolve(a, b), c) == convolve(a, convolve(b, c)));
    }
    CHECK_THROWS_AS(convolve(make_delta(3), make_delta(4)), HorizonMismatch);
}

TEST_CASE("deconvolution") {
    std::mt19937_64 gen(7);
    for (int i = 0; i < 20; ++i) {
        const auto f = random_member(gen, 6);
        const auto h = deconvolve(f, make_delta(6));
        for (std::int64_t s = 0; s <= 6; ++s)
            for (std::int64_t t = s; t <= 6; ++t) {
                double scan = -kInf;
                for (std::int64_t tau = 0; tau <= s; ++tau) {
                    const double g = make_delta(6)(tau, s);
                    if (g != kInf) scan = std::max(scan, f(tau, t) - g);
                }
                CHECK(h(s, t) == scan);
            }
    }
    const auto c = additive({2, 2, 2, 2});
    const auto cc = deconvolve(c, c);
    for (std::int64_t t = 0; t <= 4; ++t) CHECK(cc(t, t) == 0.0);
}

TEST_CASE("backlog is bounded by the deconvolution") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> a(10), c(10);
        for (auto& x : a) x = u(gen);
        for (auto& x : c) x = u(gen);
        const auto A = additive(a), S = additive(c);
        const auto D = convolve(A, S);
        const auto bound = deconvolve(A, S);
        for (std::int64_t t = 0; t <= 10; ++t) CHECK(A(0, t) - D(0, t) <= bound(t, t) + 1e-12);
    }
}

TEST_CASE("self convolution") {
    std::mt19937_64 gen(13);
    const auto f = random_member(gen, 6);
    CHECK(self_convolve(f, 0) == make_delta(6));
    CHECK(self_convolve(f, 1) == f);
    const std::int64_t T = 12;
    for (std::int64_t d : {1, 2, 3, 4}) {
        const double wp = 0.5;
        const auto step = convolve(make_delta_shift(T, 1), make_delta_plus_w(T, wp));
        CHECK(self_convolve(step, d) == convolve(make_delta_shift(T, d), make_delta_plus_w(T, d * wp)));
    }
}

TEST_CASE("subadditive closure") {
    CHECK(subadditive_closure(make_delta(5)).closure == make_delta(5));
    const auto f = additive({1, 3, 2, 4});
    CHECK(subadditive_closure(f).closure == pointwise_min(f, make_delta(4)));

    // The closure route on a 3-slot path equals enumeration over index sets.
    const std::vector<double> c{3, 1, 4};
    for (std::int64_t d : {1, 2, 3})
        for (double w : {0.5, 2.0, 5.0}) {
            const auto closure = wfc::oracle::swin_exact_closure(wfc::oracle::SamplePath(c), {w, d});
            for (std::int64_t s = 0; s <= 3; ++s)
                for (std::int64_t t = s; t <= 3; ++t)
                    CHECK(closure(s, t) == doctest::Approx(support::swin_index_sets(c, w, d, s, t)).epsilon(1e-12));
        }
}
