#include "wfc/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wfc::algebra {

namespace {

void require_same_horizon(const BivariateFunction& f, const BivariateFunction& g, const char* op) {
    if (f.horizon() != g.horizon()) {
        throw HorizonMismatch(std::string(op) + ": horizons differ (" + std::to_string(f.horizon()) +
                              " vs " + std::to_string(g.horizon()) + ")");
    }
}

}  // namespace

BivariateFunction::BivariateFunction(std::int64_t horizon) : horizon_(horizon) {
    if (horizon < 0) throw std::invalid_argument("BivariateFunction: negative horizon");
    const auto n = static_cast<std::size_t>(horizon + 1);
    values_.assign(n * (n + 1) / 2, 0.0);
}

std::size_t BivariateFunction::index(std::int64_t s, std::int64_t t) const {
    if (s < 0 || s > t || t > horizon_) {
        throw std::out_of_range("BivariateFunction: (" + std::to_string(s) + "," + std::to_string(t) +
                                ") outside 0 <= s <= t <= " + std::to_string(horizon_));
    }
    // Row s starts after rows 0..s-1, which hold (T+1) + T + ... + (T-s+2) entries.
    const auto n = static_cast<std::size_t>(horizon_ + 1);
    const auto us = static_cast<std::size_t>(s);
    return us * n - us * (us - 1) / 2 + static_cast<std::size_t>(t - s);
}

BivariateFunction BivariateFunction::additive(std::span<const double> increments) {
    const auto horizon = static_cast<std::int64_t>(increments.size());
    BivariateFunction f(horizon);
    for (std::int64_t s = 0; s <= horizon; ++s) {
        double acc = 0.0;
        for (std::int64_t t = s; t <= horizon; ++t) {
            f.set(s, t, acc);
            if (t < horizon) acc += increments[static_cast<std::size_t>(t)];
        }
    }
    return f;
}

bool BivariateFunction::is_causal() const noexcept {
    for (std::int64_t t = 0; t <= horizon_; ++t)
        if ((*this)(t, t) != 0.0) return false;
    return true;
}

bool BivariateFunction::in_family() const noexcept {
    for (std::int64_t s = 0; s <= horizon_; ++s) {
        for (std::int64_t t = s; t <= horizon_; ++t) {
            const double v = (*this)(s, t);
            if (std::isnan(v) || v < 0.0) return false;
            if (t > s && v < (*this)(s, t - 1)) return false;
        }
    }
    return true;
}

BivariateFunction make_delta(std::int64_t horizon) {
    return BivariateFunction::from_fn(horizon, [](std::int64_t s, std::int64_t t) { return s >= t ? 0.0 : kInf; });
}

BivariateFunction make_delta_plus_w(std::int64_t horizon, double w) {
    if (!(w > 0.0)) throw std::invalid_argument("make_delta_plus_w: w must be > 0");
    return BivariateFunction::from_fn(horizon, [w](std::int64_t s, std::int64_t t) { return s >= t ? w : kInf; });
}

BivariateFunction make_delta_shift(std::int64_t horizon, std::int64_t d) {
    if (d < 0) throw std::invalid_argument("make_delta_shift: d must be >= 0");
    return BivariateFunction::from_fn(horizon,
                                      [d](std::int64_t s, std::int64_t t) { return s >= t - d ? 0.0 : kInf; });
}

BivariateFunction pointwise_min(const BivariateFunction& f, const BivariateFunction& g) {
    require_same_horizon(f, g, "pointwise_min");
    return BivariateFunction::from_fn(f.horizon(),
                                      [&](std::int64_t s, std::int64_t t) { return std::min(f(s, t), g(s, t)); });
}

BivariateFunction convolve(const BivariateFunction& f, const BivariateFunction& g) {
    require_same_horizon(f, g, "convolve");
    return BivariateFunction::from_fn(f.horizon(), [&](std::int64_t s, std::int64_t t) {
        double best = kInf;
        for (std::int64_t tau = s; tau <= t; ++tau) best = std::min(best, f(s, tau) + g(tau, t));
        return best;
    });
}

BivariateFunction deconvolve(const BivariateFunction& f, const BivariateFunction& g) {
    require_same_horizon(f, g, "deconvolve");
    return BivariateFunction::from_fn(f.horizon(), [&](std::int64_t s, std::int64_t t) {
        double best = -kInf;
        for (std::int64_t tau = 0; tau <= s; ++tau) {
            const double a = f(tau, t);
            const double b = g(tau, s);
            if (std::isinf(a) && std::isinf(b)) {
                throw std::domain_error("deconvolve: inf - inf at tau=" + std::to_string(tau) +
                                        " for (s,t)=(" + std::to_string(s) + "," + std::to_string(t) + ")");
            }
            if (std::isinf(b)) continue;
            best = std::max(best, a - b);
        }
        return best;
    });
}

BivariateFunction self_convolve(const BivariateFunction& f, std::int64_t n) {
    if (n < 0) throw std::invalid_argument("self_convolve: n must be >= 0");
    if (n == 0) return make_delta(f.horizon());
    BivariateFunction power = f;
    for (std::int64_t k = 1; k < n; ++k) power = convolve(power, f);
    return power;
}

ClosureResult subadditive_closure(const BivariateFunction& f, const ClosureOptions& options) {
    const std::int64_t cap = f.horizon() + 2;
    BivariateFunction running = pointwise_min(make_delta(f.horizon()), f);
    BivariateFunction power = f;
    std::int64_t n = 1;
    while (true) {
        if (options.structural_terms && n >= *options.structural_terms) break;
        if (n >= cap) {
            throw ClosureDidNotConverge("subadditive_closure: running minimum still changing after " +
                                        std::to_string(cap) + " terms");
        }
        power = convolve(power, f);
        ++n;
        BivariateFunction next = pointwise_min(running, power);
        // The next power is bounded below by running (x) f, so an unchanged
        // minimum is a fixed point.
        if (next == running) break;
        running = std::move(next);
    }
    return {std::move(running), n};
}

}  // namespace wfc::algebra
