#include "wfc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace wfc::oracle {

namespace {

void check_interval(const SamplePath& path, std::int64_t s, std::int64_t t) {
    if (s < 0 || s > t || t > path.horizon()) {
        throw std::out_of_range("interval [" + std::to_string(s) + "," + std::to_string(t) + ") outside path of " +
                                std::to_string(path.horizon()) + " slots");
    }
}

}  // namespace

SamplePath::SamplePath(std::vector<double> increments) : increments_(std::move(increments)) {
    prefix_.assign(increments_.size() + 1, 0.0);
    for (std::size_t k = 0; k < increments_.size(); ++k) {
        if (!std::isfinite(increments_[k])) throw std::invalid_argument("SamplePath: non-finite increment");
        prefix_[k + 1] = prefix_[k] + increments_[k];
    }
}

double SamplePath::service(std::int64_t s, std::int64_t t) const {
    check_interval(*this, s, t);
    // Summed directly so that S(s,t) does not pick up prefix rounding.
    double acc = 0.0;
    for (std::int64_t k = s; k < t; ++k) acc += increments_[static_cast<std::size_t>(k)];
    return acc;
}

bool SamplePath::is_nonnegative() const noexcept {
    return std::all_of(increments_.begin(), increments_.end(), [](double c) { return c >= 0.0; });
}

// A cover of [s, t) alternates paid stretches, costing S over the stretch,
// and skipped stretches of length 1..d, costing w each. g is the best cost of
// a cover of [s, tau) ending in a skip (g[s] = 0 starts the cover), q the best
// cost of any cover of [s, u).
//   q[u]   = min_{s <= tau' <= u} g[tau'] + S(tau', u)
//   g[tau] = w + min_{max(s, tau-d) <= u < tau} q[u]
std::vector<double> swin_row_unchecked(const SamplePath& path, double window, std::int64_t delay, std::int64_t s) {
    check_interval(path, s, s);
    const auto c = path.increments();
    const std::int64_t n = path.horizon() - s;
    std::vector<double> q(static_cast<std::size_t>(n + 1));
    // best = min_{tau' <= u} g[tau'] + S(tau', u), advanced one slot at a time
    // so no prefix sums are differenced.
    double best = 0.0;
    q[0] = 0.0;
    std::deque<std::int64_t> window_min;  // indices into q with increasing q values
    window_min.push_back(0);
    for (std::int64_t i = 1; i <= n; ++i) {
        best += c[static_cast<std::size_t>(s + i - 1)];
        while (!window_min.empty() && window_min.front() < i - delay) window_min.pop_front();
        const double g = window + q[static_cast<std::size_t>(window_min.front())];
        best = std::min(best, g);
        q[static_cast<std::size_t>(i)] = best;
        while (!window_min.empty() && q[static_cast<std::size_t>(window_min.back())] >= best) window_min.pop_back();
        window_min.push_back(i);
    }
    return q;
}

std::vector<double> swin_row(const SamplePath& path, const bounds::FeedbackParams& params, std::int64_t s) {
    return swin_row_unchecked(path, params.window(), params.delay(), s);
}

double swin_exact_dp(const SamplePath& path, const bounds::FeedbackParams& params, std::int64_t s, std::int64_t t) {
    check_interval(path, s, t);
    return swin_row(path, params, s)[static_cast<std::size_t>(t - s)];
}

algebra::BivariateFunction swin_exact_closure(const SamplePath& path, const bounds::FeedbackParams& params) {
    const std::int64_t horizon = path.horizon();
    if (horizon > kClosureMaxHorizon) {
        throw std::invalid_argument("swin_exact_closure: horizon " + std::to_string(horizon) + " exceeds " +
                                    std::to_string(kClosureMaxHorizon));
    }
    const auto s = algebra::BivariateFunction::additive(path.increments());
    const auto f = algebra::convolve(algebra::convolve(s, algebra::make_delta_shift(horizon, params.delay())),
                                     algebra::make_delta_plus_w(horizon, params.window()));
    algebra::ClosureOptions options;
    if (path.is_nonnegative()) options.structural_terms = (horizon + params.delay() - 1) / params.delay();
    return algebra::convolve(algebra::subadditive_closure(f, options).closure, s);
}

double clipped_sum(const SamplePath& path, double cap, std::int64_t s, std::int64_t t) {
    check_interval(path, s, t);
    double acc = 0.0;
    for (std::int64_t k = s; k < t; ++k) acc += std::min(path.increments()[static_cast<std::size_t>(k)], cap);
    return acc;
}

Sandwich apriori_sandwich(const SamplePath& path, const bounds::FeedbackParams& params, std::int64_t s,
                          std::int64_t t) {
    check_interval(path, s, t);
    const std::int64_t windows = (t - s + params.delay() - 1) / params.delay();
    return {clipped_sum(path, params.window_rate(), s, t),
            std::min(path.service(s, t), static_cast<double>(windows) * params.window())};
}

}  // namespace wfc::oracle
