#pragma once

// Exact equivalent service S_win of the window flow control loop on a
// concrete service path, by two independent routes: a dynamic program over
// window placements and the dioid closure (S (x) delta_d (x) delta^{+w})* (x) S.

#include <cstdint>
#include <span>
#include <vector>

#include "wfc/algebra.hpp"
#include "wfc/bounds.hpp"

namespace wfc::oracle {

/// Increments c_0..c_{T-1}; entries finite, possibly negative.
class SamplePath {
public:
    explicit SamplePath(std::vector<double> increments);

    std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(increments_.size()); }
    std::span<const double> increments() const noexcept { return increments_; }
    /// S(s,t) = sum_{k=s}^{t-1} c_k.
    double service(std::int64_t s, std::int64_t t) const;
    bool is_nonnegative() const noexcept;

private:
    std::vector<double> increments_;
    std::vector<double> prefix_;  // prefix_[u] = S(0,u)
};

/// S_win(s,t). O((t - s) d).
double swin_exact_dp(const SamplePath& path, const bounds::FeedbackParams& params, std::int64_t s, std::int64_t t);

/// S_win(s,t) for t = s..T in one pass; element i is S_win(s, s+i).
std::vector<double> swin_row(const SamplePath& path, const bounds::FeedbackParams& params, std::int64_t s);

/// The same recursion with the window taken as given, without validation.
/// Exists so that verification can inject faults (e.g. a negated window).
std::vector<double> swin_row_unchecked(const SamplePath& path, double window, std::int64_t delay, std::int64_t s);

inline constexpr std::int64_t kClosureMaxHorizon = 64;

/// (S (x) delta_d (x) delta^{+w})* (x) S over the path horizon. Throws
/// std::invalid_argument when T > kClosureMaxHorizon.
algebra::BivariateFunction swin_exact_closure(const SamplePath& path, const bounds::FeedbackParams& params);

struct Sandwich {
    double lower;  // sum_{k=s}^{t-1} min{c_k, w/d}
    double upper;  // min{S(s,t), ceil((t-s)/d) w}
};

Sandwich apriori_sandwich(const SamplePath& path, const bounds::FeedbackParams& params, std::int64_t s,
                          std::int64_t t);

/// sum_{k=s}^{t-1} min{c_k, cap}.
double clipped_sum(const SamplePath& path, double cap, std::int64_t s, std::int64_t t);

}  // namespace wfc::oracle
