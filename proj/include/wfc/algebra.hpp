#pragma once

// Finite-horizon bivariate min-plus dioid.
//
// A BivariateFunction f holds f(s,t) for every integer pair 0 <= s <= t <= T.
// Entries are extended reals: finite doubles or +infinity. The carrier set of
// the dioid (nonnegative, non-decreasing in t) is checked by in_family(); the
// operations themselves accept any finite-or-+inf table so that signed
// service paths (leftover service) can be pushed through the same machinery.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace wfc::algebra {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class HorizonMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ClosureDidNotConverge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BivariateFunction {
public:
    /// All-zero table over [0, T].
    explicit BivariateFunction(std::int64_t horizon);

    /// Builds f(s,t) = value(s,t) for every s <= t.
    template <class Fn>
    static BivariateFunction from_fn(std::int64_t horizon, Fn&& value) {
        BivariateFunction f(horizon);
        for (std::int64_t s = 0; s <= horizon; ++s)
            for (std::int64_t t = s; t <= horizon; ++t) f.set(s, t, value(s, t));
        return f;
    }

    /// Additive process f(s,t) = sum_{k=s}^{t-1} increments[k]; T = increments.size().
    static BivariateFunction additive(std::span<const double> increments);

    std::int64_t horizon() const noexcept { return horizon_; }

    double operator()(std::int64_t s, std::int64_t t) const { return values_[index(s, t)]; }
    void set(std::int64_t s, std::int64_t t, double v) { values_[index(s, t)] = v; }

    /// f(t,t) = 0 for all t.
    bool is_causal() const noexcept;
    /// Nonnegative and non-decreasing in the second argument.
    bool in_family() const noexcept;

    bool operator==(const BivariateFunction& other) const = default;

private:
    std::size_t index(std::int64_t s, std::int64_t t) const;

    std::int64_t horizon_;
    std::vector<double> values_;
};

/// delta(s,t) = 0 for s >= t, +inf otherwise. Neutral element of convolve().
BivariateFunction make_delta(std::int64_t horizon);

/// delta^{+w}(s,t) = w for s >= t, +inf otherwise. Throws for w <= 0.
BivariateFunction make_delta_plus_w(std::int64_t horizon, double w);

/// delta_d(s,t) = delta(s, t-d). Throws for d < 0.
BivariateFunction make_delta_shift(std::int64_t horizon, std::int64_t d);

BivariateFunction pointwise_min(const BivariateFunction& f, const BivariateFunction& g);

/// (f (x) g)(s,t) = min_{s <= tau <= t} f(s,tau) + g(tau,t).
BivariateFunction convolve(const BivariateFunction& f, const BivariateFunction& g);

/// (f (/) g)(s,t) = max_{0 <= tau <= s} f(tau,t) - g(tau,s). Terms with
/// g = +inf drop out; throws std::domain_error on inf - inf.
BivariateFunction deconvolve(const BivariateFunction& f, const BivariateFunction& g);

/// f^{(0)} = delta, f^{(n+1)} = f^{(n)} (x) f.
BivariateFunction self_convolve(const BivariateFunction& f, std::int64_t n);

struct ClosureOptions {
    // Largest n whose term f^{(n)} can still lower the minimum. Known for the
    // feedback operand S (x) delta_d (x) delta^{+w} with nonnegative S:
    // ceil(T/d).
    std::optional<std::int64_t> structural_terms;
};

struct ClosureResult {
    BivariateFunction closure;
    std::int64_t terms_used;  // largest n that was evaluated
};

/// Truncated subadditive closure f* = min_{n >= 0} f^{(n)}. Stops at the first
/// n whose term leaves the running minimum unchanged (a fixed point of the
/// iteration) or at the structural bound. Throws ClosureDidNotConverge when
/// neither happens within T + 2 terms.
ClosureResult subadditive_closure(const BivariateFunction& f, const ClosureOptions& options = {});

}  // namespace wfc::algebra
