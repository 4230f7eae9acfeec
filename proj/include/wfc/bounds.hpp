#pragma once

// Analytic bounds for a window flow control system with random service.
//
// Every MGF bound here depends on the interval only through its length, so
// curves are indexed by t (the interval [0,t)).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wfc/models.hpp"
#include "wfc/theta.hpp"

namespace wfc::bounds {

/// Window size w (Mb) and feedback delay d (slots).
class FeedbackParams {
public:
    FeedbackParams(double window, std::int64_t delay);

    double window() const noexcept { return window_; }
    std::int64_t delay() const noexcept { return delay_; }
    /// Window per unit delay, w/d: the rate of the d' = 1 lower-bound system.
    double window_rate() const noexcept { return window_ / static_cast<double>(delay_); }

private:
    double window_;
    std::int64_t delay_;
};

/// log_mgf(theta, len) = floor(len / period) * per_block + len * per_slot + constant.
struct LinearProfile {
    std::int64_t period;
    double per_block;
    double per_slot;
    double constant;
};

/// An upper bound on log E[e^{-theta S_win(tau, tau+len)}] for theta > 0.
/// log_mgf returns +inf where the bound is infeasible. log_rate is
/// lim_{len->inf} log_mgf(theta, len) / len, and wherever log_rate < 0,
/// log_mgf(theta, len) <= len * log_rate(theta) + log_offset(theta).
struct SwinMgfBound {
    std::string family;
    std::function<double(double theta, std::int64_t len)> log_mgf;
    std::function<double(double theta)> log_rate;
    std::function<double(double theta)> log_offset;
    /// Set when log_mgf has the LinearProfile form at every theta; lets
    /// backlog sums be evaluated in closed form.
    std::function<LinearProfile(double theta)> profile;
};

// --- MGF bounds on S_win ----------------------------------------------------

/// Geometric-series bound M_c(-theta)^t / (1 - M_c(-theta)^{-d} e^{-theta w})^{t+2};
/// +inf when the convergence condition fails. i.i.d. models only.
double mgf_swin_geometric(const models::ServiceModel& model, const FeedbackParams& params, double theta,
                          std::int64_t t);

/// (M_c(-theta)^d + d e^{-theta w})^{floor(t/d)}; i.i.d. models only.
double mgf_swin_iid(const models::ServiceModel& model, const FeedbackParams& params, double theta, std::int64_t t);

/// (m_+(-theta)^d + d e^{-theta w})^{floor(t/d)}; two-state Markov models with
/// p01 + p10 < 1 (throws models::ModelError otherwise).
double mgf_swin_markov(const models::ServiceModel& model, const FeedbackParams& params, double theta,
                       std::int64_t t);

SwinMgfBound geometric_bound(const models::ServiceModel& model, const FeedbackParams& params);
/// The i.i.d. or Markov product bound, whichever applies to the model.
SwinMgfBound product_bound(const models::ServiceModel& model, const FeedbackParams& params);
/// MGF of the lower-bound process sum min{c_k, w/d}: exact power for i.i.d.
/// models, m_+(-theta)^len of the clipped chain for Markov models.
SwinMgfBound apriori_bound(const models::ServiceModel& model, const FeedbackParams& params);
/// Pointwise minimum of product_bound and apriori_bound.
SwinMgfBound best_bound(const models::ServiceModel& model, const FeedbackParams& params);
/// log E[e^{-theta S(0,len)}] of the service without feedback.
SwinMgfBound open_loop_service(const models::ServiceModel& model);

// --- Bound results ------------------------------------------------------------

struct BoundPoint {
    double x;       // t (slots) or theta (per Mb)
    double value;
    double theta;   // optimising theta; 0 when not applicable
    bool feasible;
    std::string family;
};

struct BoundResult {
    std::string family;
    std::vector<BoundPoint> points;
};

/// S^eps(0,t) = max_theta (log eps - log M(theta,t)) / theta, floored at 0,
/// for t = 0..horizon.
BoundResult statistical_service_curve(const SwinMgfBound& bound, double eps, const ThetaGrid& grid,
                                      std::int64_t horizon);

/// Single-point version of statistical_service_curve.
BoundPoint service_curve_point(const SwinMgfBound& bound, double eps, const ThetaGrid& grid, std::int64_t t);

// --- Effective capacity ---------------------------------------------------------

/// gamma_S + (1/theta) log(1 - e^{theta(d gamma_S - w)}); nullopt unless
/// gamma_S(-theta) < w/d. i.i.d. models only.
std::optional<double> effcap_lower_cor1a(const models::ServiceModel& model, const FeedbackParams& params,
                                         double theta);

/// gamma_S - (1/(d theta)) log(1 + d e^{theta(d gamma_S - w)}).
double effcap_lower_cor1b(const models::ServiceModel& model, const FeedbackParams& params, double theta);

struct EffcapInterval {
    double lower;
    double upper;
};

/// Lower: effective capacity of the process min{c_k, w/d}. Upper: min{gamma_S, w/d}.
EffcapInterval effcap_bounds_apriori(const models::ServiceModel& model, const FeedbackParams& params,
                                     double theta);

/// Pointwise maximum of the applicable lower bounds at each grid theta; the
/// family of each point names the winning bound.
BoundResult best_effcap_lower(const models::ServiceModel& model, const FeedbackParams& params,
                              const ThetaGrid& grid);

// --- Backlog ----------------------------------------------------------------------

struct BacklogBound {
    double value;      // Mb; +inf when unbounded
    double theta;
    bool bounded;
    std::int64_t horizon;  // t at which the value was evaluated
};

/// b*(t) = min_theta (1/theta) { log sum_{tau=0}^{t} M_A(theta, tau, t) M_Swin(-theta, tau, t) - log eps }.
BacklogBound backlog_bound(const models::Arrivals& arrivals, const SwinMgfBound& bound, double eps,
                           const ThetaGrid& grid, std::int64_t t);

/// Steady-state b*: doubles t until b*(t) changes by less than 1e-6 relative.
/// Unbounded when log M_A(theta) + log_rate(theta) >= 0 at every grid theta.
BacklogBound backlog_bound_steady(const models::Arrivals& arrivals, const SwinMgfBound& bound, double eps,
                                  const ThetaGrid& grid);

}  // namespace wfc::bounds
