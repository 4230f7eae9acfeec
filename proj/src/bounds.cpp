#include "wfc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

namespace wfc::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(1 + k e^x), stable for large x.
double log1p_scaled_exp(double k, double x) {
    const double lk = std::log(k);
    if (lk + x > 30.0) return lk + x + std::log1p(std::exp(-(lk + x)));
    return std::log1p(k * std::exp(x));
}

const models::MarkovService& require_markov(const models::ServiceModel& model, const char* who) {
    const auto* m = std::get_if<models::MarkovService>(&model);
    if (m == nullptr) throw models::ModelError(std::string(who) + ": requires a two-state Markov model");
    models::validate(model, true);
    return *m;
}

void require_iid(const models::ServiceModel& model, const char* who) {
    if (!models::is_iid(model)) throw models::ModelError(std::string(who) + ": requires an i.i.d. model");
    models::validate(model);
}

// log of the per-block factor m^d + d e^{-theta w}, with log m given.
double log_block(double log_m, const FeedbackParams& p, double theta) {
    const auto d = static_cast<double>(p.delay());
    return log_add(d * log_m, std::log(d) - theta * p.window());
}

double log_product(double log_m, const FeedbackParams& p, double theta, std::int64_t t) {
    const std::int64_t blocks = t / p.delay();
    if (blocks == 0) return 0.0;
    return static_cast<double>(blocks) * log_block(log_m, p, theta);
}

double log_markov_m_plus(const models::MarkovService& m, double theta) {
    return std::log(models::eigen_m_plus(m, -theta));
}

}  // namespace

FeedbackParams::FeedbackParams(double window, std::int64_t delay) : window_(window), delay_(delay) {
    if (!(window > 0.0)) throw std::invalid_argument("FeedbackParams: window must be > 0");
    if (delay < 1) throw std::invalid_argument("FeedbackParams: delay must be >= 1 slot");
}

double mgf_swin_geometric(const models::ServiceModel& model, const FeedbackParams& params, double theta,
                          std::int64_t t) {
    require_iid(model, "mgf_swin_geometric");
    const double log_m = models::log_mgf_increment(model, -theta);
    const double log_x = -static_cast<double>(params.delay()) * log_m - theta * params.window();
    if (!(log_x < 0.0)) return kInf;
    const double lv = static_cast<double>(t) * log_m - static_cast<double>(t + 2) * std::log1p(-std::exp(log_x));
    return std::exp(lv);
}

double mgf_swin_iid(const models::ServiceModel& model, const FeedbackParams& params, double theta, std::int64_t t) {
    require_iid(model, "mgf_swin_iid");
    return std::exp(log_product(models::log_mgf_increment(model, -theta), params, theta, t));
}

double mgf_swin_markov(const models::ServiceModel& model, const FeedbackParams& params, double theta,
                       std::int64_t t) {
    const auto& m = require_markov(model, "mgf_swin_markov");
    return std::exp(log_product(log_markov_m_plus(m, theta), params, theta, t));
}

SwinMgfBound geometric_bound(const models::ServiceModel& model, const FeedbackParams& params) {
    require_iid(model, "geometric_bound");
    SwinMgfBound b;
    b.family = "geometric";
    b.log_mgf = [model, params](double theta, std::int64_t len) {
        const double log_m = models::log_mgf_increment(model, -theta);
        const double log_x = -static_cast<double>(params.delay()) * log_m - theta * params.window();
        if (!(log_x < 0.0)) return kInf;
        return static_cast<double>(len) * log_m - static_cast<double>(len + 2) * std::log1p(-std::exp(log_x));
    };
    b.log_rate = [model, params](double theta) {
        const double log_m = models::log_mgf_increment(model, -theta);
        const double log_x = -static_cast<double>(params.delay()) * log_m - theta * params.window();
        if (!(log_x < 0.0)) return kInf;
        return log_m - std::log1p(-std::exp(log_x));
    };
    b.log_offset = [model, params](double theta) {
        const double log_m = models::log_mgf_increment(model, -theta);
        const double log_x = -static_cast<double>(params.delay()) * log_m - theta * params.window();
        if (!(log_x < 0.0)) return kInf;
        return -2.0 * std::log1p(-std::exp(log_x));
    };
    b.profile = [model, params](double theta) {
        const double log_m = models::log_mgf_increment(model, -theta);
        const double log_x = -static_cast<double>(params.delay()) * log_m - theta * params.window();
        if (!(log_x < 0.0)) return LinearProfile{1, 0.0, kInf, kInf};
        const double l = std::log1p(-std::exp(log_x));
        return LinearProfile{1, 0.0, log_m - l, -2.0 * l};
    };
    return b;
}

SwinMgfBound product_bound(const models::ServiceModel& model, const FeedbackParams& params) {
    SwinMgfBound b;
    const double d = static_cast<double>(params.delay());
    if (models::is_iid(model)) {
        require_iid(model, "product_bound");
        b.family = "theorem_iid";
        b.log_mgf = [model, params](double theta, std::int64_t len) {
            return log_product(models::log_mgf_increment(model, -theta), params, theta, len);
        };
        b.log_rate = [model, params, d](double theta) {
            return log_block(models::log_mgf_increment(model, -theta), params, theta) / d;
        };
    } else {
        const auto m = require_markov(model, "product_bound");
        b.family = "theorem_markov";
        b.log_mgf = [m, params](double theta, std::int64_t len) {
            return log_product(log_markov_m_plus(m, theta), params, theta, len);
        };
        b.log_rate = [m, params, d](double theta) {
            return log_block(log_markov_m_plus(m, theta), params, theta) / d;
        };
    }
    // floor(len/d) * d >= len - (d - 1).
    b.log_offset = [rate = b.log_rate, d](double theta) { return (d - 1.0) * std::abs(rate(theta)); };
    b.profile = [rate = b.log_rate, params](double theta) {
        const auto d = params.delay();
        return LinearProfile{d, rate(theta) * static_cast<double>(d), 0.0, 0.0};
    };
    return b;
}

SwinMgfBound apriori_bound(const models::ServiceModel& model, const FeedbackParams& params) {
    models::validate(model);
    const double cap = params.window_rate();
    std::function<double(double)> per_slot;
    if (const auto* iid = std::get_if<models::IidService>(&model)) {
        per_slot = [s = *iid, cap](double theta) { return models::log_mgf_clipped_increment(s, theta, cap); };
    } else {
        per_slot = [m = std::get<models::MarkovService>(model), cap](double theta) {
            return models::log_m_plus_clipped(m, theta, cap);
        };
    }
    SwinMgfBound b;
    b.family = "apriori";
    b.log_mgf = [per_slot](double theta, std::int64_t len) {
        if (len == 0) return 0.0;
        return static_cast<double>(len) * per_slot(theta);
    };
    b.log_rate = per_slot;
    b.log_offset = [](double) { return 0.0; };
    b.profile = [per_slot](double theta) { return LinearProfile{1, 0.0, per_slot(theta), 0.0}; };
    return b;
}

SwinMgfBound best_bound(const models::ServiceModel& model, const FeedbackParams& params) {
    const SwinMgfBound a = product_bound(model, params);
    const SwinMgfBound b = apriori_bound(model, params);
    SwinMgfBound r;
    r.family = "best";
    r.log_mgf = [a, b](double theta, std::int64_t len) {
        return std::min(a.log_mgf(theta, len), b.log_mgf(theta, len));
    };
    r.log_rate = [a, b](double theta) { return std::min(a.log_rate(theta), b.log_rate(theta)); };
    r.log_offset = [a, b](double theta) {
        return a.log_rate(theta) <= b.log_rate(theta) ? a.log_offset(theta) : b.log_offset(theta);
    };
    // With d = 1 both bounds are len times a per-slot rate, so their minimum is too.
    if (params.delay() == 1) {
        r.profile = [r](double theta) { return LinearProfile{1, 0.0, r.log_rate(theta), 0.0}; };
    }
    return r;
}

SwinMgfBound open_loop_service(const models::ServiceModel& model) {
    models::validate(model);
    SwinMgfBound b;
    b.family = "open_loop";
    b.log_mgf = [model](double theta, std::int64_t len) {
        return std::log(models::mgf_path(model, -theta, len));
    };
    b.log_rate = [model](double theta) { return -theta * models::effective_capacity(model, theta); };
    // Exact for i.i.d. models; the m_+ power dominates the Markov path MGF.
    b.log_offset = [](double) { return 0.0; };
    return b;
}

BoundPoint service_curve_point(const SwinMgfBound& bound, double eps, const ThetaGrid& grid, std::int64_t t) {
    if (!(eps > 0.0) || !(eps <= 1.0)) throw std::invalid_argument("service curve: eps must be in (0, 1]");
    const double log_eps = std::log(eps);
    const auto opt = maximize_over_theta(grid, [&](double theta) {
        const double lm = bound.log_mgf(theta, t);
        if (!std::isfinite(lm)) return kNegInf;
        return (log_eps - lm) / theta;
    });
    BoundPoint p{static_cast<double>(t), 0.0, opt.theta, opt.feasible, bound.family};
    if (opt.feasible) p.value = std::max(0.0, opt.value);
    return p;
}

BoundResult statistical_service_curve(const SwinMgfBound& bound, double eps, const ThetaGrid& grid,
                                      std::int64_t horizon) {
    if (horizon < 0) throw std::invalid_argument("service curve: negative horizon");
    BoundResult r{bound.family, {}};
    r.points.reserve(static_cast<std::size_t>(horizon + 1));
    for (std::int64_t t = 0; t <= horizon; ++t) r.points.push_back(service_curve_point(bound, eps, grid, t));
    return r;
}

std::optional<double> effcap_lower_cor1a(const models::ServiceModel& model, const FeedbackParams& params,
                                         double theta) {
    require_iid(model, "effcap_lower_cor1a");
    const double g = models::effective_capacity(model, theta);
    const double x = theta * (static_cast<double>(params.delay()) * g - params.window());
    if (!(x < 0.0)) return std::nullopt;
    return g + std::log1p(-std::exp(x)) / theta;
}

double effcap_lower_cor1b(const models::ServiceModel& model, const FeedbackParams& params, double theta) {
    models::validate(model, !models::is_iid(model));
    const double g = models::effective_capacity(model, theta);
    const double d = static_cast<double>(params.delay());
    const double x = theta * (d * g - params.window());
    return g - log1p_scaled_exp(d, x) / (d * theta);
}

EffcapInterval effcap_bounds_apriori(const models::ServiceModel& model, const FeedbackParams& params,
                                     double theta) {
    models::validate(model);
    const double cap = params.window_rate();
    double log_lower;
    if (const auto* iid = std::get_if<models::IidService>(&model)) {
        log_lower = models::log_mgf_clipped_increment(*iid, theta, cap);
    } else {
        log_lower = models::log_m_plus_clipped(std::get<models::MarkovService>(model), theta, cap);
    }
    return {-log_lower / theta, std::min(models::effective_capacity(model, theta), cap)};
}

BoundResult best_effcap_lower(const models::ServiceModel& model, const FeedbackParams& params,
                              const ThetaGrid& grid) {
    BoundResult r{"best_lower", {}};
    const bool iid = models::is_iid(model);
    for (const double theta : grid.values()) {
        double best = effcap_bounds_apriori(model, params, theta).lower;
        std::string family = iid ? "cor2" : "cor5";
        const double b = effcap_lower_cor1b(model, params, theta);
        if (b > best) {
            best = b;
            family = iid ? "cor1b" : "cor3";
        }
        if (iid) {
            if (const auto a = effcap_lower_cor1a(model, params, theta); a && *a > best) {
                best = *a;
                family = "cor1a";
            }
        }
        r.points.push_back({theta, best, theta, true, family});
    }
    return r;
}

namespace {

// log sum_{len=0}^{t} e^{len * log_ma + log_mgf(theta, len)}, stopping early
// once the geometric tail is provably negligible. Partial sums only grow, so
// the loop also stops as soon as the sum exceeds `cutoff`; the returned value
// is then a lower bound that is still above the cutoff.
double log_backlog_sum(double log_ma, const SwinMgfBound& bound, double theta, std::int64_t t, double cutoff) {
    const double rate = bound.log_rate(theta);
    const double ratio = log_ma + rate;
    const double slack = ratio < 0.0 ? bound.log_offset(theta) : kInf;
    double acc = kNegInf;
    for (std::int64_t len = 0; len <= t; ++len) {
        const double lm = bound.log_mgf(theta, len);
        if (!std::isfinite(lm)) return kInf;
        acc = log_add(acc, static_cast<double>(len) * log_ma + lm);
        if (acc > cutoff) return acc;
        if (std::isfinite(slack)) {
            const double tail = slack + static_cast<double>(len + 1) * ratio - std::log(-std::expm1(ratio));
            if (tail < acc - 40.0) break;
        }
    }
    return acc;
}

// log sum_{k=0}^{m-1} e^{k y}.
double log_geometric(double y, std::int64_t m) {
    if (m <= 0) return kNegInf;
    if (m == 1) return 0.0;
    const auto mm = static_cast<double>(m);
    if (y == 0.0) return std::log(mm);
    if (y < 0.0) return std::log(-std::expm1(mm * y)) - std::log(-std::expm1(y));
    return (mm - 1.0) * y + std::log(-std::expm1(-mm * y)) - std::log(-std::expm1(-y));
}

// Closed form of log_backlog_sum for a LinearProfile: lengths are split into
// whole periods j and offsets r, len = j p + r.
double log_backlog_sum_profile(double log_ma, const LinearProfile& prof, std::int64_t t) {
    if (!std::isfinite(prof.per_block) || !std::isfinite(prof.per_slot) || !std::isfinite(prof.constant)) return kInf;
    const std::int64_t p = prof.period;
    const double x = log_ma + prof.per_slot;
    const double y = static_cast<double>(p) * x + prof.per_block;
    const std::int64_t terms = t + 1;
    const std::int64_t blocks = terms / p;
    const std::int64_t rest = terms % p;
    double acc = log_geometric(x, p) + log_geometric(y, blocks);
    if (rest > 0) acc = log_add(acc, static_cast<double>(blocks) * y + log_geometric(x, rest));
    return prof.constant + acc;
}

}  // namespace

BacklogBound backlog_bound(const models::Arrivals& arrivals, const SwinMgfBound& bound, double eps,
                           const ThetaGrid& grid, std::int64_t t) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("backlog_bound: eps must be in (0, 1)");
    if (t < 0) throw std::invalid_argument("backlog_bound: negative t");
    const double log_eps = std::log(eps);
    // Points worse than the best value seen so far are only bounded from
    // below, which is enough to rank them.
    double best = kInf;
    const auto opt = minimize_over_theta(grid, [&](double theta) {
        const double log_ma = models::log_mgf_arrivals(arrivals, theta);
        if (!std::isfinite(log_ma)) return kInf;
        const double s = bound.profile ? log_backlog_sum_profile(log_ma, bound.profile(theta), t)
                                       : log_backlog_sum(log_ma, bound, theta, t, best * theta + log_eps);
        if (!std::isfinite(s)) return kInf;
        const double value = (s - log_eps) / theta;
        best = std::min(best, value);
        return value;
    });
    if (!opt.feasible || !std::isfinite(opt.value)) return {kInf, 0.0, false, t};
    return {opt.value, opt.theta, true, t};
}

BacklogBound backlog_bound_steady(const models::Arrivals& arrivals, const SwinMgfBound& bound, double eps,
                                  const ThetaGrid& grid) {
    bool stable = false;
    for (const double theta : grid.values()) {
        const double log_ma = models::log_mgf_arrivals(arrivals, theta);
        if (std::isfinite(log_ma) && log_ma + bound.log_rate(theta) < 0.0) {
            stable = true;
            break;
        }
    }
    if (!stable) return {kInf, 0.0, false, 0};

    std::int64_t t = 64;
    BacklogBound prev = backlog_bound(arrivals, bound, eps, grid, t);
    constexpr std::int64_t kMaxHorizon = std::int64_t{1} << 30;
    while (t < kMaxHorizon) {
        t *= 2;
        const BacklogBound cur = backlog_bound(arrivals, bound, eps, grid, t);
        if (prev.bounded && cur.bounded && std::abs(cur.value - prev.value) <= 1e-6 * std::abs(cur.value)) {
            return cur;
        }
        prev = cur;
    }
    return {kInf, 0.0, false, t};
}

}  // namespace wfc::bounds
