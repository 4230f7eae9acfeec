#include "wfc/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

namespace wfc::models {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

IncrementLaw widen(const BasicLaw& law) {
    return std::visit([](const auto& l) -> IncrementLaw { return l; }, law);
}

BasicLaw narrow(const IncrementLaw& law, const char* what) {
    if (const auto* c = std::get_if<ConstantLaw>(&law)) return *c;
    if (const auto* e = std::get_if<ExponentialLaw>(&law)) return *e;
    throw ModelError(std::string(what) + ": nested leftover laws are not supported");
}

void validate_law(const IncrementLaw& law) {
    std::visit(Overloaded{
                   [](const ConstantLaw& c) {
                       if (!std::isfinite(c.value)) throw ModelError("constant increment must be finite");
                   },
                   [](const ExponentialLaw& e) {
                       if (!(e.mean > 0.0) || !std::isfinite(e.mean))
                           throw ModelError("exponential increment needs a finite mean > 0");
                   },
                   [](const DifferenceLaw& d) {
                       validate_law(widen(d.capacity));
                       validate_law(widen(d.cross));
                   },
               },
               law);
}

/// E[e^{-theta min(X, cap)}] for a basic law, theta > 0.
double basic_mgf_clipped(const BasicLaw& law, double theta, double cap) {
    return std::visit(Overloaded{
                          [&](const ConstantLaw& c) { return std::exp(-theta * std::min(c.value, cap)); },
                          [&](const ExponentialLaw& e) {
                              if (cap <= 0.0) return std::exp(-theta * cap);
                              const double m = e.mean;
                              return (1.0 + m * theta * std::exp(-(theta + 1.0 / m) * cap)) / (1.0 + m * theta);
                          },
                      },
                      law);
}

struct EigenPair {
    double plus;
    double minus;
};

/// Eigenvalues of [[p00 M0, p01 M1], [p10 M0, p11 M1]].
EigenPair eigen_pair(double p00, double p11, double m0, double m1) {
    if (std::isinf(m0) || std::isinf(m1)) return {kInf, kInf};
    const double p01 = 1.0 - p00;
    const double p10 = 1.0 - p11;
    const double trace = p00 * m0 + p11 * m1;
    const double det = (p00 + p11 - 1.0) * m0 * m1;
    // tr^2 - 4 det rewritten as a sum of nonnegative terms.
    const double gap = p00 * m0 - p11 * m1;
    const double disc = gap * gap + 4.0 * p01 * p10 * m0 * m1;
    const double plus = 0.5 * (trace + std::sqrt(disc));
    const double minus = plus > 0.0 ? det / plus : 0.5 * (trace - std::sqrt(disc));
    return {plus, minus};
}

void validate_chain(double p00, double p11) {
    if (!(p00 >= 0.0 && p00 <= 1.0) || !(p11 >= 0.0 && p11 <= 1.0))
        throw ModelError("transition probabilities must lie in [0,1]");
    if ((1.0 - p00) + (1.0 - p11) <= 0.0)
        throw ModelError("chain without transitions has no unique steady state");
}

}  // namespace

// ---------------------------------------------------------------------------

double mean(const IncrementLaw& law) {
    return std::visit(Overloaded{
                          [](const ConstantLaw& c) { return c.value; },
                          [](const ExponentialLaw& e) { return e.mean; },
                          [](const DifferenceLaw& d) { return mean(widen(d.capacity)) - mean(widen(d.cross)); },
                      },
                      law);
}

double log_mgf(const IncrementLaw& law, double theta) {
    return std::visit(Overloaded{
                          [&](const ConstantLaw& c) { return theta * c.value; },
                          [&](const ExponentialLaw& e) {
                              const double x = theta * e.mean;
                              return x < 1.0 ? -std::log1p(-x) : kInf;
                          },
                          [&](const DifferenceLaw& d) {
                              const double a = log_mgf(widen(d.capacity), theta);
                              const double b = log_mgf(widen(d.cross), -theta);
                              return (std::isinf(a) || std::isinf(b)) ? kInf : a + b;
                          },
                      },
                      law);
}

double mgf(const IncrementLaw& law, double theta) { return std::exp(log_mgf(law, theta)); }

double mgf_clipped(const IncrementLaw& law, double theta, double cap) {
    return std::visit(Overloaded{
                          [&](const ConstantLaw& c) { return basic_mgf_clipped(c, theta, cap); },
                          [&](const ExponentialLaw& e) { return basic_mgf_clipped(e, theta, cap); },
                          [&](const DifferenceLaw& d) {
                              // min(U - Y, cap) = min(U, cap + Y) - Y, then integrate over Y.
                              if (const auto* y = std::get_if<ConstantLaw>(&d.cross)) {
                                  return std::exp(theta * y->value) *
                                         basic_mgf_clipped(d.capacity, theta, cap + y->value);
                              }
                              const double lambda = std::get<ExponentialLaw>(d.cross).mean;
                              if (theta * lambda >= 1.0) return kInf;
                              const double tilt = 1.0 - lambda * theta;
                              if (const auto* u = std::get_if<ConstantLaw>(&d.capacity)) {
                                  const double c = u->value;
                                  const double b = c - cap;  // Y above b pushes U - Y below cap
                                  if (b <= 0.0) return std::exp(-theta * c) / tilt;
                                  return std::exp(-theta * cap) * (-std::expm1(-b / lambda)) +
                                         std::exp(-theta * c + (theta - 1.0 / lambda) * b) / tilt;
                              }
                              const double m = std::get<ExponentialLaw>(d.capacity).mean;
                              // Integral over Y >= y0 once cap + Y >= 0.
                              auto tail = [&](double shifted_cap) {
                                  return (1.0 / tilt + m * theta * std::exp(-(theta + 1.0 / m) * shifted_cap) *
                                                           (m / (m + lambda))) /
                                         (1.0 + m * theta);
                              };
                              if (cap >= 0.0) return tail(cap);
                              const double y0 = -cap;
                              return std::exp(-theta * cap) * (-std::expm1(-y0 / lambda)) +
                                     std::exp((theta - 1.0 / lambda) * y0) * tail(0.0);
                          },
                      },
                      law);
}

bool is_nonnegative(const IncrementLaw& law) {
    return std::visit(Overloaded{
                          [](const ConstantLaw& c) { return c.value >= 0.0; },
                          [](const ExponentialLaw&) { return true; },
                          [](const DifferenceLaw& d) {
                              const auto* y = std::get_if<ConstantLaw>(&d.cross);
                              const auto* u = std::get_if<ConstantLaw>(&d.capacity);
                              // U - Y >= 0 needs a constant Y at or below the smallest U.
                              if (!y) return false;
                              return u ? u->value >= y->value : y->value <= 0.0;
                          },
                      },
                      law);
}

double sample(const IncrementLaw& law, Rng& rng) {
    return std::visit(Overloaded{
                          [](const ConstantLaw& c) { return c.value; },
                          [&](const ExponentialLaw& e) { return rng.exponential(e.mean); },
                          [&](const DifferenceLaw& d) {
                              const double u = sample(widen(d.capacity), rng);
                              const double y = sample(widen(d.cross), rng);
                              return u - y;
                          },
                      },
                      law);
}

// ---------------------------------------------------------------------------

ServiceModel deterministic(double capacity) {
    ServiceModel m = IidService{ConstantLaw{capacity}};
    validate(m);
    return m;
}

ServiceModel exponential_vbr(double mean_capacity) {
    ServiceModel m = IidService{ExponentialLaw{mean_capacity}};
    validate(m);
    return m;
}

ServiceModel mmoo(double p00, double p11, double peak) {
    if (!(peak > 0.0)) throw ModelError("On-Off peak rate must be > 0");
    ServiceModel m = MarkovService{p00, p11, ConstantLaw{0.0}, ConstantLaw{peak}};
    validate(m);
    return m;
}

ServiceModel markov_modulated(double p00, double p11, IncrementLaw off_law, IncrementLaw on_law) {
    ServiceModel m = MarkovService{p00, p11, std::move(off_law), std::move(on_law)};
    validate(m);
    return m;
}

ServiceModel leftover(const ServiceModel& capacity, const ServiceModel& cross) {
    const auto* cap_iid = std::get_if<IidService>(&capacity);
    const auto* cross_iid = std::get_if<IidService>(&cross);
    ServiceModel out;
    if (cap_iid && cross_iid) {
        out = IidService{DifferenceLaw{narrow(cap_iid->law, "leftover"), narrow(cross_iid->law, "leftover")}};
    } else if (cap_iid) {
        const auto& c = std::get<MarkovService>(cross);
        const BasicLaw u = narrow(cap_iid->law, "leftover");
        out = MarkovService{c.p00, c.p11, DifferenceLaw{u, narrow(c.off_law, "leftover")},
                            DifferenceLaw{u, narrow(c.on_law, "leftover")}};
    } else if (cross_iid) {
        const auto& c = std::get<MarkovService>(capacity);
        const BasicLaw y = narrow(cross_iid->law, "leftover");
        out = MarkovService{c.p00, c.p11, DifferenceLaw{narrow(c.off_law, "leftover"), y},
                            DifferenceLaw{narrow(c.on_law, "leftover"), y}};
    } else {
        throw ModelError("leftover: capacity and cross traffic cannot both be Markov-modulated");
    }
    validate(out);
    return out;
}

bool leftover_is_stable(const ServiceModel& capacity, const ServiceModel& cross) {
    return average_rate(cross) < average_rate(capacity);
}

double average_rate(const ServiceModel& model) {
    return std::visit(Overloaded{
                          [](const IidService& m) { return mean(m.law); },
                          [](const MarkovService& m) {
                              const double p = m.on_probability();
                              return (1.0 - p) * mean(m.off_law) + p * mean(m.on_law);
                          },
                      },
                      model);
}

bool is_iid(const ServiceModel& model) { return std::holds_alternative<IidService>(model); }

bool is_nonnegative(const ServiceModel& model) {
    return std::visit(Overloaded{
                          [](const IidService& m) { return is_nonnegative(m.law); },
                          [](const MarkovService& m) { return is_nonnegative(m.off_law) && is_nonnegative(m.on_law); },
                      },
                      model);
}

void validate(const ServiceModel& model, bool require_positive_correlation) {
    std::visit(Overloaded{
                   [](const IidService& m) { validate_law(m.law); },
                   [&](const MarkovService& m) {
                       validate_chain(m.p00, m.p11);
                       validate_law(m.off_law);
                       validate_law(m.on_law);
                       if (require_positive_correlation && !(m.p01() + m.p10() < 1.0)) {
                           throw ModelError("Markov-modulated bounds require p01 + p10 < 1 (got " +
                                            std::to_string(m.p01() + m.p10()) + ")");
                       }
                   },
               },
               model);
}

double log_mgf_increment(const ServiceModel& model, double theta) {
    return std::visit(Overloaded{
                          [&](const IidService& m) { return log_mgf(m.law, theta); },
                          [&](const MarkovService& m) {
                              const double p = m.on_probability();
                              return std::log((1.0 - p) * mgf(m.off_law, theta) + p * mgf(m.on_law, theta));
                          },
                      },
                      model);
}

double mgf_increment(const ServiceModel& model, double theta) { return std::exp(log_mgf_increment(model, theta)); }

double mgf_path(const ServiceModel& model, double theta, std::int64_t t) {
    if (t < 0) throw std::invalid_argument("mgf_path: t must be >= 0");
    if (t == 0) return 1.0;
    if (const auto* iid = std::get_if<IidService>(&model)) {
        return std::exp(static_cast<double>(t) * log_mgf(iid->law, theta));
    }
    const auto& m = std::get<MarkovService>(model);
    const double m0 = mgf(m.off_law, theta);
    const double m1 = mgf(m.on_law, theta);
    if (std::isinf(m0) || std::isinf(m1)) return kInf;
    // Row vector (1-p, p) times L(theta)^t, renormalised each step.
    const double p = m.on_probability();
    double v0 = 1.0 - p;
    double v1 = p;
    double log_scale = 0.0;
    for (std::int64_t k = 0; k < t; ++k) {
        const double n0 = (v0 * m.p00 + v1 * m.p10()) * m0;
        const double n1 = (v0 * m.p01() + v1 * m.p11) * m1;
        const double norm = n0 + n1;
        if (norm == 0.0) return 0.0;
        log_scale += std::log(norm);
        v0 = n0 / norm;
        v1 = n1 / norm;
    }
    return std::exp(log_scale);
}

std::pair<double, double> eigenvalues(const MarkovService& model, double theta) {
    const auto e = eigen_pair(model.p00, model.p11, mgf(model.off_law, theta), mgf(model.on_law, theta));
    return {e.plus, e.minus};
}

double eigen_m_plus(const MarkovService& model, double theta) { return eigenvalues(model, theta).first; }

double k_theta(const MarkovService& model, double theta) {
    const auto [plus, minus] = eigenvalues(model, theta);
    if (!(plus > minus)) throw std::domain_error("k_theta: eigenvalues coincide (degenerate chain)");
    const double p = model.on_probability();
    const double mc = (1.0 - p) * mgf(model.off_law, theta) + p * mgf(model.on_law, theta);
    return (mc - minus) / (plus - minus);
}

double effective_capacity(const ServiceModel& model, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("effective_capacity: theta must be > 0");
    return std::visit(Overloaded{
                          [&](const IidService& m) { return -log_mgf(m.law, -theta) / theta; },
                          [&](const MarkovService& m) { return -std::log(eigen_m_plus(m, -theta)) / theta; },
                      },
                      model);
}

double mmoo_effective_capacity_closed_form(double p00, double p11, double peak, double theta) {
    const double e = std::exp(-theta * peak);
    const double a = p00 + p11 * e;
    return -std::log(0.5 * (a + std::sqrt(a * a - 4.0 * (p00 + p11 - 1.0) * e))) / theta;
}

double log_mgf_clipped_increment(const IidService& model, double theta, double cap) {
    return std::log(mgf_clipped(model.law, theta, cap));
}

double log_m_plus_clipped(const MarkovService& model, double theta, double cap) {
    const auto e = eigen_pair(model.p00, model.p11, mgf_clipped(model.off_law, theta, cap),
                              mgf_clipped(model.on_law, theta, cap));
    return std::log(e.plus);
}

// ---------------------------------------------------------------------------

IncrementStream::IncrementStream(ServiceModel model, std::uint64_t seed) : model_(std::move(model)), rng_(seed) {}

double IncrementStream::next() {
    if (const auto* iid = std::get_if<IidService>(&model_)) return sample(iid->law, rng_);
    const auto& m = std::get<MarkovService>(model_);
    if (!started_) {
        state_ = rng_.bernoulli(m.on_probability()) ? 1 : 0;
        started_ = true;
    } else {
        const double stay = state_ == 1 ? m.p11 : m.p00;
        if (!rng_.bernoulli(stay)) state_ = 1 - state_;
    }
    return sample(state_ == 1 ? m.on_law : m.off_law, rng_);
}

std::vector<double> sample_path(const ServiceModel& model, std::uint64_t seed, std::int64_t horizon) {
    if (horizon < 0) throw std::invalid_argument("sample_path: horizon must be >= 0");
    IncrementStream stream(model, seed);
    std::vector<double> path(static_cast<std::size_t>(horizon));
    for (auto& c : path) c = stream.next();
    return path;
}

Arrivals exponential_arrivals(double mean_rate) {
    Arrivals a{ExponentialLaw{mean_rate}};
    validate_law(a.law);
    return a;
}

Arrivals constant_arrivals(double per_slot) {
    if (!(per_slot >= 0.0)) throw ModelError("constant arrivals must be >= 0");
    return Arrivals{ConstantLaw{per_slot}};
}

double log_mgf_arrivals(const Arrivals& arrivals, double theta) { return log_mgf(arrivals.law, theta); }

// ---------------------------------------------------------------------------

double on_sequence_probability(const MarkovService& model, std::span<const std::int64_t> times) {
    if (times.empty()) return 1.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("on_sequence_probability: times must be strictly increasing");
    }
    const double p = model.on_probability();
    const double mu = model.mu();
    double prob = p;
    for (std::size_t i = 1; i < times.size(); ++i) {
        prob *= p + (1.0 - p) * std::pow(mu, static_cast<double>(times[i] - times[i - 1]));
    }
    return prob;
}

double erlang_quantile(double eps, std::int64_t n, double c) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("erlang_quantile: eps must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("erlang_quantile: n must be >= 1");
    if (!(c > 0.0)) throw std::invalid_argument("erlang_quantile: c must be > 0");
    const double shape = static_cast<double>(n);
    auto excess = [&](double x) { return boost::math::gamma_p(shape, x / c) - eps; };

    double hi = shape * c;
    int expansions = 0;
    while (excess(hi) < 0.0) {
        hi *= 2.0;
        if (++expansions > 200) throw std::runtime_error("erlang_quantile: could not bracket the quantile");
    }
    const double lo = 0.0;
    if (excess(lo) >= 0.0) return 0.0;

    std::uintmax_t max_iter = 500;
    const double abs_tol = 1e-9 * shape * c;
    auto tol = [abs_tol](double a, double b) {
        return std::fabs(b - a) <= std::min(abs_tol, 1e-14 * std::max(std::fabs(a), std::fabs(b)));
    };
    auto [a, b] = boost::math::tools::toms748_solve(excess, lo, hi, tol, max_iter);
    if (max_iter >= 500 || !(std::fabs(b - a) <= abs_tol)) {
        throw std::runtime_error("erlang_quantile: inversion did not converge");
    }
    return 0.5 * (a + b);
}

}  // namespace wfc::models
