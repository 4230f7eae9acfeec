#pragma once

// Arrival and service models.
//
// Units: megabits (Mb) and slots. theta is per Mb. A service model describes
// the per-slot available service c_k; the service process is
// S(s,t) = sum_{k=s}^{t-1} c_k.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "wfc/rng.hpp"

namespace wfc::models {

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Per-slot increment laws

struct ConstantLaw {
    double value;
};

struct ExponentialLaw {
    double mean;
};

using BasicLaw = std::variant<ConstantLaw, ExponentialLaw>;

/// capacity - cross, with the two parts independent. May be negative.
struct DifferenceLaw {
    BasicLaw capacity;
    BasicLaw cross;
};

using IncrementLaw = std::variant<ConstantLaw, ExponentialLaw, DifferenceLaw>;

double mean(const IncrementLaw& law);
/// log E[e^{theta X}]; +inf where the expectation diverges.
double log_mgf(const IncrementLaw& law, double theta);
/// E[e^{theta X}]; +inf where divergent.
double mgf(const IncrementLaw& law, double theta);
/// E[e^{-theta min(X, cap)}] for theta > 0.
double mgf_clipped(const IncrementLaw& law, double theta, double cap);
/// true when X >= 0 almost surely.
bool is_nonnegative(const IncrementLaw& law);
double sample(const IncrementLaw& law, Rng& rng);

// ---------------------------------------------------------------------------
// Service models

/// i.i.d. per-slot service (deterministic, exponential VBR, i.i.d. leftover).
struct IidService {
    IncrementLaw law;
};

/// Two-state Markov-modulated service: in state i the increment is drawn
/// i.i.d. from state_law[i]. State 1 is "ON". The chain starts in steady state.
struct MarkovService {
    double p00;
    double p11;
    IncrementLaw off_law;
    IncrementLaw on_law;

    double p01() const { return 1.0 - p00; }
    double p10() const { return 1.0 - p11; }
    /// Steady-state ON probability p01 / (p01 + p10).
    double on_probability() const { return p01() / (p01() + p10()); }
    /// Non-trivial eigenvalue of the transition matrix, 1 - p01 - p10.
    double mu() const { return 1.0 - p01() - p10(); }
};

using ServiceModel = std::variant<IidService, MarkovService>;

ServiceModel deterministic(double capacity);
ServiceModel exponential_vbr(double mean_capacity);
/// On-Off: state 0 serves nothing, state 1 serves `peak` per slot.
ServiceModel mmoo(double p00, double p11, double peak);
ServiceModel markov_modulated(double p00, double p11, IncrementLaw off_law, IncrementLaw on_law);

/// Leftover service: capacity minus higher-priority cross traffic, with the
/// cross traffic given either i.i.d. (IidService) or Markov-modulated
/// (MarkovService). Increments may be negative. At most one of the two
/// arguments may be Markov-modulated.
ServiceModel leftover(const ServiceModel& capacity, const ServiceModel& cross);

/// E[cross] < E[capacity].
bool leftover_is_stable(const ServiceModel& capacity, const ServiceModel& cross);

double average_rate(const ServiceModel& model);
bool is_iid(const ServiceModel& model);
bool is_nonnegative(const ServiceModel& model);

/// Validates parameters; throws ModelError. For Markov models additionally
/// enforces p01 + p10 < 1 when `require_positive_correlation` is set.
void validate(const ServiceModel& model, bool require_positive_correlation = false);

/// Per-slot log-MGF log E[e^{theta c_k}] (steady-state marginal for Markov).
double log_mgf_increment(const ServiceModel& model, double theta);
double mgf_increment(const ServiceModel& model, double theta);

/// Exact E[e^{theta S(0,t)}].
double mgf_path(const ServiceModel& model, double theta, std::int64_t t);

/// Eigenvalues (m_plus, m_minus) of L(theta) = P diag(M_{c^0}(theta), M_{c^1}(theta)).
std::pair<double, double> eigenvalues(const MarkovService& model, double theta);
double eigen_m_plus(const MarkovService& model, double theta);

/// K(theta) with M_S(theta,0,t) = K m_+^t + (1-K) m_-^t.
double k_theta(const MarkovService& model, double theta);

/// gamma_S(-theta) for theta > 0.
double effective_capacity(const ServiceModel& model, double theta);

/// Effective capacity of the On-Off chain, closed form of the larger eigenvalue.
double mmoo_effective_capacity_closed_form(double p00, double p11, double peak, double theta);

// The two functions below describe the process with every increment replaced
// by min(c_k, cap), which is the d' = 1, w' = w/d lower-bound process.

/// log E[e^{-theta min(c_k, cap)}], theta > 0.
double log_mgf_clipped_increment(const IidService& model, double theta, double cap);

/// log m_+(-theta) for the chain whose state increments are clipped at cap.
double log_m_plus_clipped(const MarkovService& model, double theta, double cap);

// ---------------------------------------------------------------------------
// Sampling

/// Streams increments c_0, c_1, ... deterministically from a seed.
class IncrementStream {
public:
    IncrementStream(ServiceModel model, std::uint64_t seed);

    double next();
    /// State of the modulating chain for the most recently drawn increment
    /// (always 1 for i.i.d. models).
    int state() const noexcept { return state_; }

private:
    ServiceModel model_;
    Rng rng_;
    int state_ = 1;
    bool started_ = false;
};

std::vector<double> sample_path(const ServiceModel& model, std::uint64_t seed, std::int64_t horizon);

/// Streams i.i.d. arrivals a_k.
struct Arrivals {
    IncrementLaw law;
};

Arrivals exponential_arrivals(double mean_rate);
Arrivals constant_arrivals(double per_slot);
double log_mgf_arrivals(const Arrivals& arrivals, double theta);

// ---------------------------------------------------------------------------
// Markov-chain structure and quantiles

/// P(ON at every listed time) = p * prod (p + (1-p) mu^{gap}). Throws for a
/// time list that is not strictly increasing.
double on_sequence_probability(const MarkovService& model, std::span<const std::int64_t> times);

/// x with P(Gamma(shape n, scale c) <= x) = eps, i.e. the eps-quantile of the
/// sum of n exponential increments with mean c. Throws std::runtime_error if
/// the root finder does not converge.
double erlang_quantile(double eps, std::int64_t n, double c);

}  // namespace wfc::models
