#pragma once

// Discrete-time simulation of the window flow control loop: a throttle that
// admits traffic while at most w is in flight, a work-conserving network
// queue, and departure feedback delayed by d slots.
//
// Slot k (k = 0..T-1):
//   1. draw a_k and c_k;
//   2. A'(0,k+1) = min{A(0,k+1), D(0,k+1-d) + w}, with D(0,j) = 0 for j <= 0;
//   3. q(k+1) = max{q(k) + a'_k - max{c_k, 0}, 0};
//   4. D(0,k+1) = A'(0,k+1) - q(k+1).
// Admission precedes service within a slot. Negative (leftover) increments
// serve nothing; their signed sum is tracked separately.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wfc/bounds.hpp"
#include "wfc/models.hpp"

namespace wfc::sim {

struct SimConfig {
    std::uint64_t seed;
    std::int64_t slots;         // T
    std::int64_t warmup;        // slots discarded from statistics
    models::Arrivals arrivals;
    models::ServiceModel service;
    bounds::FeedbackParams params;
    std::int64_t replications = 1;
    std::int64_t checkpoint_every = 0;  // 0 disables checkpoints
    bool record_backlog = false;        // keep B(t), q(t) for every post-warmup slot
};

/// Throws std::invalid_argument on an invalid configuration.
void validate(const SimConfig& config);

/// Seeds of the arrival and service streams of one replication. Disjoint
/// across replications.
struct StreamSeeds {
    std::uint64_t arrivals;
    std::uint64_t service;
};
StreamSeeds replication_seeds(std::uint64_t seed, std::int64_t replication);

struct SimRun {
    // Cumulative processes at t = checkpoint_slots[i].
    std::vector<std::int64_t> checkpoint_slots;
    std::vector<double> arrivals;        // A(0,t)
    std::vector<double> admitted;        // A'(0,t)
    std::vector<double> departures;      // D(0,t)
    std::vector<double> signed_service;  // S(0,t) with increments as drawn

    // B(t) = A(0,t) - D(0,t) and q(t) = A'(0,t) - D(0,t) for t = warmup+1..T,
    // when recorded.
    std::vector<double> backlog;
    std::vector<double> network_backlog;

    double total_arrivals = 0.0;
    double total_departures = 0.0;
    double throughput = 0.0;  // post-warmup departures per slot
    double mean_backlog = 0.0;
    double max_backlog = 0.0;
    double max_network_backlog = 0.0;
    double final_backlog = 0.0;
    std::int64_t measured_slots = 0;  // T - warmup
    double backlog_growth = 0.0;     // B(T) - B(warmup)
    double measured_arrivals = 0.0;  // A(warmup, T)
    /// The largest post-warmup B(t) values, descending.
    std::vector<double> top_backlog;
};

/// One replication. keep_top sets the size of top_backlog. Checks the window
/// law, causality and conservation every slot and throws std::logic_error
/// on a violation.
SimRun run_flow_control(const SimConfig& config, std::int64_t replication = 0, std::size_t keep_top = 0);

/// All replications, run on up to `jobs` threads; results in replication order.
std::vector<SimRun> run_replications(const SimConfig& config, unsigned jobs, std::size_t keep_top = 0);

struct BacklogQuantile {
    double value;             // empirical (1-eps)-quantile of B(t), Mb
    std::int64_t samples;     // pooled post-warmup slots
    bool diverging;           // backlog growing linearly in some replication
    double throughput;        // mean over replications
};

/// Number of largest samples each replication must keep for
/// pooled_backlog_quantile at this eps.
std::size_t quantile_keep(const SimConfig& config, double eps);

/// Pooled over post-warmup slots of all replications. Throws
/// std::invalid_argument unless eps * samples >= 100.
BacklogQuantile backlog_quantile(const SimConfig& config, double eps, unsigned jobs);

/// Same, from replications that kept at least quantile_keep() top values.
BacklogQuantile pooled_backlog_quantile(std::span<const SimRun> runs, double eps);

// --- Equivalent-service sampling ----------------------------------------------

/// S_win(0, t) for each t in ts on n_paths independent service paths:
/// result[j][i] belongs to ts[j] and path i. Path i depends only on (seed, i).
std::vector<std::vector<double>> sample_swin(const models::ServiceModel& model, const bounds::FeedbackParams& params,
                                             std::span<const std::int64_t> ts, std::int64_t n_paths,
                                             std::uint64_t seed, unsigned jobs);

struct MgfEstimate {
    double mean;
    double stderr_;
};

/// Sample mean and standard error of e^{-theta x}.
MgfEstimate empirical_mgf(std::span<const double> samples, double theta);

MgfEstimate empirical_swin_mgf(const models::ServiceModel& model, const bounds::FeedbackParams& params, double theta,
                               std::int64_t t, std::int64_t n_paths, std::uint64_t seed, unsigned jobs = 1);

/// Fraction of samples with x <= threshold.
double violation_frequency(std::span<const double> samples, double threshold);

}  // namespace wfc::sim
