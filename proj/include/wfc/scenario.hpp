#pragma once

// Resolution of configuration sections into runnable scenarios, and the
// computations behind the CLI verbs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfc/bounds.hpp"
#include "wfc/config.hpp"
#include "wfc/csv.hpp"
#include "wfc/models.hpp"

namespace wfc::scenario {

enum class Command { ServiceCurve, EffectiveCapacity, Backlog, Simulate };

std::string_view command_name(Command command);
/// Throws std::invalid_argument for an unknown verb.
Command parse_command(std::string_view verb);

struct FeedbackCase {
    double delay_ms;
    double window_mb;
    bounds::FeedbackParams params;
};

enum class ArrivalKind { Exponential, Constant };

struct Scenario {
    std::string name;
    Command command;
    double slot_ms;
    std::uint64_t seed;

    std::string service_kind;  // deterministic | vbr | mmoo | markov
    bool leftover = false;
    models::ServiceModel service;

    std::vector<FeedbackCase> feedback;
    std::vector<double> eps;

    std::int64_t horizon = 0;          // service-curve, slots
    std::vector<double> thetas;        // effective-capacity, per Mb

    ArrivalKind arrival_kind = ArrivalKind::Exponential;
    std::vector<double> lambdas;       // Mb per slot
    bool simulate = false;             // backlog: add simulated quantiles
    std::int64_t sim_slots = 1000000;
    std::int64_t sim_warmup = 10000;
    std::int64_t sim_replications = 20;
    std::int64_t checkpoint_every = 0;  // simulate: trace sampling, slots
};

/// Throws config::ConfigError with the offending line.
Scenario resolve(const config::Section& section, Command command, std::optional<std::uint64_t> seed_override = {});

models::Arrivals make_arrivals(ArrivalKind kind, double rate);

struct Output {
    std::string file_name;
    csv::Table table;
};

csv::Table service_curve_table(const Scenario& s, unsigned jobs);
csv::Table effective_capacity_table(const Scenario& s, unsigned jobs);
csv::Table backlog_table(const Scenario& s, unsigned jobs);
std::vector<Output> simulate_outputs(const Scenario& s, unsigned jobs);

/// Every output of the scenario's command, named after the scenario.
std::vector<Output> run(const Scenario& s, unsigned jobs);

// --- Canned figure scenarios --------------------------------------------------

/// fig4 .. fig8.
std::vector<std::string> figure_names();
Command figure_command(std::string_view figure);
/// Config text of a canned figure scenario; identical to configs/<figure>.conf.
std::string_view figure_config(std::string_view figure);

}  // namespace wfc::scenario
