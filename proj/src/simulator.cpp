#include "wfc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

#include "wfc/oracle.hpp"
#include "wfc/parallel.hpp"
#include "wfc/rng.hpp"

namespace wfc::sim {

namespace {

constexpr std::uint64_t kArrivalStream = 0xA11;
constexpr std::uint64_t kServiceStream = 0x5E7;
constexpr std::uint64_t kPathStream = 0x9A7;

[[noreturn]] void violation(const char* what, std::int64_t slot) {
    throw std::logic_error(std::string("simulator invariant violated: ") + what + " at slot " + std::to_string(slot));
}

}  // namespace

void validate(const SimConfig& config) {
    if (config.slots < 1) throw std::invalid_argument("simulation: slots must be >= 1");
    if (config.warmup < 0 || config.warmup >= config.slots)
        throw std::invalid_argument("simulation: warmup must satisfy 0 <= warmup < slots");
    if (config.replications < 1) throw std::invalid_argument("simulation: replications must be >= 1");
    if (config.checkpoint_every < 0) throw std::invalid_argument("simulation: checkpoint_every must be >= 0");
    models::validate(config.service);
}

StreamSeeds replication_seeds(std::uint64_t seed, std::int64_t replication) {
    const auto r = static_cast<std::uint64_t>(replication);
    return {substream_seed(seed, kArrivalStream, r), substream_seed(seed, kServiceStream, r)};
}

SimRun run_flow_control(const SimConfig& config, std::int64_t replication, std::size_t keep_top) {
    validate(config);
    const StreamSeeds seeds = replication_seeds(config.seed, replication);
    Rng arrival_rng(seeds.arrivals);
    models::IncrementStream service(config.service, seeds.service);

    const std::int64_t d = config.params.delay();
    const double w = config.params.window();
    std::vector<double> dep_ring(static_cast<std::size_t>(d + 1), 0.0);  // D(0,j) at j mod (d+1)

    SimRun run;
    double a_cum = 0.0, admitted = 0.0, dep = 0.0, q = 0.0, signed_sum = 0.0;
    double dep_at_warmup = 0.0, arr_at_warmup = 0.0, backlog_at_warmup = 0.0;
    double backlog_sum = 0.0;
    std::priority_queue<double, std::vector<double>, std::greater<>> top;

    if (config.record_backlog) {
        run.backlog.reserve(static_cast<std::size_t>(config.slots - config.warmup));
        run.network_backlog.reserve(static_cast<std::size_t>(config.slots - config.warmup));
    }
    auto checkpoint = [&](std::int64_t t) {
        run.checkpoint_slots.push_back(t);
        run.arrivals.push_back(a_cum);
        run.admitted.push_back(admitted);
        run.departures.push_back(dep);
        run.signed_service.push_back(signed_sum);
    };
    if (config.checkpoint_every > 0) checkpoint(0);

    for (std::int64_t k = 0; k < config.slots; ++k) {
        const double a = models::sample(config.arrivals.law, arrival_rng);
        const double c = service.next();

        a_cum += a;
        const std::int64_t lag = k + 1 - d;
        const double feedback = lag <= 0 ? 0.0 : dep_ring[static_cast<std::size_t>(lag % (d + 1))];
        const double next_admitted = std::min(a_cum, feedback + w);
        if (next_admitted < admitted) violation("admitted traffic decreased", k);
        const double a_admitted = next_admitted - admitted;
        admitted = next_admitted;

        q = std::max(q + a_admitted - std::max(c, 0.0), 0.0);
        signed_sum += c;
        const double next_dep = admitted - q;
        const double tol = 1e-9 * std::max(1.0, admitted);
        if (next_dep < dep - tol) violation("departures decreased", k);
        if (next_dep > admitted) violation("departures exceed admitted traffic", k);
        if (admitted > a_cum) violation("throttle created traffic", k);
        if (admitted > feedback + w) violation("window exceeded", k);
        dep = next_dep;
        dep_ring[static_cast<std::size_t>((k + 1) % (d + 1))] = dep;

        const std::int64_t t = k + 1;
        const double backlog = a_cum - dep;
        if (backlog < -tol) violation("negative backlog", k);
        if (t == config.warmup) {
            dep_at_warmup = dep;
            arr_at_warmup = a_cum;
            backlog_at_warmup = backlog;
        }
        if (t > config.warmup) {
            backlog_sum += backlog;
            run.max_backlog = std::max(run.max_backlog, backlog);
            run.max_network_backlog = std::max(run.max_network_backlog, q);
            if (config.record_backlog) {
                run.backlog.push_back(backlog);
                run.network_backlog.push_back(q);
            }
            if (keep_top > 0) {
                if (top.size() < keep_top) {
                    top.push(backlog);
                } else if (backlog > top.top()) {
                    top.pop();
                    top.push(backlog);
                }
            }
        }
        if (config.checkpoint_every > 0 && t % config.checkpoint_every == 0) checkpoint(t);
    }

    const auto measured = static_cast<double>(config.slots - config.warmup);
    run.total_arrivals = a_cum;
    run.total_departures = dep;
    run.throughput = (dep - dep_at_warmup) / measured;
    run.mean_backlog = backlog_sum / measured;
    run.final_backlog = a_cum - dep;
    run.top_backlog.reserve(top.size());
    while (!top.empty()) {
        run.top_backlog.push_back(top.top());
        top.pop();
    }
    std::reverse(run.top_backlog.begin(), run.top_backlog.end());
    run.measured_slots = config.slots - config.warmup;
    run.backlog_growth = run.final_backlog - backlog_at_warmup;
    run.measured_arrivals = a_cum - arr_at_warmup;
    return run;
}

std::vector<SimRun> run_replications(const SimConfig& config, unsigned jobs, std::size_t keep_top) {
    validate(config);
    std::vector<SimRun> runs(static_cast<std::size_t>(config.replications));
    parallel_for(runs.size(), jobs, [&](std::size_t r) {
        runs[r] = run_flow_control(config, static_cast<std::int64_t>(r), keep_top);
    });
    return runs;
}

namespace {

std::int64_t check_estimable(std::int64_t samples, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("backlog quantile: eps must be in (0, 1)");
    if (eps * static_cast<double>(samples) < 100.0) {
        throw std::invalid_argument("backlog quantile: eps * samples = " +
                                    std::to_string(eps * static_cast<double>(samples)) +
                                    " < 100; the quantile is not estimable");
    }
    return samples;
}

// The (1-eps)-quantile is the value with floor(eps N) samples above it.
std::size_t quantile_rank(std::int64_t samples, double eps) {
    return static_cast<std::size_t>(std::floor(eps * static_cast<double>(samples)));
}

}  // namespace

std::size_t quantile_keep(const SimConfig& config, double eps) {
    const std::int64_t samples = check_estimable((config.slots - config.warmup) * config.replications, eps);
    return quantile_rank(samples, eps) + 1;
}

BacklogQuantile pooled_backlog_quantile(std::span<const SimRun> runs, double eps) {
    if (runs.empty()) throw std::invalid_argument("backlog quantile: no replications");
    std::int64_t samples = 0;
    for (const auto& run : runs) samples += run.measured_slots;
    check_estimable(samples, eps);
    const std::size_t rank = quantile_rank(samples, eps);

    std::vector<double> merged;
    BacklogQuantile result{0.0, samples, false, 0.0};
    for (const auto& run : runs) {
        if (run.top_backlog.size() < std::min<std::size_t>(rank + 1, static_cast<std::size_t>(run.measured_slots))) {
            throw std::invalid_argument("backlog quantile: replications kept too few samples");
        }
        merged.insert(merged.end(), run.top_backlog.begin(), run.top_backlog.end());
        result.throughput += run.throughput / static_cast<double>(runs.size());
        // A stable queue leaves a vanishing fraction of the measured arrivals behind.
        if (run.measured_arrivals > 0.0 && run.backlog_growth > 0.05 * run.measured_arrivals) result.diverging = true;
    }
    std::sort(merged.begin(), merged.end(), std::greater<>());
    result.value = merged[rank];
    return result;
}

BacklogQuantile backlog_quantile(const SimConfig& config, double eps, unsigned jobs) {
    validate(config);
    const auto runs = run_replications(config, jobs, quantile_keep(config, eps));
    return pooled_backlog_quantile(runs, eps);
}

std::vector<std::vector<double>> sample_swin(const models::ServiceModel& model, const bounds::FeedbackParams& params,
                                             std::span<const std::int64_t> ts, std::int64_t n_paths,
                                             std::uint64_t seed, unsigned jobs) {
    if (n_paths < 1) throw std::invalid_argument("sample_swin: n_paths must be >= 1");
    std::int64_t horizon = 0;
    for (const auto t : ts) {
        if (t < 0) throw std::invalid_argument("sample_swin: negative t");
        horizon = std::max(horizon, t);
    }
    std::vector<std::vector<double>> out(ts.size(), std::vector<double>(static_cast<std::size_t>(n_paths)));
    constexpr std::size_t kBatch = 1024;
    const auto n = static_cast<std::size_t>(n_paths);
    parallel_for((n + kBatch - 1) / kBatch, jobs, [&](std::size_t b) {
        for (std::size_t i = b * kBatch; i < std::min(n, (b + 1) * kBatch); ++i) {
            const oracle::SamplePath path(models::sample_path(model, substream_seed(seed, kPathStream, i), horizon));
            const auto row = oracle::swin_row(path, params, 0);
            for (std::size_t j = 0; j < ts.size(); ++j) out[j][i] = row[static_cast<std::size_t>(ts[j])];
        }
    });
    return out;
}

MgfEstimate empirical_mgf(std::span<const double> samples, double theta) {
    if (samples.empty()) throw std::invalid_argument("empirical_mgf: no samples");
    // Welford's running mean and squared deviation.
    double mean = 0.0, m2 = 0.0, count = 0.0;
    for (const double x : samples) {
        const double v = std::exp(-theta * x);
        count += 1.0;
        const double delta = v - mean;
        mean += delta / count;
        m2 += delta * (v - mean);
    }
    if (samples.size() < 2) return {mean, 0.0};
    return {mean, std::sqrt(m2 / (count - 1.0) / count)};
}

MgfEstimate empirical_swin_mgf(const models::ServiceModel& model, const bounds::FeedbackParams& params, double theta,
                               std::int64_t t, std::int64_t n_paths, std::uint64_t seed, unsigned jobs) {
    const std::int64_t ts[] = {t};
    const auto samples = sample_swin(model, params, ts, n_paths, seed, jobs);
    return empirical_mgf(samples[0], theta);
}

double violation_frequency(std::span<const double> samples, double threshold) {
    if (samples.empty()) throw std::invalid_argument("violation_frequency: no samples");
    const auto hits = std::count_if(samples.begin(), samples.end(), [&](double x) { return x <= threshold; });
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace wfc::sim
