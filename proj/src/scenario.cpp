#include "wfc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "wfc/parallel.hpp"
#include "wfc/simulator.hpp"
#include "wfc/units.hpp"

namespace wfc::scenario {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using csv::format_number;

const std::vector<std::string> kCommonKeys = {
    "slot_ms",           "seed",        "service",    "service_rate_Mbps", "service_p00", "service_p11",
    "service_peak_Mbps", "service_off", "service_on", "cross",             "delay_ms",    "window_Mb",
    "window_rate_Mbps"};

std::vector<std::string> allowed_keys(Command command) {
    std::vector<std::string> keys = kCommonKeys;
    auto add = [&](std::initializer_list<const char*> more) { keys.insert(keys.end(), more.begin(), more.end()); };
    switch (command) {
        case Command::ServiceCurve: add({"eps", "horizon_ms"}); break;
        case Command::EffectiveCapacity: add({"theta_min_per_bit", "theta_max_per_bit", "theta_points"}); break;
        case Command::Backlog:
            add({"eps", "arrivals", "lambda_Mbps", "simulate", "sim_slots", "sim_warmup", "sim_replications"});
            break;
        case Command::Simulate:
            add({"eps", "arrivals", "lambda_Mbps", "sim_slots", "sim_warmup", "sim_replications", "checkpoint_ms"});
            break;
    }
    return keys;
}

// "exp:<Mbps>" or "const:<Mbps>".
models::IncrementLaw parse_law(const config::Section& sec, const std::string& key, const std::string& text,
                               double slot_ms) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const auto rate = colon == std::string::npos ? std::nullopt : config::parse_double(text.substr(colon + 1));
    if (!rate) sec.fail(key, "'" + key + "' must look like exp:<Mbps> or const:<Mbps>, got '" + text + "'");
    const double per_slot = units::mbps_to_mb_per_slot(*rate, slot_ms);
    if (kind == "exp") {
        if (!(per_slot > 0.0)) sec.fail(key, "'" + key + "' exponential rate must be > 0");
        return models::ExponentialLaw{per_slot};
    }
    if (kind == "const") {
        if (!(per_slot >= 0.0)) sec.fail(key, "'" + key + "' constant rate must be >= 0");
        return models::ConstantLaw{per_slot};
    }
    sec.fail(key, "'" + key + "' law must be exp or const, got '" + kind + "'");
}

double probability(const config::Section& sec, const std::string& key) {
    const double p = sec.get_double(key);
    if (!(p >= 0.0 && p <= 1.0)) sec.fail(key, "'" + key + "' must lie in [0, 1]");
    return p;
}

models::ServiceModel resolve_service(const config::Section& sec, Scenario& s) {
    s.service_kind = sec.get_string("service");
    models::ServiceModel base;
    try {
        if (s.service_kind == "deterministic") {
            base = models::deterministic(units::mbps_to_mb_per_slot(sec.get_double("service_rate_Mbps"), s.slot_ms));
        } else if (s.service_kind == "vbr") {
            base = models::exponential_vbr(units::mbps_to_mb_per_slot(sec.get_double("service_rate_Mbps"), s.slot_ms));
        } else if (s.service_kind == "mmoo") {
            base = models::mmoo(probability(sec, "service_p00"), probability(sec, "service_p11"),
                                units::mbps_to_mb_per_slot(sec.get_double("service_peak_Mbps"), s.slot_ms));
        } else if (s.service_kind == "markov") {
            base = models::markov_modulated(
                probability(sec, "service_p00"), probability(sec, "service_p11"),
                parse_law(sec, "service_off", sec.get_string("service_off"), s.slot_ms),
                parse_law(sec, "service_on", sec.get_string("service_on"), s.slot_ms));
        } else {
            sec.fail("service", "'service' must be deterministic, vbr, mmoo or markov, got '" + s.service_kind + "'");
        }
    } catch (const models::ModelError& e) {
        sec.fail("service", e.what());
    }

    const std::string cross = sec.find_string("cross").value_or("none");
    if (cross == "none") return base;
    models::ServiceModel cross_model;
    try {
        if (cross.rfind("mmoo:", 0) == 0) {
            const auto parts = sec.get_string_list("cross", ':');
            if (parts.size() != 4) sec.fail("cross", "'cross' must look like mmoo:<p00>:<p11>:<peak_Mbps>");
            const auto p00 = config::parse_double(parts[1]);
            const auto p11 = config::parse_double(parts[2]);
            const auto peak = config::parse_double(parts[3]);
            if (!p00 || !p11 || !peak) sec.fail("cross", "'cross' mmoo parameters must be numbers");
            cross_model = models::mmoo(*p00, *p11, units::mbps_to_mb_per_slot(*peak, s.slot_ms));
        } else {
            cross_model = models::IidService{parse_law(sec, "cross", cross, s.slot_ms)};
        }
        if (!models::leftover_is_stable(base, cross_model)) {
            sec.fail("cross", "cross traffic mean must be below the service mean");
        }
        s.leftover = true;
        return models::leftover(base, cross_model);
    } catch (const models::ModelError& e) {
        sec.fail("cross", e.what());
    }
}

std::vector<FeedbackCase> resolve_feedback(const config::Section& sec, double slot_ms) {
    const bool by_window = sec.has("window_Mb");
    const bool by_rate = sec.has("window_rate_Mbps");
    if (by_window == by_rate) sec.fail("", "exactly one of 'window_Mb' and 'window_rate_Mbps' must be set");
    const auto delays = sec.get_double_list("delay_ms");
    const auto windows = sec.get_double_list(by_window ? "window_Mb" : "window_rate_Mbps");
    std::vector<FeedbackCase> out;
    for (const double d_ms : delays) {
        std::int64_t d = 0;
        try {
            d = units::ms_to_slots(d_ms, slot_ms);
        } catch (const std::invalid_argument& e) {
            sec.fail("delay_ms", e.what());
        }
        if (d < 1) sec.fail("delay_ms", "'delay_ms' must be at least one slot");
        for (const double x : windows) {
            const double w = by_window ? x : units::mbps_to_mb_per_slot(x, slot_ms) * static_cast<double>(d);
            if (!(w > 0.0) || !std::isfinite(w)) sec.fail(by_window ? "window_Mb" : "window_rate_Mbps", "window must be > 0");
            out.push_back({d_ms, w, bounds::FeedbackParams(w, d)});
        }
    }
    return out;
}

std::vector<double> resolve_eps(const config::Section& sec) {
    auto eps = sec.get_double_list("eps");
    for (const double e : eps)
        if (!(e > 0.0 && e < 1.0)) sec.fail("eps", "'eps' values must lie in (0, 1)");
    return eps;
}

std::int64_t positive_int(const config::Section& sec, const std::string& key, std::int64_t fallback) {
    const auto v = sec.find_int(key);
    if (v && *v < 1) sec.fail(key, "'" + key + "' must be >= 1");
    return v.value_or(fallback);
}

void resolve_traffic(const config::Section& sec, Scenario& s) {
    const std::string kind = sec.get_string("arrivals");
    if (kind == "exp") {
        s.arrival_kind = ArrivalKind::Exponential;
    } else if (kind == "const") {
        s.arrival_kind = ArrivalKind::Constant;
    } else {
        sec.fail("arrivals", "'arrivals' must be exp or const, got '" + kind + "'");
    }
    for (const double mbps : sec.get_double_list("lambda_Mbps")) {
        const double rate = units::mbps_to_mb_per_slot(mbps, s.slot_ms);
        if (!(rate >= 0.0) || (s.arrival_kind == ArrivalKind::Exponential && !(rate > 0.0)))
            sec.fail("lambda_Mbps", "'lambda_Mbps' values must be positive");
        s.lambdas.push_back(rate);
    }
    s.sim_slots = positive_int(sec, "sim_slots", s.sim_slots);
    s.sim_warmup = sec.find_int("sim_warmup").value_or(s.sim_warmup);
    if (s.sim_warmup < 0 || s.sim_warmup >= s.sim_slots) sec.fail("sim_warmup", "need 0 <= sim_warmup < sim_slots");
    s.sim_replications = positive_int(sec, "sim_replications", s.sim_replications);
}

std::string label_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string_view command_name(Command command) {
    switch (command) {
        case Command::ServiceCurve: return "service-curve";
        case Command::EffectiveCapacity: return "effective-capacity";
        case Command::Backlog: return "backlog";
        case Command::Simulate: return "simulate";
    }
    return "";
}

Command parse_command(std::string_view verb) {
    for (const auto c : {Command::ServiceCurve, Command::EffectiveCapacity, Command::Backlog, Command::Simulate})
        if (command_name(c) == verb) return c;
    throw std::invalid_argument("unknown command '" + std::string(verb) + "'");
}

models::Arrivals make_arrivals(ArrivalKind kind, double rate) {
    if (kind == ArrivalKind::Constant || rate == 0.0) return models::constant_arrivals(rate);
    return models::exponential_arrivals(rate);
}

Scenario resolve(const config::Section& sec, Command command, std::optional<std::uint64_t> seed_override) {
    sec.check_keys(allowed_keys(command), std::string(command_name(command)));
    Scenario s;
    s.name = sec.name();
    s.command = command;
    s.slot_ms = sec.find_double("slot_ms").value_or(units::kDefaultSlotMs);
    if (!(s.slot_ms > 0.0)) sec.fail("slot_ms", "'slot_ms' must be > 0");
    if (seed_override) {
        s.seed = *seed_override;
    } else {
        const auto seed = sec.get_int("seed");
        if (seed < 0) sec.fail("seed", "'seed' must be >= 0");
        s.seed = static_cast<std::uint64_t>(seed);
    }
    s.service = resolve_service(sec, s);
    s.feedback = resolve_feedback(sec, s.slot_ms);

    switch (command) {
        case Command::ServiceCurve: {
            s.eps = resolve_eps(sec);
            try {
                s.horizon = units::ms_to_slots(sec.get_double("horizon_ms"), s.slot_ms);
            } catch (const std::invalid_argument& e) {
                sec.fail("horizon_ms", e.what());
            }
            if (s.horizon < 0) sec.fail("horizon_ms", "'horizon_ms' must be >= 0");
            break;
        }
        case Command::EffectiveCapacity: {
            const double lo = sec.get_double("theta_min_per_bit");
            const double hi = sec.get_double("theta_max_per_bit");
            const auto n = sec.get_int("theta_points");
            if (!(lo > 0.0) || !(hi > lo) || n < 2) {
                sec.fail("theta_min_per_bit", "need 0 < theta_min_per_bit < theta_max_per_bit and theta_points >= 2");
            }
            const ThetaGrid grid(units::theta_per_bit_to_per_mb(lo), units::theta_per_bit_to_per_mb(hi),
                                 static_cast<std::size_t>(n));
            s.thetas = grid.values();
            break;
        }
        case Command::Backlog: {
            s.eps = resolve_eps(sec);
            resolve_traffic(sec, s);
            s.simulate = sec.has("simulate") && sec.get_bool("simulate");
            break;
        }
        case Command::Simulate: {
            if (sec.has("eps")) s.eps = resolve_eps(sec);
            resolve_traffic(sec, s);
            if (sec.has("checkpoint_ms")) {
                try {
                    s.checkpoint_every = units::ms_to_slots(sec.get_double("checkpoint_ms"), s.slot_ms);
                } catch (const std::invalid_argument& e) {
                    sec.fail("checkpoint_ms", e.what());
                }
                if (s.checkpoint_every < 1) sec.fail("checkpoint_ms", "'checkpoint_ms' must be at least one slot");
            }
            break;
        }
    }
    return s;
}

// --- service-curve ------------------------------------------------------------

namespace {

// Quantile term of the a-priori upper bound: the eps-quantile of S(0,t)
// where it is known in closed form, NaN otherwise.
double open_loop_quantile(const Scenario& s, double eps, std::int64_t t) {
    if (s.leftover) return kNaN;
    const auto* iid = std::get_if<models::IidService>(&s.service);
    if (iid == nullptr) return kNaN;
    if (t == 0) return 0.0;
    if (const auto* c = std::get_if<models::ConstantLaw>(&iid->law)) return c->value * static_cast<double>(t);
    if (const auto* e = std::get_if<models::ExponentialLaw>(&iid->law)) return models::erlang_quantile(eps, t, e->mean);
    return kNaN;
}

}  // namespace

csv::Table service_curve_table(const Scenario& s, unsigned jobs) {
    csv::Table table{{"t_ms", "d_ms", "w_Mb", "eps", "curve_Mb", "theta_opt_per_bit", "family", "feasible",
                      "theorem_Mb", "apriori_lower_Mb", "apriori_upper_Mb", "upper_window_term_Mb",
                      "upper_quantile_term_Mb"},
                     {}};
    const ThetaGrid grid = ThetaGrid::standard();
    std::vector<std::vector<std::vector<std::string>>> blocks(s.feedback.size());
    parallel_for(s.feedback.size(), jobs, [&](std::size_t i) {
        const auto& fc = s.feedback[i];
        const auto product = bounds::product_bound(s.service, fc.params);
        const auto apriori = bounds::apriori_bound(s.service, fc.params);
        for (const double eps : s.eps) {
            for (std::int64_t t = 0; t <= s.horizon; ++t) {
                const auto p = bounds::service_curve_point(product, eps, grid, t);
                const auto a = bounds::service_curve_point(apriori, eps, grid, t);
                // Both MGF bounds are valid, so the larger curve is too; it
                // equals the curve of their pointwise-minimum MGF.
                const bool use_product = p.feasible && (!a.feasible || p.value > a.value);
                const auto& best = use_product ? p : a;
                const std::int64_t windows = (t + fc.params.delay() - 1) / fc.params.delay();
                const double window_term = static_cast<double>(windows) * fc.params.window();
                const double quantile_term = open_loop_quantile(s, eps, t);
                const double upper = std::isnan(quantile_term) ? window_term : std::min(window_term, quantile_term);
                blocks[i].push_back({format_number(units::slots_to_ms(t, s.slot_ms)), format_number(fc.delay_ms),
                                     format_number(fc.window_mb), format_number(eps), format_number(best.value),
                                     format_number(units::theta_per_mb_to_per_bit(best.theta)), best.family,
                                     label_bool(best.feasible), format_number(p.value), format_number(a.value),
                                     format_number(upper), format_number(window_term), format_number(quantile_term)});
            }
        }
    });
    for (auto& b : blocks)
        for (auto& row : b) table.rows.push_back(std::move(row));
    return table;
}

// --- effective-capacity ---------------------------------------------------------

csv::Table effective_capacity_table(const Scenario& s, unsigned jobs) {
    csv::Table table{{"theta", "d_ms", "w_Mb", "cor1a", "cor1b_or_cor3", "apriori_lower", "apriori_upper",
                      "best_lower", "best_family"},
                     {}};
    const bool iid = models::is_iid(s.service);
    const ThetaGrid grid(s.thetas.front(), s.thetas.back(), s.thetas.size());
    std::vector<std::vector<std::vector<std::string>>> blocks(s.feedback.size());
    auto mbps = [&](double x) { return format_number(units::mb_per_slot_to_mbps(x, s.slot_ms)); };
    parallel_for(s.feedback.size(), jobs, [&](std::size_t i) {
        const auto& fc = s.feedback[i];
        const auto best = bounds::best_effcap_lower(s.service, fc.params, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double theta = grid[k];
            std::string cor1a;
            if (iid) {
                if (const auto v = bounds::effcap_lower_cor1a(s.service, fc.params, theta)) cor1a = mbps(*v);
            }
            const auto apriori = bounds::effcap_bounds_apriori(s.service, fc.params, theta);
            blocks[i].push_back({format_number(units::theta_per_mb_to_per_bit(theta)), format_number(fc.delay_ms),
                                 format_number(fc.window_mb), cor1a,
                                 mbps(bounds::effcap_lower_cor1b(s.service, fc.params, theta)), mbps(apriori.lower),
                                 mbps(apriori.upper), mbps(best.points[k].value), best.points[k].family});
        }
    });
    for (auto& b : blocks)
        for (auto& row : b) table.rows.push_back(std::move(row));
    return table;
}

// --- backlog ----------------------------------------------------------------------

namespace {

sim::SimConfig sim_config(const Scenario& s, const FeedbackCase& fc, double lambda) {
    return sim::SimConfig{s.seed,
                          s.sim_slots,
                          s.sim_warmup,
                          make_arrivals(s.arrival_kind, lambda),
                          s.service,
                          fc.params,
                          s.sim_replications,
                          s.checkpoint_every,
                          false};
}

std::size_t keep_for(const sim::SimConfig& cfg, const std::vector<double>& eps) {
    const double samples = static_cast<double>((cfg.slots - cfg.warmup) * cfg.replications);
    std::size_t keep = 0;
    for (const double e : eps)
        if (e * samples >= 100.0) keep = std::max(keep, sim::quantile_keep(cfg, e));
    return keep;
}

}  // namespace

csv::Table backlog_table(const Scenario& s, unsigned jobs) {
    csv::Table table{{"lambda_Mbps", "d_ms", "w_Mb", "eps", "bound_Mb", "theta_opt_per_bit", "bounded",
                      "sim_quantile_Mb", "sim_diverging"},
                     {}};
    const ThetaGrid grid = ThetaGrid::standard();
    const std::size_t items = s.feedback.size() * s.lambdas.size();
    std::vector<std::vector<std::vector<std::string>>> blocks(items);
    parallel_for(items, jobs, [&](std::size_t item) {
        const auto& fc = s.feedback[item / s.lambdas.size()];
        const double lambda = s.lambdas[item % s.lambdas.size()];
        const auto arrivals = make_arrivals(s.arrival_kind, lambda);
        const auto bound = bounds::best_bound(s.service, fc.params);

        std::vector<sim::SimRun> runs;
        if (s.simulate) {
            const auto cfg = sim_config(s, fc, lambda);
            const std::size_t keep = keep_for(cfg, s.eps);
            if (keep > 0) runs = sim::run_replications(cfg, 1, keep);
        }
        for (const double eps : s.eps) {
            const auto b = bounds::backlog_bound_steady(arrivals, bound, eps, grid);
            std::string sim_q, sim_div;
            if (!runs.empty() && eps * static_cast<double>(runs.front().measured_slots * s.sim_replications) >= 100.0) {
                const auto q = sim::pooled_backlog_quantile(runs, eps);
                sim_q = format_number(q.value);
                sim_div = label_bool(q.diverging);
            }
            blocks[item].push_back({format_number(units::mb_per_slot_to_mbps(lambda, s.slot_ms)),
                                    format_number(fc.delay_ms), format_number(fc.window_mb), format_number(eps),
                                    format_number(b.value), format_number(units::theta_per_mb_to_per_bit(b.theta)),
                                    label_bool(b.bounded), sim_q, sim_div});
        }
    });
    for (auto& b : blocks)
        for (auto& row : b) table.rows.push_back(std::move(row));
    return table;
}

// --- simulate -------------------------------------------------------------------------

std::vector<Output> simulate_outputs(const Scenario& s, unsigned jobs) {
    Output summary{s.name + ".csv",
                   {{"lambda_Mbps", "d_ms", "w_Mb", "replication", "throughput_Mbps", "mean_backlog_Mb",
                     "max_backlog_Mb", "max_network_backlog_Mb", "final_backlog_Mb"},
                    {}}};
    Output quantiles{s.name + "_quantiles.csv",
                     {{"lambda_Mbps", "d_ms", "w_Mb", "eps", "quantile_Mb", "samples", "diverging"}, {}}};
    Output trace{s.name + "_trace.csv",
                 {{"lambda_Mbps", "d_ms", "w_Mb", "replication", "t_ms", "A_Mb", "A_admitted_Mb", "D_Mb", "B_Mb",
                   "q_Mb", "S_signed_Mb"},
                  {}}};
    for (const auto& fc : s.feedback) {
        for (const double lambda : s.lambdas) {
            const auto cfg = sim_config(s, fc, lambda);
            const auto runs = sim::run_replications(cfg, jobs, keep_for(cfg, s.eps));
            const std::vector<std::string> key = {format_number(units::mb_per_slot_to_mbps(lambda, s.slot_ms)),
                                                  format_number(fc.delay_ms), format_number(fc.window_mb)};
            auto with_key = [&](std::vector<std::string> rest) {
                std::vector<std::string> row = key;
                row.insert(row.end(), rest.begin(), rest.end());
                return row;
            };
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const auto& run = runs[r];
                summary.table.rows.push_back(with_key(
                    {std::to_string(r), format_number(units::mb_per_slot_to_mbps(run.throughput, s.slot_ms)),
                     format_number(run.mean_backlog), format_number(run.max_backlog),
                     format_number(run.max_network_backlog), format_number(run.final_backlog)}));
                for (std::size_t k = 0; k < run.checkpoint_slots.size(); ++k) {
                    trace.table.rows.push_back(with_key(
                        {std::to_string(r), format_number(units::slots_to_ms(run.checkpoint_slots[k], s.slot_ms)),
                         format_number(run.arrivals[k]), format_number(run.admitted[k]),
                         format_number(run.departures[k]), format_number(run.arrivals[k] - run.departures[k]),
                         format_number(run.admitted[k] - run.departures[k]), format_number(run.signed_service[k])}));
                }
            }
            for (const double eps : s.eps) {
                std::vector<std::string> rest = {format_number(eps), "", "", ""};
                const double samples = static_cast<double>((cfg.slots - cfg.warmup) * cfg.replications);
                if (eps * samples >= 100.0) {
                    const auto q = sim::pooled_backlog_quantile(runs, eps);
                    rest = {format_number(eps), format_number(q.value), std::to_string(q.samples),
                            label_bool(q.diverging)};
                }
                quantiles.table.rows.push_back(with_key(rest));
            }
        }
    }
    std::vector<Output> out{std::move(summary)};
    if (!s.eps.empty()) out.push_back(std::move(quantiles));
    if (s.checkpoint_every > 0) out.push_back(std::move(trace));
    return out;
}

std::vector<Output> run(const Scenario& s, unsigned jobs) {
    switch (s.command) {
        case Command::ServiceCurve: return {{s.name + ".csv", service_curve_table(s, jobs)}};
        case Command::EffectiveCapacity: return {{s.name + ".csv", effective_capacity_table(s, jobs)}};
        case Command::Backlog: return {{s.name + ".csv", backlog_table(s, jobs)}};
        case Command::Simulate: return simulate_outputs(s, jobs);
    }
    return {};
}

}  // namespace wfc::scenario

#include "figures.hpp"

namespace wfc::scenario {

std::vector<std::string> figure_names() { return {"fig4", "fig5", "fig6", "fig7", "fig8"}; }

Command figure_command(std::string_view figure) {
    if (figure == "fig4" || figure == "fig6") return Command::ServiceCurve;
    if (figure == "fig5" || figure == "fig7") return Command::EffectiveCapacity;
    if (figure == "fig8") return Command::Backlog;
    throw std::invalid_argument("unknown figure '" + std::string(figure) + "' (expected fig4..fig8)");
}

std::string_view figure_config(std::string_view figure) {
    figure_command(figure);
    if (figure == "fig4") return generated::kFig4;
    if (figure == "fig5") return generated::kFig5;
    if (figure == "fig6") return generated::kFig6;
    if (figure == "fig7") return generated::kFig7;
    return generated::kFig8;
}

}  // namespace wfc::scenario
