// Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "wfc/algebra.hpp"
#include "wfc/bounds.hpp"
#include "wfc/config.hpp"
#include "wfc/models.hpp"
#include "wfc/oracle.hpp"
#include "wfc/scenario.hpp"
#include "wfc/simulator.hpp"
#include "wfc/units.hpp"

using namespace wfc;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// --- Shared random instances ------------------------------------------------

struct Instance {
    std::vector<double> path;
    std::int64_t delay;
    double window;
    std::string kind;
};

std::vector<Instance> oracle_instances() {
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> horizon(1, 24), pick_d(0, 3), pick_kind(0, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::int64_t delays[] = {1, 2, 3, 5};
    const models::ServiceModel kinds[] = {
        models::exponential_vbr(1.0), models::mmoo(0.2, 0.9, 1.125),
        models::leftover(models::deterministic(1.6), models::exponential_vbr(0.6))};
    const char* names[] = {"exp", "mmoo", "leftover"};
    std::vector<Instance> out;
    for (int i = 0; i < 500; ++i) {
        const int k = pick_kind(gen);
        const auto T = horizon(gen);
        // w in (0, 3C] with C = 1 the mean rate of every kind.
        const double w = 3.0 * (1.0 - unit(gen));
        out.push_back({models::sample_path(kinds[k], gen(), T), delays[pick_d(gen)], w, names[k]});
    }
    return out;
}

// --- 1. dual-oracle equality ---------------------------------------------------

Outcome dual_oracle() {
    double worst = 0.0;
    std::int64_t cells = 0;
    for (const auto& inst : oracle_instances()) {
        const oracle::SamplePath path(inst.path);
        const bounds::FeedbackParams p(inst.window, inst.delay);
        const auto closure = oracle::swin_exact_closure(path, p);
        for (std::int64_t s = 0; s <= path.horizon(); ++s)
            for (std::int64_t t = s; t <= path.horizon(); ++t) {
                worst = std::max(worst, std::abs(oracle::swin_exact_dp(path, p, s, t) - closure(s, t)));
                ++cells;
            }
    }
    return {worst <= 1e-9, "500 instances, " + std::to_string(cells) + " (s,t) pairs, max |dp - closure| = " +
                               fmt("%.3g", worst)};
}

// --- 2. d = 1 exactness -----------------------------------------------------------

Outcome d1_exactness() {
    double worst = 0.0;
    for (const auto& inst : oracle_instances()) {
        const oracle::SamplePath path(inst.path);
        const bounds::FeedbackParams p(inst.window, 1);
        const auto closure = oracle::swin_exact_closure(path, p);
        for (std::int64_t s = 0; s <= path.horizon(); ++s) {
            double clipped = 0.0;
            for (std::int64_t t = s; t <= path.horizon(); ++t) {
                if (t > s) clipped += std::min(inst.path[static_cast<std::size_t>(t - 1)], inst.window);
                worst = std::max(worst, std::abs(oracle::swin_exact_dp(path, p, s, t) - clipped));
                worst = std::max(worst, std::abs(closure(s, t) - clipped));
            }
        }
    }
    return {worst <= 1e-9, "500 paths at d=1, max deviation from sum of min{c_k, w} = " + fmt("%.3g", worst)};
}

// --- 3. sandwich -------------------------------------------------------------------

Outcome sandwich() {
    std::int64_t violations = 0, cells = 0;
    for (const auto& inst : oracle_instances()) {
        const oracle::SamplePath path(inst.path);
        const bounds::FeedbackParams p(inst.window, inst.delay);
        const double cap = inst.window / static_cast<double>(inst.delay);
        for (std::int64_t s = 0; s <= path.horizon(); ++s) {
            const auto row = oracle::swin_row(path, p, s);
            double lower = 0.0, service = 0.0;
            for (std::int64_t t = s; t <= path.horizon(); ++t) {
                if (t > s) {
                    lower += std::min(inst.path[static_cast<std::size_t>(t - 1)], cap);
                    service += inst.path[static_cast<std::size_t>(t - 1)];
                }
                const double blocks = static_cast<double>((t - s + inst.delay - 1) / inst.delay);
                const double upper = std::min(service, blocks * inst.window);
                const double v = row[static_cast<std::size_t>(t - s)];
                const double tol = 1e-12 * std::max(1.0, std::abs(v));
                if (v < lower - tol || v > upper + tol) ++violations;
                ++cells;
            }
        }
    }
    return {violations == 0, std::to_string(cells) + " (s,t) pairs, " + std::to_string(violations) + " violations"};
}

// --- 4. constants -----------------------------------------------------------------

Outcome constants() {
    bool ok = true;
    std::string detail;
    const auto vbr = models::exponential_vbr(1.0);
    const double vbr_mbps = units::mb_per_slot_to_mbps(models::average_rate(vbr));
    ok &= vbr_mbps == 1000.0;
    const double g1 = models::effective_capacity(vbr, 1.0);
    ok &= std::abs(g1 - std::log(2.0)) <= 1e-12;
    detail += "VBR rate " + fmt("%.15g", vbr_mbps) + " Mbps, effcap(1) - ln2 = " + fmt("%.3g", g1 - std::log(2.0));

    const models::MarkovService mmoo{0.2, 0.9, models::ConstantLaw{0.0}, models::ConstantLaw{1.125}};
    const double rate = models::average_rate(mmoo);
    ok &= std::abs(rate - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon();
    double worst = 0.0;
    const ThetaGrid grid(1e-3, 1e3, 32);
    for (double theta : grid.values()) {
        const double closed = models::mmoo_effective_capacity_closed_form(0.2, 0.9, 1.125, theta);
        const double eigen = -std::log(models::eigen_m_plus(mmoo, -theta)) / theta;
        const double reference = support::mmoo_effcap_formula(0.2, 0.9, 1.125, theta);
        worst = std::max({worst, std::abs(closed - eigen), std::abs(closed - reference)});
    }
    ok &= worst <= 1e-12;
    detail += "; MMOO rate " + fmt("%.17g", rate) + " Mb/slot, closed form vs eigenvalue max diff " + fmt("%.3g", worst) +
              " over 32 theta";
    return {ok, detail};
}

// --- 5 & 6. MGF dominance and Chernoff validity --------------------------------------

struct MgfConfig {
    std::string name;
    models::ServiceModel model;
    bounds::FeedbackParams params;
};

std::vector<MgfConfig> mgf_configs() {
    std::vector<MgfConfig> out;
    const std::pair<std::string, models::ServiceModel> models_[] = {{"exp", models::exponential_vbr(1.0)},
                                                                    {"mmoo", models::mmoo(0.2, 0.9, 1.125)}};
    for (const auto& [name, model] : models_)
        for (std::int64_t d : {1, 2, 5, 10})
            for (double rate : {0.1, 0.5})
                out.push_back({name + " d=" + std::to_string(d) + " w/d=" + fmt("%g", rate), model,
                               {rate * static_cast<double>(d), d}});
    return out;
}

constexpr std::int64_t kPaths = 100000;
const std::vector<std::int64_t> kTimes{20, 50};

// samples[config][j][i]: S_win(0, kTimes[j]) on path i.
const std::vector<std::vector<std::vector<double>>>& mgf_samples() {
    static const auto samples = [] {
        std::vector<std::vector<std::vector<double>>> out;
        std::uint64_t seed = 1000;
        for (const auto& c : mgf_configs()) out.push_back(sim::sample_swin(c.model, c.params, kTimes, kPaths, ++seed, 1));
        return out;
    }();
    return samples;
}

double theorem_bound(const MgfConfig& c, double theta, std::int64_t t) {
    return models::is_iid(c.model) ? bounds::mgf_swin_iid(c.model, c.params, theta, t)
                                   : bounds::mgf_swin_markov(c.model, c.params, theta, t);
}

Outcome mgf_dominance() {
    const auto configs = mgf_configs();
    const auto& samples = mgf_samples();
    int cases = 0, failures = 0;
    double tightest = std::numeric_limits<double>::infinity();
    std::string first;
    for (std::size_t k = 0; k < configs.size(); ++k)
        for (std::size_t j = 0; j < kTimes.size(); ++j)
            for (double theta : {0.5, 1.0, 2.0}) {
                double sum = 0.0, sum2 = 0.0;
                for (double x : samples[k][j]) {
                    const double v = std::exp(-theta * x);
                    sum += v;
                    sum2 += v * v;
                }
                const double n = static_cast<double>(kPaths);
                const double mean = sum / n;
                const double se = std::sqrt(std::max(sum2 / n - mean * mean, 0.0) / (n - 1.0));
                const double bound = theorem_bound(configs[k], theta, kTimes[j]);
                ++cases;
                tightest = std::min(tightest, bound / mean);
                if (!(mean <= bound + 3.0 * se)) {
                    if (failures++ == 0) first = configs[k].name + " t=" + std::to_string(kTimes[j]) + fmt(" theta=%g", theta);
                }
            }
    return {failures == 0, std::to_string(configs.size()) + " configs, " + std::to_string(cases) + " cases, " +
                               std::to_string(failures) + " above bound + 3 se; min bound/mean = " +
                               fmt("%.4g", tightest) + (first.empty() ? "" : "; first: " + first)};
}

Outcome chernoff_validity() {
    const double eps = 1e-2;
    const double limit = eps + 3.0 * std::sqrt(eps / static_cast<double>(kPaths));
    const auto configs = mgf_configs();
    const auto& samples = mgf_samples();
    int failures = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < configs.size(); ++k)
        for (std::size_t j = 0; j < kTimes.size(); ++j) {
            const auto point = bounds::service_curve_point(bounds::best_bound(configs[k].model, configs[k].params), eps,
                                                           ThetaGrid::standard(), kTimes[j]);
            std::int64_t below = 0;
            for (double x : samples[k][j]) below += x <= point.value ? 1 : 0;
            const double freq = static_cast<double>(below) / static_cast<double>(kPaths);
            worst = std::max(worst, freq);
            if (freq > limit) ++failures;
        }
    return {failures == 0, std::to_string(configs.size() * kTimes.size()) + " (config, t) pairs, max frequency " +
                               fmt("%.5f", worst) + " vs limit " + fmt("%.5f", limit)};
}

// --- 7. deterministic throughput --------------------------------------------------------

Outcome deterministic_throughput() {
    bool ok = true;
    std::string detail;
    for (std::int64_t d : {1, 10, 100}) {
        const sim::SimConfig cfg{1, 10000, 0, models::constant_arrivals(10.0), models::deterministic(1.0),
                                 {0.1 * static_cast<double>(d), d}};
        const double mbps = units::mb_per_slot_to_mbps(sim::run_flow_control(cfg).throughput);
        ok &= std::abs(mbps - 100.0) <= 2.0;
        detail += (detail.empty() ? "" : ", ") + ("d=" + std::to_string(d) + ": " + fmt("%.3f", mbps) + " Mbps");
    }
    return {ok, detail};
}

// --- 8. effective-capacity ordering -----------------------------------------------------

Outcome effcap_ordering() {
    int violations = 0, points = 0;
    double worst_gap = 0.0;
    for (const char* fig : {"fig5", "fig7"}) {
        for (const auto& sec : config::parse(std::string(scenario::figure_config(fig)), fig)) {
            const auto s = scenario::resolve(sec, scenario::Command::EffectiveCapacity);
            for (const auto& fb : s.feedback) {
                const auto best = bounds::best_effcap_lower(s.service, fb.params,
                                                            ThetaGrid(s.thetas.front(), s.thetas.back(), s.thetas.size()));
                for (const auto& pt : best.points) {
                    const double cap = std::min(models::effective_capacity(s.service, pt.x), fb.params.window_rate());
                    if (pt.value > cap * (1.0 + 1e-12)) ++violations;
                    ++points;
                }
                const auto iv = bounds::effcap_bounds_apriori(s.service, fb.params, 100.0);
                worst_gap = std::max(worst_gap, (iv.upper - iv.lower) / iv.upper);
            }
        }
    }

    // d = 1: the a-priori lower bound against the empirical rate at t = 200.
    const std::int64_t t = 200, n = 100000;
    const std::vector<std::int64_t> ts{t};
    int mc_fail = 0;
    double worst_z = 0.0;
    for (double w : {0.1, 0.5}) {
        const auto vbr = models::exponential_vbr(1.0);
        const bounds::FeedbackParams p(w, 1);
        const auto samples = sim::sample_swin(vbr, p, ts, n, 77, 1)[0];
        for (double theta : {0.05, 0.1, 0.2}) {
            double sum = 0.0, sum2 = 0.0;
            for (double x : samples) {
                const double v = std::exp(-theta * x);
                sum += v;
                sum2 += v * v;
            }
            const double mean = sum / n;
            const double se_mean = std::sqrt((sum2 / n - mean * mean) / (n - 1.0));
            const double empirical = -std::log(mean) / (theta * t);
            const double se = se_mean / (mean * theta * t);
            const double z = std::abs(empirical - bounds::effcap_bounds_apriori(vbr, p, theta).lower) / se;
            worst_z = std::max(worst_z, z);
            if (z > 3.0) ++mc_fail;
        }
    }
    const bool ok = violations == 0 && worst_gap < 0.05 && mc_fail == 0;
    return {ok, std::to_string(points) + " points, " + std::to_string(violations) +
                    " above min{effcap, w/d}; max gap at theta=100/Mb " + fmt("%.3g", worst_gap) +
                    "; d=1 empirical max |z| " + fmt("%.2f", worst_z)};
}

// --- 9. backlog dominance and saturation --------------------------------------------------

Outcome backlog_dominance() {
    const auto service = models::exponential_vbr(1.0);
    const bounds::FeedbackParams p(0.1, 1);
    const double eps = 1e-3;
    const auto bound = bounds::best_bound(service, p);
    bool ok = true;
    std::string detail;
    for (double mbps : {50.0, 70.0, 90.0}) {
        const auto arrivals = models::exponential_arrivals(units::mbps_to_mb_per_slot(mbps));
        sim::SimConfig cfg{2024, 1010000, 10000, arrivals, service, p};
        cfg.replications = 20;
        const auto q = sim::backlog_quantile(cfg, eps, 1);
        const auto b = bounds::backlog_bound_steady(arrivals, bound, eps, ThetaGrid::standard());
        const bool pass = b.bounded && b.value >= q.value && !q.diverging;
        ok &= pass;
        detail += fmt("%g Mbps: ", mbps) + fmt("bound %.4g", b.value) + fmt(" >= sim %.4g Mb", q.value) +
                  " over " + std::to_string(q.samples) + " slots; ";
    }
    // Saturation: the a-priori lower-bound process min{c, w/d} has mean
    // 1 - e^{-0.1} Mb/slot for this service.
    const double ceiling = units::mb_per_slot_to_mbps(-std::expm1(-0.1));
    for (double mbps : {ceiling, 100.0, 150.0}) {
        const auto arrivals = models::exponential_arrivals(units::mbps_to_mb_per_slot(mbps));
        const auto b = bounds::backlog_bound_steady(arrivals, bound, eps, ThetaGrid::standard());
        ok &= !b.bounded;
        detail += fmt("%.6g Mbps: ", mbps) + (b.bounded ? "bounded; " : "unbounded; ");
    }
    {
        sim::SimConfig cfg{5, 200000, 10000, models::exponential_arrivals(0.15), service, p};
        cfg.replications = 2;
        const bool diverging = sim::backlog_quantile(cfg, eps, 1).diverging;
        ok &= diverging;
        detail += std::string("simulation at 150 Mbps ") + (diverging ? "diverging" : "not flagged");
    }
    return {ok, detail};
}

// --- 10. Markov structure -------------------------------------------------------------

// pi (L)^t 1 with L = P diag(M), iterated directly.
double chain_power_mgf(const support::TwoStateChain& c, const double m[2], std::int64_t t) {
    double v0 = (1.0 - c.pi1()) * m[0], v1 = c.pi1() * m[1];
    if (t == 0) return 1.0;
    for (std::int64_t k = 1; k < t; ++k) {
        const double n0 = (v0 * c.step(0, 0) + v1 * c.step(1, 0)) * m[0];
        const double n1 = (v0 * c.step(0, 1) + v1 * c.step(1, 1)) * m[1];
        v0 = n0;
        v1 = n1;
    }
    return v0 + v1;
}

Outcome markov_structure() {
    int checks = 0, failures = 0;
    auto check = [&](bool ok) {
        ++checks;
        failures += ok ? 0 : 1;
    };
    const std::pair<double, double> chains[] = {{0.2, 0.9}, {0.5, 0.7}, {0.9, 0.95}};

    // Gap monotonicity, with every probability also checked by enumeration.
    for (const auto& [p00, p11] : chains) {
        const models::MarkovService m{p00, p11, models::ConstantLaw{0.0}, models::ConstantLaw{1.0}};
        const support::TwoStateChain chain{p00, p11};
        for (std::int64_t a = 0; a <= 8; ++a)
            for (std::int64_t b = a + 1; b <= 8; ++b)
                for (std::int64_t c = b + 1; c <= 8; ++c) {
                    const std::vector<std::int64_t> base{a, b, c};
                    const double pb = models::on_sequence_probability(m, base);
                    check(std::abs(pb - support::chain_all_on(chain, base)) <= 1e-15);
                    if (c + 1 <= 8) {
                        const std::vector<std::int64_t> wide1{a, b + 1, c + 1}, wide2{a, b, c + 1};
                        check(models::on_sequence_probability(m, wide1) <= pb + 1e-15);
                        check(models::on_sequence_probability(m, wide2) <= pb + 1e-15);
                    }
                }
    }

    const double peaks[] = {1.125, 1.0, 0.7};
    int k = 0;
    for (const auto& [p00, p11] : chains) {
        const double peak = peaks[k++];
        const auto model = models::mmoo(p00, p11, peak);
        const support::TwoStateChain chain{p00, p11};
        for (double theta : {2.0, -2.0, 0.5, -0.5, 0.1, -0.1}) {
            const double m[2] = {1.0, std::exp(theta * peak)};
            const double mc = (1.0 - chain.pi1()) * m[0] + chain.pi1() * m[1];
            const double tr = p00 * m[0] + p11 * m[1];
            const double det = (p00 * p11 - (1.0 - p00) * (1.0 - p11)) * m[0] * m[1];
            const double disc = std::sqrt(tr * tr - 4.0 * det);
            const double mp = 0.5 * (tr + disc), mm = 0.5 * (tr - disc);
            const double K = (mc - mm) / (mp - mm);
            check(K > 0.0 && K < 1.0);
            std::vector<double> exact(25);
            for (std::int64_t t = 0; t <= 24; ++t) {
                exact[static_cast<std::size_t>(t)] = chain_power_mgf(chain, m, t);
                check(std::abs(models::mgf_path(model, theta, t) - exact[static_cast<std::size_t>(t)]) <=
                      1e-12 * exact[static_cast<std::size_t>(t)]);
            }
            const double rel = 1e-12;
            for (std::int64_t t = 1; t <= 16; ++t) {
                const double v = exact[static_cast<std::size_t>(t)];
                if (t <= 10) check(std::abs(support::chain_path_mgf(chain, m, t) - v) <= 1e-12 * v);
                check(std::pow(mc, t) <= v * (1.0 + rel));
                check(v <= std::pow(mp, t) * (1.0 + rel));
                check(v >= K * std::pow(mp, t) * (1.0 - rel));
            }
            for (std::int64_t s = 1; s <= 12; ++s)
                for (std::int64_t t = 1; t <= 12; ++t)
                    check(exact[static_cast<std::size_t>(s)] * exact[static_cast<std::size_t>(t)] <=
                          exact[static_cast<std::size_t>(s + t)] * (1.0 + rel));
            // Grouped times in [0, 6] against the same number of consecutive slots.
            for (std::uint32_t mask = 1; mask < (1U << 7); ++mask) {
                std::vector<std::int64_t> times;
                for (std::int64_t i = 0; i < 7; ++i)
                    if (mask & (1U << i)) times.push_back(i);
                if (times.size() > 3) continue;
                const double grouped = support::chain_mgf(chain, m, 7, times);
                check(grouped <= exact[times.size()] * (1.0 + rel));
            }
        }
    }
    return {failures == 0, std::to_string(checks) + " checks, " + std::to_string(failures) + " failed"};
}

// --- 11. dioid laws --------------------------------------------------------------------

Outcome dioid_laws() {
    using namespace wfc::algebra;
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> horizon(1, 8), inc(0, 5), wpick(1, 4);
    auto member = [&](std::int64_t T) {
        BivariateFunction f(T);
        for (std::int64_t s = 0; s <= T; ++s) {
            double v = 0.0;
            for (std::int64_t t = s + 1; t <= T; ++t) f.set(s, t, v += inc(gen));
        }
        return f;
    };
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::int64_t T = horizon(gen);
        const auto f = member(T), g = member(T), h = member(T);
        const auto delta = make_delta(T);
        const auto dw = make_delta_plus_w(T, wpick(gen));
        bool ok = convolve(delta, f) == f && convolve(f, delta) == f;
        ok &= convolve(convolve(f, g), h) == convolve(f, convolve(g, h));
        ok &= convolve(f, pointwise_min(g, h)) == pointwise_min(convolve(f, g), convolve(f, h));
        ok &= convolve(pointwise_min(g, h), f) == pointwise_min(convolve(g, f), convolve(h, f));
        ok &= convolve(f, dw) == convolve(dw, f);
        const auto star = subadditive_closure(f).closure;
        ok &= convolve(star, star) == star;
        ok &= pointwise_min(star, f) == star && pointwise_min(star, delta) == star;
        if (!ok) ++failures;
    }
    return {failures == 0, "1000 instances, " + std::to_string(failures) + " failed"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 dual-oracle equality", dual_oracle},
        {"2 d=1 exactness", d1_exactness},
        {"3 a-priori sandwich", sandwich},
        {"4 model constants", constants},
        {"5 MGF bound dominance", mgf_dominance},
        {"6 Chernoff validity", chernoff_validity},
        {"7 deterministic throughput", deterministic_throughput},
        {"8 effective-capacity ordering", effcap_ordering},
        {"9 backlog dominance", backlog_dominance},
        {"10 Markov structure", markov_structure},
        {"11 dioid laws", dioid_laws},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out{false, ""};
        try {
            out = fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), secs);
        std::fflush(stdout);
        failed += out.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
