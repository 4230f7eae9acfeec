#include "wfc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "wfc/algebra.hpp"
#include "wfc/bounds.hpp"
#include "wfc/models.hpp"
#include "wfc/oracle.hpp"
#include "wfc/rng.hpp"
#include "wfc/simulator.hpp"

namespace wfc::verify {

namespace {

using algebra::BivariateFunction;

class Suite {
public:
    explicit Suite(std::string name) { result_.name = std::move(name); }

    void check(bool ok, const std::string& what) {
        ++result_.checks;
        if (!ok) {
            if (result_.failures == 0) result_.first_failure = what;
            ++result_.failures;
        }
    }

    SuiteResult finish(std::chrono::steady_clock::time_point start) {
        result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result_;
    }

private:
    SuiteResult result_;
};

BivariateFunction random_function(Rng& rng, std::int64_t horizon) {
    // Nonnegative, non-decreasing rows, occasional +inf tails, f(t,t) = 0.
    BivariateFunction f(horizon);
    for (std::int64_t s = 0; s <= horizon; ++s) {
        double v = 0.0;
        for (std::int64_t t = s + 1; t <= horizon; ++t) {
            v = rng.uniform() < 0.05 ? algebra::kInf : v + std::floor(rng.uniform() * 4.0);
            f.set(s, t, v);
        }
    }
    return f;
}

models::ServiceModel random_model(Rng& rng, int kind) {
    switch (kind) {
        case 0: return models::exponential_vbr(0.5 + rng.uniform());
        case 1: return models::mmoo(0.2, 0.9, 1.125);
        default:
            return models::leftover(models::deterministic(1.0), models::IidService{models::ExponentialLaw{0.6}});
    }
}

SuiteResult algebra_laws(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    Suite suite("dioid laws");
    Rng rng(substream_seed(opt.seed, 1));
    for (int i = 0; i < 200; ++i) {
        const std::int64_t horizon = 1 + static_cast<std::int64_t>(rng.uniform() * 7.0);
        const auto f = random_function(rng, horizon);
        const auto g = random_function(rng, horizon);
        const auto h = random_function(rng, horizon);
        const auto delta = algebra::make_delta(horizon);
        const auto dw = algebra::make_delta_plus_w(horizon, 1.0 + std::floor(rng.uniform() * 3.0));
        const std::string tag = " (instance " + std::to_string(i) + ")";
        suite.check(algebra::convolve(delta, f) == f && algebra::convolve(f, delta) == f, "neutrality" + tag);
        suite.check(algebra::convolve(algebra::convolve(f, g), h) == algebra::convolve(f, algebra::convolve(g, h)),
                    "associativity" + tag);
        suite.check(algebra::convolve(f, algebra::pointwise_min(g, h)) ==
                        algebra::pointwise_min(algebra::convolve(f, g), algebra::convolve(f, h)),
                    "distributivity" + tag);
        suite.check(algebra::convolve(f, dw) == algebra::convolve(dw, f), "delta^{+w} commutation" + tag);
        const auto star = algebra::subadditive_closure(f).closure;
        bool sub = true;
        for (std::int64_t s = 0; s <= horizon; ++s)
            for (std::int64_t tau = s; tau <= horizon; ++tau)
                for (std::int64_t t = tau; t <= horizon; ++t)
                    if (star(s, t) > star(s, tau) + star(tau, t)) sub = false;
        suite.check(sub, "closure subadditivity" + tag);
    }
    return suite.finish(start);
}

struct Instance {
    oracle::SamplePath path;
    bounds::FeedbackParams params;
};

std::vector<Instance> random_instances(std::uint64_t seed, int count) {
    Rng rng(substream_seed(seed, 2));
    const std::int64_t delays[] = {1, 2, 3, 5};
    std::vector<Instance> out;
    for (int i = 0; i < count; ++i) {
        const auto model = random_model(rng, i % 3);
        const std::int64_t horizon = 1 + static_cast<std::int64_t>(rng.uniform() * 24.0);
        const std::int64_t d = delays[static_cast<std::size_t>(rng.uniform() * 4.0)];
        const double w = (1.0 - rng.uniform()) * 3.0 * models::average_rate(model);
        out.push_back({oracle::SamplePath(models::sample_path(model, substream_seed(seed, 3, i), horizon)),
                       bounds::FeedbackParams(w, d)});
    }
    return out;
}

SuiteResult dual_oracle(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    Suite suite("dual oracle");
    for (const auto& inst : random_instances(opt.seed, 200)) {
        const auto closure = oracle::swin_exact_closure(inst.path, inst.params);
        const std::int64_t horizon = inst.path.horizon();
        double worst = 0.0;
        for (std::int64_t s = 0; s <= horizon; ++s) {
            const auto row = oracle::swin_row(inst.path, inst.params, s);
            for (std::int64_t t = s; t <= horizon; ++t)
                worst = std::max(worst, std::abs(row[static_cast<std::size_t>(t - s)] - closure(s, t)));
        }
        suite.check(worst <= 1e-9, "dp and closure differ by " + std::to_string(worst));
    }
    return suite.finish(start);
}

SuiteResult sandwich(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    Suite suite("a-priori sandwich");
    for (const auto& inst : random_instances(opt.seed, 200)) {
        const double w = opt.fault == Fault::WindowSignFlip ? -inst.params.window() : inst.params.window();
        const std::int64_t horizon = inst.path.horizon();
        for (std::int64_t s = 0; s <= horizon; ++s) {
            const auto row = oracle::swin_row_unchecked(inst.path, w, inst.params.delay(), s);
            for (std::int64_t t = s; t <= horizon; ++t) {
                const auto b = oracle::apriori_sandwich(inst.path, inst.params, s, t);
                const double v = row[static_cast<std::size_t>(t - s)];
                suite.check(b.lower <= v + 1e-9 && v <= b.upper + 1e-9,
                            "S_win(" + std::to_string(s) + "," + std::to_string(t) + ") = " + std::to_string(v) +
                                " outside [" + std::to_string(b.lower) + ", " + std::to_string(b.upper) + "]");
            }
        }
    }
    return suite.finish(start);
}

SuiteResult mgf_dominance(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    Suite suite("MGF bound dominance");
    const models::ServiceModel services[] = {models::exponential_vbr(1.0), models::mmoo(0.2, 0.9, 1.125)};
    const std::int64_t ts[] = {20};
    for (const auto& service : services) {
        for (const std::int64_t d : {1, 5}) {
            const bounds::FeedbackParams params(0.5 * static_cast<double>(d), d);
            const auto samples = sim::sample_swin(service, params, ts, 4000, substream_seed(opt.seed, 4, d), opt.jobs);
            const auto bound = bounds::product_bound(service, params);
            for (const double theta : {0.5, 1.0, 2.0}) {
                const auto est = sim::empirical_mgf(samples[0], theta);
                const double b = std::exp(bound.log_mgf(theta, ts[0]));
                suite.check(est.mean <= b + 3.0 * est.stderr_,
                            "empirical " + std::to_string(est.mean) + " above bound " + std::to_string(b));
            }
        }
    }
    return suite.finish(start);
}

SuiteResult markov_structure(const Options&) {
    const auto start = std::chrono::steady_clock::now();
    Suite suite("Markov structure");
    const auto model = models::mmoo(0.2, 0.9, 1.125);
    const auto& m = std::get<models::MarkovService>(model);
    // Widening one gap by a slot (later times shift along) must not raise
    // the probability.
    for (std::int64_t a = 0; a <= 8; ++a)
        for (std::int64_t b = a + 1; b <= 8; ++b)
            for (std::int64_t c = b + 1; c < 8; ++c) {
                const std::int64_t base[] = {a, b, c};
                const std::int64_t wider_first[] = {a, b + 1, c + 1};
                const std::int64_t wider_second[] = {a, b, c + 1};
                const double p = models::on_sequence_probability(m, base);
                suite.check(models::on_sequence_probability(m, wider_first) <= p + 1e-15, "gap monotonicity");
                suite.check(models::on_sequence_probability(m, wider_second) <= p + 1e-15, "gap monotonicity");
            }
    for (const double theta : {-2.0, -0.5, -0.1, 0.1, 0.5, 2.0}) {
        const double mc = models::mgf_increment(model, theta);
        const double mp = models::eigen_m_plus(m, theta);
        const double k = models::k_theta(m, theta);
        for (std::int64_t t = 1; t <= 16; ++t) {
            const double exact = models::mgf_path(model, theta, t);
            const double tol = 1e-12 * exact;
            suite.check(std::pow(mc, static_cast<double>(t)) <= exact + tol, "M_c^t <= M_S");
            suite.check(exact <= std::pow(mp, static_cast<double>(t)) + tol, "M_S <= m_+^t");
            suite.check(exact + tol >= k * std::pow(mp, static_cast<double>(t)), "M_S >= K m_+^t");
            for (std::int64_t s = 1; s + t <= 24 && s <= 12; ++s) {
                const double lhs = models::mgf_path(model, theta, s) * exact;
                suite.check(lhs <= models::mgf_path(model, theta, s + t) * (1.0 + 1e-12), "supermultiplicativity");
            }
        }
    }
    return suite.finish(start);
}

}  // namespace

std::vector<SuiteResult> run_all(const Options& options) {
    return {algebra_laws(options), dual_oracle(options), sandwich(options), mgf_dominance(options),
            markov_structure(options)};
}

bool all_passed(const std::vector<SuiteResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const SuiteResult& r) { return r.failures == 0; });
}

std::string format_report(const std::vector<SuiteResult>& results) {
    std::ostringstream out;
    std::int64_t checks = 0, failures = 0;
    double seconds = 0.0;
    for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof line, "%-4s %-22s %8lld checks %6lld failed %8.3f s", r.failures == 0 ? "PASS" : "FAIL",
                      r.name.c_str(), static_cast<long long>(r.checks), static_cast<long long>(r.failures), r.seconds);
        out << line;
        if (r.failures > 0) out << "  first: " << r.first_failure;
        out << '\n';
        checks += r.checks;
        failures += r.failures;
        seconds += r.seconds;
    }
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-22s %8lld checks %6lld failed %8.3f s", failures == 0 ? "PASS" : "FAIL",
                  "total", static_cast<long long>(checks), static_cast<long long>(failures), seconds);
    out << line << '\n';
    return out.str();
}

}  // namespace wfc::verify
