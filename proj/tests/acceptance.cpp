// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "fundfreq/fundfreq.hpp"
#include "fundfreq_cli.hpp"
#include "oracles.hpp"

using namespace fundfreq;

namespace {

constexpr std::uint64_t kMasterSeed = 1;
int failures = 0;

void report(int id, const std::string& name, const std::function<bool(std::string&)>& check) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = check(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool within(double value, double expected, double rel) { return oracle::relative_error(value, expected) <= rel; }

SummaryRow monte_carlo(const HarmonicModel& model, std::size_t n, double sigma2) {
    ExperimentSpec spec;
    spec.model = model;
    spec.noise_coeffs = {1.0, 0.5};
    spec.sample_sizes = {n};
    spec.sigma2_values = {sigma2};
    spec.replications = 500;
    spec.master_seed = kMasterSeed;
    return run_experiment(spec, 1).front();
}

}  // namespace

int main() {
    report(1, "asymptotic variance tables", [](std::string& d) {
        struct Case {
            HarmonicModel model;
            LinearProcessSpec noise;
            std::size_t n;
            double lse, mnr;
        };
        const Case cases[] = {
            {presets::model1(), LinearProcessSpec::iid(0.01), 100, 6.36e-10, 1.59e-10},
            {presets::model1(), presets::ma1(0.01), 100, 1.25e-9, 3.13e-10},
            {presets::model2(), LinearProcessSpec::iid(0.01), 100, 1.63e-9, 0.0},
            {presets::model2(), presets::ma1(1.0), 1000, 3.09e-10, 7.73e-11},
        };
        bool ok = true;
        double worst = 0;
        for (const auto& c : cases) {
            const auto r = asymptotic_variances(c.model, c.noise, c.n);
            worst = std::max(worst, oracle::relative_error(r.var_lse, c.lse));
            if (c.mnr > 0) worst = std::max(worst, oracle::relative_error(r.var_mnr, c.mnr));
        }
        ok = worst <= 0.01;
        d = fmt("max relative deviation %.3g (limit 0.01)", worst);
        return ok;
    });

    report(2, "ratio law", [](std::string& d) {
        std::mt19937_64 rng(kMasterSeed);
        std::uniform_real_distribution<double> amp(-5, 5), frac(0.02, 0.98), var(0.01, 3.0);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const std::size_t p = 1 + i % 6;
            HarmonicModel m{frac(rng) * std::numbers::pi / static_cast<double>(p), {}};
            for (std::size_t j = 0; j < p; ++j) m.amplitudes.push_back({amp(rng), amp(rng)});
            const LinearProcessSpec noise{{1.0, amp(rng) / 5, amp(rng) / 10}, var(rng)};
            const auto r = asymptotic_variances(m, noise, 50 + 25 * static_cast<std::size_t>(i));
            worst = std::max(worst, std::fabs(r.var_lse / r.var_mnr - 4.0));
        }
        d = fmt("max |ratio - 4| = %.3g (limit 1e-12)", worst);
        return worst <= 1e-12;
    });

    report(3, "Monte Carlo, model 1, MA(1), n=500, sigma2=0.25", [](std::string& d) {
        const auto row = monte_carlo(presets::model1(), 500, 0.25);
        d = fmt("mean %.7f, variance %.4g", row.mean_estimate, row.empirical_variance) +
            fmt(" (band %.4g .. %.4g)", 0.5 * row.asym_var_mnr, row.asym_var_lse) +
            ", failures " + std::to_string(row.failure_count);
        return row.mean_estimate >= 0.2495 && row.mean_estimate <= 0.2505 &&
               row.empirical_variance < row.asym_var_lse && row.empirical_variance > 0.5 * row.asym_var_mnr;
    });

    report(4, "Monte Carlo, model 2, MA(1), n=400, sigma2=0.25", [](std::string& d) {
        const auto row = monte_carlo(presets::model2(), 400, 0.25);
        d = fmt("mean %.7f, variance %.4g (limit 1.21e-9)", row.mean_estimate, row.empirical_variance) +
            ", failures " + std::to_string(row.failure_count);
        return row.mean_estimate >= 0.3136 && row.mean_estimate <= 0.3146 && row.empirical_variance < 1.21e-9;
    });

    report(5, "derivatives against central differences", [](std::string& d) {
        std::mt19937_64 rng(kMasterSeed);
        std::uniform_real_distribution<double> amp(-3, 3), frac(0.1, 0.9);
        double worst1 = 0, worst2 = 0;
        for (int s = 0; s < 5; ++s) {
            const std::size_t p = 1 + s % 4;
            HarmonicModel m{frac(rng) * std::numbers::pi / static_cast<double>(p), {}};
            for (std::size_t j = 0; j < p; ++j) m.amplitudes.push_back({amp(rng), amp(rng)});
            const auto y = synthesize(m, 250 + 60 * static_cast<std::size_t>(s), presets::ma1(0.5),
                                      static_cast<std::uint64_t>(s) + 100);
            for (int i = 0; i < 20; ++i) {
                const double l = (0.05 + 0.9 * i / 19.0) * std::numbers::pi / static_cast<double>(p) * 0.95;
                const long double h = 1e-6L;
                for (auto c : {Criterion::per_harmonic, Criterion::joint}) {
                    const oracle::Fn f = [&](long double x) {
                        return c == Criterion::joint ? oracle::g_joint(y, p, x) : oracle::g_per_harmonic(y, p, x);
                    };
                    const auto g = criterion_derivatives(y, p, l, c);
                    worst1 = std::max(worst1, oracle::relative_error(
                                                  g.first, static_cast<double>(oracle::central_first(f, l, h))));
                    worst2 = std::max(worst2, oracle::relative_error(
                                                  g.second, static_cast<double>(oracle::central_second(f, l, h))));
                }
            }
        }
        d = fmt("max relative error g' %.3g (limit 1e-4), g'' %.3g (limit 1e-3)", worst1, worst2);
        return worst1 < 1e-4 && worst2 < 1e-3;
    });

    report(6, "curvature limit", [](std::string& d) {
        const std::size_t n = 1000;
        const auto y = synthesize(presets::model1(), n, std::nullopt, 0);
        const double target = -oracle::beta_star(presets::model1()) / 24.0;
        const double n3 = std::pow(static_cast<double>(n), 3);
        const double joint = g_joint_derivatives(y, 4, 0.25).second / (2 * n3);
        const double separate = g_derivatives(y, 4, 0.25).second / (2 * n3);
        d = fmt("g''/(2n^3) joint %.4f, per-harmonic %.4f, target %.4f", joint, separate, target);
        return within(joint, target, 0.05) && within(separate, target, 0.05) && within(target, -15.7318, 1e-5);
    });

    report(7, "noiseless exactness at n=512", [](std::string& d) {
        // defaults as configured; the tight run only reports where the fixed point sits
        MnrConfig tight;
        tight.tol = 1e-11;
        tight.max_iter = 200;
        double worst_l = 0, worst_a = 0, fixed_point = 0;
        for (const auto& model : {presets::model1(), presets::model2()}) {
            const auto y = synthesize(model, 512, std::nullopt, 0);
            const auto fit = estimate_fundamental(y, 4);
            worst_l = std::max(worst_l, std::fabs(fit.lambda_hat - model.lambda));
            const auto a = lse_linear(y, fit.lambda_hat, 4);
            for (std::size_t j = 0; j < 4; ++j)
                worst_a = std::max({worst_a, std::fabs(a[j].a - model.amplitudes[j].a),
                                    std::fabs(a[j].b - model.amplitudes[j].b)});
            fixed_point = std::max(fixed_point, std::fabs(estimate_fundamental(y, 4, tight).lambda_hat - model.lambda));
        }
        d = fmt("max |lambda error| %.3g (limit 1e-8), max amplitude error %.3g (limit 1e-6)", worst_l, worst_a) +
            fmt("; with tol 1e-11 the lambda error is %.3g", fixed_point);
        return worst_l < 1e-8 && worst_a < 1e-6;
    });

    report(8, "scale invariance of the trace", [](std::string& d) {
        double worst = 0;
        bool same_length = true;
        for (const auto& model : {presets::model1(), presets::model2()}) {
            const auto y = synthesize(model, 500, presets::ma1(0.25), 77);
            const auto a = estimate_fundamental(y, 4);
            const auto b = estimate_fundamental(y.scaled(1000.0), 4);
            same_length = same_length && a.trace.records.size() == b.trace.records.size();
            for (std::size_t i = 0; i < std::min(a.trace.records.size(), b.trace.records.size()); ++i)
                worst = std::max(worst, std::fabs(a.trace.records[i].lambda - b.trace.records[i].lambda));
        }
        d = fmt("max iterate difference %.3g (limit 1e-10)", worst) + (same_length ? "" : ", trace lengths differ");
        return same_length && worst <= 1e-10;
    });

    report(9, "simulate is thread-count independent", [](std::string& d) {
        const auto run = [](const char* threads) {
            const char* argv[] = {"fundfreq", "simulate", "--model",   "1",       "--noise", "ma:1,0.5",
                                  "--n",      "200,300",  "--sigma2",  "0.25,1",  "--reps",  "40",
                                  "--seed",   "1",        "--threads", threads};
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(std::size(argv)), argv, out, err);
            return std::make_pair(code, out.str());
        };
        const auto a = run("1"), b = run("4");
        d = "exit codes " + std::to_string(a.first) + "/" + std::to_string(b.first) + ", " +
            std::to_string(a.second.size()) + " bytes, " + (a.second == b.second ? "identical" : "different");
        return a.first == 0 && b.first == 0 && !a.second.empty() && a.second == b.second;
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
