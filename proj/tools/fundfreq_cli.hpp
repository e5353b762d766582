#pragma once

// Command-line front end: synth, estimate, periodogram, simulate, asymvar.
// Exit codes: 0 success, 1 runtime/numerical failure, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fundfreq/fundfreq.hpp"

namespace fundfreq::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag value or unreadable input discovered after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "none", "iid" or "ma:a0,a1,...".
inline std::optional<std::vector<double>> parse_noise(const std::string& text) {
    if (text == "none") return std::nullopt;
    if (text == "iid") return std::vector<double>{1.0};
    if (text.rfind("ma:", 0) == 0) {
        std::vector<double> coeffs;
        std::stringstream ss(text.substr(3));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                coeffs.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw UsageError("bad MA coefficient '" + item + "'");
            }
        }
        if (coeffs.empty()) throw UsageError("ma: needs at least one coefficient");
        return coeffs;
    }
    throw UsageError("noise must be none, iid or ma:<coeffs>, got '" + text + "'");
}

/// JSON model file: {"lambda": 0.25, "amplitudes": [[A1, B1], [A2, B2], ...]}.
inline HarmonicModel read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model file '" + path + "'");
    try {
        const json doc = json::parse(in);
        HarmonicModel model;
        model.lambda = doc.at("lambda").get<double>();
        for (const auto& pair : doc.at("amplitudes"))
            model.amplitudes.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
        return model;
    } catch (const json::exception& e) {
        throw UsageError("malformed model file '" + path + "': " + e.what());
    }
}

inline HarmonicModel resolve_model(const std::string& preset, const std::string& model_file) {
    if (!model_file.empty()) return read_model_file(model_file);
    if (preset == "1") return presets::model1();
    if (preset == "2") return presets::model2();
    return read_model_file(preset);
}

inline unsigned resolve_threads(std::optional<unsigned> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("FUNDFREQ_THREADS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError(std::string("FUNDFREQ_THREADS is not a number: ") + env);
        }
    }
    return 0;
}

inline std::string sci6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

inline json to_json(const AsymptoticReport& r) {
    return {{"beta_star", r.beta_star}, {"delta_g", r.delta_g}, {"c_weights", r.c_weights},
            {"sigma2", r.sigma2},       {"var_lse", r.var_lse}, {"var_mnr", r.var_mnr},
            {"n", r.n}};
}

struct Outputs {
    std::ostream& out;
    std::ostream& err;
};

/// Writes to `path`, or to `fallback` when the path is empty or "-".
template <class Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw UsageError("cannot write '" + path + "'");
    fn(file);
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Fundamental frequency estimation with the modified Newton-Raphson algorithm",
                 "fundfreq"};
    app.require_subcommand(1);

    // synth
    std::string synth_preset = "1", synth_model_file, synth_noise = "none", synth_out;
    std::size_t synth_n = 0;
    double synth_sigma2 = 1.0;
    std::uint64_t synth_seed = 0;
    std::optional<double> synth_rate;
    auto* synth = app.add_subcommand("synth", "Write a synthetic harmonic signal");
    synth->add_option("--preset", synth_preset, "Built-in model 1 or 2")->check(CLI::IsMember({"1", "2"}));
    synth->add_option("--model-file", synth_model_file, "JSON model file");
    synth->add_option("--n", synth_n, "Number of samples")->required()->check(CLI::PositiveNumber);
    synth->add_option("--noise", synth_noise, "none, iid or ma:<a0,a1,...>");
    synth->add_option("--sigma2", synth_sigma2, "Innovation variance")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "Random seed");
    synth->add_option("--sample-rate", synth_rate, "Sample rate metadata in Hz")->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out, "Output file (default stdout)");

    // estimate
    std::string est_input, est_column, est_init = "harmonic_sum", est_criterion = "joint",
                est_noise = "iid", est_residuals_out;
    std::size_t est_p = 0;
    MnrConfig est_config;
    bool est_json = false, est_mean_correct = false;
    std::optional<double> est_sigma2;
    auto* estimate = app.add_subcommand("estimate", "Estimate the fundamental frequency of a signal file");
    estimate->add_option("--input", est_input, "Signal file")->required();
    estimate->add_option("--column", est_column, "CSV column holding the samples");
    estimate->add_option("--p", est_p, "Number of harmonics")->required()->check(CLI::PositiveNumber);
    estimate->add_option("--tol", est_config.tol, "Iterate-difference tolerance")->check(CLI::PositiveNumber);
    estimate->add_option("--max-iter", est_config.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    estimate->add_option("--step-factor", est_config.step_factor, "Newton step factor")->check(CLI::Range(0.0, 1.0));
    estimate->add_option("--init-mode", est_init, "plain or harmonic_sum")
        ->check(CLI::IsMember({"plain", "harmonic_sum"}));
    estimate->add_option("--criterion", est_criterion, "joint or per_harmonic")
        ->check(CLI::IsMember({"joint", "per_harmonic"}));
    estimate->add_option("--subsample-exponent", est_config.subsample_exponent, "n1 = floor(n^exponent)")
        ->check(CLI::Range(0.0, 1.0));
    estimate->add_option("--init-oversample", est_config.init_oversample,
                         "Step-1 grid 2 pi k/(r n); 0 uses r = p, 1 is the Fourier grid");
    estimate->add_option("--subsample-start", est_config.subsample_start, "Offset of the first-step block");
    estimate->add_flag("--mean-correct", est_mean_correct, "Subtract the sample mean first");
    estimate->add_option("--noise", est_noise, "Noise model for the asymptotic variances: iid or ma:<coeffs>");
    estimate->add_option("--sigma2", est_sigma2, "Innovation variance (estimated from residuals if absent)")
        ->check(CLI::PositiveNumber);
    estimate->add_option("--residuals-out", est_residuals_out, "Write residuals, one per line");
    estimate->add_flag("--json", est_json, "Emit the JSON report");

    // periodogram
    std::string pg_input, pg_column, pg_out;
    std::size_t pg_p = 1;
    auto* pgram = app.add_subcommand("periodogram", "Periodogram and harmonic sum over the Fourier grid");
    pgram->add_option("--input", pg_input, "Signal file")->required();
    pgram->add_option("--column", pg_column, "CSV column holding the samples");
    pgram->add_option("--p", pg_p, "Number of harmonics")->check(CLI::PositiveNumber);
    pgram->add_option("--out", pg_out, "Output CSV (default stdout)");

    // simulate
    std::string sim_model = "1", sim_noise = "ma:1,0.5", sim_out, sim_criterion = "joint";
    std::vector<std::size_t> sim_n{100, 200, 400, 500, 1000};
    std::vector<double> sim_sigma2{0.01, 0.25, 0.75, 1.0};
    std::size_t sim_reps = 500;
    std::uint64_t sim_seed = 0;
    std::optional<unsigned> sim_threads;
    MnrConfig sim_config;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo replication of the estimator");
    simulate->add_option("--model", sim_model, "1, 2 or a JSON model file");
    simulate->add_option("--noise", sim_noise, "iid or ma:<a0,a1,...>");
    simulate->add_option("--n", sim_n, "Sample sizes")->delimiter(',')->check(CLI::PositiveNumber);
    simulate->add_option("--sigma2", sim_sigma2, "Innovation variances")->delimiter(',')->check(CLI::PositiveNumber);
    simulate->add_option("--reps", sim_reps, "Replications per cell")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_seed, "Master seed");
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    simulate->add_option("--criterion", sim_criterion, "joint or per_harmonic")
        ->check(CLI::IsMember({"joint", "per_harmonic"}));
    simulate->add_option("--step-factor", sim_config.step_factor, "Newton step factor")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--tol", sim_config.tol, "Iterate-difference tolerance")->check(CLI::PositiveNumber);
    simulate->add_option("--max-iter", sim_config.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    simulate->add_option("--init-oversample", sim_config.init_oversample,
                         "Step-1 grid 2 pi k/(r n); 0 uses r = p, 1 is the Fourier grid");
    simulate->add_option("--out", sim_out, "Output CSV (default stdout)");

    // asymvar
    std::string av_preset = "1", av_model_file, av_noise = "iid", av_format = "json";
    std::size_t av_n = 100;
    double av_sigma2 = 1.0;
    auto* asymvar = app.add_subcommand("asymvar", "Asymptotic variances of the LSE and MNR estimators");
    asymvar->add_option("--preset", av_preset, "Built-in model 1 or 2")->check(CLI::IsMember({"1", "2"}));
    asymvar->add_option("--model-file", av_model_file, "JSON model file");
    asymvar->add_option("--noise", av_noise, "iid or ma:<a0,a1,...>");
    asymvar->add_option("--sigma2", av_sigma2, "Innovation variance")->check(CLI::PositiveNumber);
    asymvar->add_option("--n", av_n, "Sample size")->check(CLI::PositiveNumber);
    asymvar->add_option("--format", av_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth) {
            const auto model = resolve_model(synth_preset, synth_model_file);
            const auto coeffs = parse_noise(synth_noise);
            std::optional<LinearProcessSpec> noise;
            if (coeffs) noise = LinearProcessSpec{*coeffs, synth_sigma2};
            auto y = synthesize(model, synth_n, noise, synth_seed);
            if (synth_rate) y = Signal({y.samples().begin(), y.samples().end()}, synth_rate);
            with_output(synth_out, out, [&](std::ostream& os) { write_signal_text(os, y); });
            return kExitOk;
        }

        if (*estimate) {
            auto y = read_signal(est_input, est_column.empty() ? std::nullopt
                                                               : std::optional<std::string>(est_column));
            if (est_mean_correct) y = mean_correct(y);
            est_config.init_mode = est_init == "plain" ? InitMode::plain : InitMode::harmonic_sum;
            est_config.criterion = est_criterion == "joint" ? Criterion::joint : Criterion::per_harmonic;
            const auto coeffs = parse_noise(est_noise).value_or(std::vector<double>{1.0});

            const auto fit = estimate_fundamental(y, est_p, est_config);
            const auto amps = lse_linear(y, fit.lambda_hat, est_p);
            const auto resid = residuals(y, fit.lambda_hat, amps);
            if (!est_residuals_out.empty())
                with_output(est_residuals_out, out, [&](std::ostream& os) { write_values(os, resid); });

            double rmean = 0.0, rvar = 0.0;
            for (double e : resid) rmean += e;
            rmean /= static_cast<double>(resid.size());
            for (double e : resid) rvar += (e - rmean) * (e - rmean);
            rvar /= static_cast<double>(resid.size());

            double ma_power = 0.0;
            for (double a : coeffs) ma_power += a * a;
            const double sigma2 = est_sigma2.value_or(rvar / ma_power);
            json asym = nullptr;
            try {
                asym = to_json(asymptotic_variances({fit.lambda_hat, amps}, {coeffs, sigma2}, y.size()));
                asym["sigma2_source"] = est_sigma2 ? "given" : "residuals";
            } catch (const DomainError& e) {
                err << "asymptotic variances unavailable: " << e.what() << '\n';
            }

            json amplitudes = json::array();
            for (const auto& a : amps) {
                const auto [rho, phi] = cartesian_to_polar(a);
                amplitudes.push_back({{"A", a.a}, {"B", a.b}, {"rho", rho}, {"phi", phi}});
            }
            json trace = json::array();
            for (const auto& r : fit.trace.records)
                trace.push_back({{"iteration", r.iteration}, {"lambda", r.lambda},
                                 {"sample_size", r.sample_size}, {"g_value", r.g_value},
                                 {"correction", r.correction}});
            json residual_summary = {{"n", resid.size()}, {"mean", rmean}, {"variance", rvar}};
            if (resid.size() > 5) {
                try {
                    residual_summary["acf"] = sample_acf(resid, 5);
                } catch (const NumericalError&) {
                    residual_summary["acf"] = nullptr;
                }
            }
            const json report = {
                {"lambda_hat", fit.lambda_hat},
                {"amplitudes", amplitudes},
                {"residual_summary", residual_summary},
                {"asym", asym},
                {"trace", trace},
                {"config",
                 {{"p", est_p},
                  {"step_factor", est_config.step_factor},
                  {"tol", est_config.tol},
                  {"max_iter", est_config.max_iter},
                  {"subsample_exponent", est_config.subsample_exponent},
                  {"subsample_start", est_config.subsample_start},
                  {"init_oversample", est_config.init_oversample == 0 ? est_p : est_config.init_oversample},
                  {"init_mode", std::string(to_string(est_config.init_mode))},
                  {"criterion", std::string(to_string(est_config.criterion))},
                  {"mean_correct", est_mean_correct},
                  {"termination", std::string(to_string(fit.trace.status))},
                  {"message", fit.trace.message}}},
            };

            if (est_json) {
                out << report.dump(2) << '\n';
            } else {
                char buf[128];
                std::snprintf(buf, sizeof buf, "lambda_hat %.12g  (%s after %zu iterates)\n",
                              fit.lambda_hat, std::string(to_string(fit.trace.status)).c_str(),
                              fit.trace.records.size());
                out << buf;
                for (std::size_t j = 0; j < amps.size(); ++j) {
                    std::snprintf(buf, sizeof buf, "  A%zu %.8g  B%zu %.8g\n", j + 1, amps[j].a,
                                  j + 1, amps[j].b);
                    out << buf;
                }
                if (!asym.is_null())
                    out << "  asym var LSE " << sci6(asym["var_lse"]) << "  MNR "
                        << sci6(asym["var_mnr"]) << '\n';
            }
            return is_failure(fit.trace.status) ? kExitFailure : kExitOk;
        }

        if (*pgram) {
            const auto y = read_signal(pg_input, pg_column.empty() ? std::nullopt
                                                                   : std::optional<std::string>(pg_column));
            with_output(pg_out, out, [&](std::ostream& os) {
                os << "lambda,I,Q_N\n";
                for (double lambda : fourier_grid(y.size(), pg_p))
                    os << sci6(lambda) << ',' << sci6(periodogram(y, lambda)) << ','
                       << sci6(harmonic_criterion_qn(y, lambda, pg_p)) << '\n';
            });
            return kExitOk;
        }

        if (*simulate) {
            ExperimentSpec spec;
            spec.model = resolve_model(sim_model, "");
            const auto coeffs = parse_noise(sim_noise);
            if (!coeffs) throw UsageError("simulation needs a noise model");
            spec.noise_coeffs = *coeffs;
            spec.sample_sizes = sim_n;
            spec.sigma2_values = sim_sigma2;
            spec.replications = sim_reps;
            spec.master_seed = sim_seed;
            spec.mnr_config = sim_config;
            spec.mnr_config.criterion =
                sim_criterion == "joint" ? Criterion::joint : Criterion::per_harmonic;
            const auto rows = run_experiment(spec, resolve_threads(sim_threads));
            for (const auto& r : rows)
                if (r.flagged())
                    err << "warning: n=" << r.n << " sigma2=" << r.sigma2 << ": " << r.failure_count
                        << " of " << r.replications << " replications failed\n";
            with_output(sim_out, out, [&](std::ostream& os) { write_summary_csv(os, rows); });
            return kExitOk;
        }

        if (*asymvar) {
            const auto model = resolve_model(av_preset, av_model_file);
            const auto coeffs = parse_noise(av_noise);
            if (!coeffs) throw UsageError("asymvar needs a noise model");
            const auto report = asymptotic_variances(model, {*coeffs, av_sigma2}, av_n);
            if (av_format == "json") {
                out << to_json(report).dump(2) << '\n';
            } else {
                out << "n,sigma2,beta_star,delta_g,asym_var_lse,asym_var_mnr\n"
                    << report.n << ',' << sci6(report.sigma2) << ',' << sci6(report.beta_star) << ','
                    << sci6(report.delta_g) << ',' << sci6(report.var_lse) << ','
                    << sci6(report.var_mnr) << '\n';
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace fundfreq::cli
