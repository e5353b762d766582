#pragma once

// Deterministic Monte Carlo replication harness for the fundamental frequency estimator.
//
// Replication seeds: seed = mix(mix(mix(mix(master) ^ n) ^ bits(sigma2)) ^ rep), where mix
// is the SplitMix64 finalizer and bits() is the IEEE-754 bit pattern of the double. Seeds
// therefore depend only on the cell and replication index, never on scheduling.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "fundfreq/asymptotics.hpp"
#include "fundfreq/errors.hpp"
#include "fundfreq/mnr.hpp"
#include "fundfreq/signal.hpp"

namespace fundfreq {

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t replication_seed(std::uint64_t master, std::size_t n, double sigma2,
                                      std::size_t replication) noexcept {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ static_cast<std::uint64_t>(n));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(sigma2));
    return mix64(h ^ static_cast<std::uint64_t>(replication));
}

struct ExperimentSpec {
    HarmonicModel model;
    std::vector<double> noise_coeffs{1.0};  ///< a(0..q); {1} is i.i.d. noise
    std::vector<std::size_t> sample_sizes;
    std::vector<double> sigma2_values;
    std::size_t replications = 500;
    std::uint64_t master_seed = 0;
    MnrConfig mnr_config;

    void validate() const {
        model.validate();
        if (replications == 0) throw DomainError("replications must be positive");
        if (sample_sizes.empty() || sigma2_values.empty())
            throw DomainError("experiment needs at least one sample size and one variance");
        for (auto n : sample_sizes)
            if (n < 10 * model.harmonics())
                throw DomainError("sample size " + std::to_string(n) + " below 10 per harmonic");
        for (double s : sigma2_values) LinearProcessSpec{noise_coeffs, s}.validate();
        mnr_config.validate();
    }
};

struct SummaryRow {
    std::size_t n = 0;
    double sigma2 = 0.0;
    double mean_estimate = 0.0;
    double empirical_variance = 0.0;  ///< unbiased (m - 1) sample variance over successes
    double asym_var_lse = 0.0;
    double asym_var_mnr = 0.0;
    std::size_t failure_count = 0;
    std::size_t replications = 0;

    /// More than 10% of the replications failed.
    bool flagged() const noexcept { return failure_count * 10 > replications; }
};

/// Runs every (n, sigma2) cell. `threads` = 0 uses the hardware concurrency.
inline std::vector<SummaryRow> run_experiment(const ExperimentSpec& spec, unsigned threads = 1) {
    spec.validate();
    struct Cell {
        std::size_t n;
        double sigma2;
    };
    std::vector<Cell> cells;
    for (auto n : spec.sample_sizes)
        for (double s : spec.sigma2_values) cells.push_back({n, s});

    const std::size_t reps = spec.replications;
    const std::size_t total = cells.size() * reps;
    std::vector<double> estimates(total, 0.0);
    std::vector<char> failed(total, 0);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
        for (std::size_t task = next++; task < total; task = next++) {
            const auto& cell = cells[task / reps];
            const std::size_t rep = task % reps;
            try {
                const LinearProcessSpec noise{spec.noise_coeffs, cell.sigma2};
                const auto y = synthesize(spec.model, cell.n, noise,
                                          replication_seed(spec.master_seed, cell.n, cell.sigma2, rep));
                const auto fit = estimate_fundamental(y, spec.model.harmonics(), spec.mnr_config);
                estimates[task] = fit.lambda_hat;
                failed[task] = is_failure(fit.trace.status) ? 1 : 0;
            } catch (const NumericalError&) {
                failed[task] = 1;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    std::vector<SummaryRow> rows;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        SummaryRow row;
        row.n = cells[c].n;
        row.sigma2 = cells[c].sigma2;
        row.replications = reps;

        double sum = 0.0;
        std::size_t ok = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const std::size_t i = c * reps + r;
            if (failed[i]) {
                ++row.failure_count;
                continue;
            }
            sum += estimates[i];
            ++ok;
        }
        if (ok > 0) {
            row.mean_estimate = sum / static_cast<double>(ok);
            double ss = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const std::size_t i = c * reps + r;
                if (failed[i]) continue;
                const double d = estimates[i] - row.mean_estimate;
                ss += d * d;
            }
            row.empirical_variance = ok > 1 ? ss / static_cast<double>(ok - 1) : 0.0;
        } else {
            row.mean_estimate = std::nan("");
            row.empirical_variance = std::nan("");
        }

        const auto asym = asymptotic_variances(spec.model, {spec.noise_coeffs, cells[c].sigma2}, row.n);
        row.asym_var_lse = asym.var_lse;
        row.asym_var_mnr = asym.var_mnr;
        rows.push_back(row);
    }
    return rows;
}

/// CSV header and rows; numbers in scientific notation with 6 significant digits.
inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "n,sigma2,average,variance,asym_var_lse,asym_var_mnr,failures\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.5e,%.5e,%.5e,%.5e,%.5e,%zu\n", r.n, r.sigma2,
                      r.mean_estimate, r.empirical_variance, r.asym_var_lse, r.asym_var_mnr,
                      r.failure_count);
        out << buf;
    }
}

}  // namespace fundfreq
