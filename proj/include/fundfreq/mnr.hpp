#pragma once

// Modified Newton-Raphson estimator of the fundamental frequency.
//
//   1. start from the best restricted Fourier frequency,
//   2. one step with a reduced step factor on a block of n^(6/7) consecutive samples,
//   3. repeated reduced steps on the full sample until the iterates settle.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "fundfreq/criterion.hpp"
#include "fundfreq/errors.hpp"
#include "fundfreq/signal.hpp"
#include "fundfreq/spectrum.hpp"

namespace fundfreq {

struct MnrConfig {
    double step_factor = 0.25;
    double tol = 1e-7;
    std::size_t max_iter = 50;
    double subsample_exponent = 6.0 / 7.0;
    std::size_t subsample_start = 0;
    InitMode init_mode = InitMode::harmonic_sum;
    Criterion criterion = Criterion::joint;
    /// Step 1 searches 2 pi k / (r n); 0 means r = p so harmonic p starts O(1/n) from its peak.
    std::size_t init_oversample = 0;

    void validate() const {
        if (!(step_factor > 0.0 && step_factor <= 1.0))
            throw DomainError("step factor must lie in (0, 1]");
        if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
        if (max_iter == 0) throw DomainError("max_iter must be positive");
        if (!(subsample_exponent > 0.0 && subsample_exponent <= 1.0))
            throw DomainError("subsample exponent must lie in (0, 1]");
    }
};

enum class StopReason {
    converged_tol,        ///< |lambda_{k+1} - lambda_k| < tol
    converged_objective,  ///< criterion failed to increase
    max_iter,
    boundary,    ///< a proposed iterate left (0, pi/p)
    degenerate,  ///< singular design or vanishing curvature
};

inline std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::converged_tol: return "converged_tol";
        case StopReason::converged_objective: return "converged_objective";
        case StopReason::max_iter: return "max_iter";
        case StopReason::boundary: return "boundary";
        case StopReason::degenerate: return "degenerate";
    }
    return "unknown";
}

inline bool is_failure(StopReason r) noexcept {
    return r == StopReason::boundary || r == StopReason::degenerate;
}

struct TraceRecord {
    std::size_t iteration = 0;
    double lambda = 0.0;
    std::size_t sample_size = 0;  ///< samples the step producing this iterate used
    double g_value = 0.0;         ///< full-sample criterion at `lambda`
    double correction = 0.0;      ///< lambda - previous lambda
};

struct EstimationTrace {
    std::vector<TraceRecord> records;
    StopReason status = StopReason::max_iter;
    std::string message;  ///< detail for boundary/degenerate stops
};

struct MnrResult {
    double lambda_hat = 0.0;
    EstimationTrace trace;
};

struct MnrStep {
    double lambda_next = 0.0;
    double correction = 0.0;
};

/// lambda - step_factor * g'(lambda) / g''(lambda).
inline MnrStep mnr_step(const Signal& signal, std::size_t p, double lambda, double step_factor,
                        Criterion criterion = Criterion::joint) {
    const auto d = criterion_derivatives(signal, p, lambda, criterion);

    // g'' scales like n^3 * amplitude^2 and sum y^2 like n * amplitude^2.
    const auto y = signal.samples();
    long double energy = 0.0L;
    for (double v : y) energy += static_cast<long double>(v) * v;
    const double n = static_cast<double>(y.size());
    const double threshold = 1e-12 * n * n * static_cast<double>(energy);
    if (!std::isfinite(d.second) || !(std::fabs(d.second) > threshold))
        throw CurvatureError("criterion curvature too small for a Newton step at lambda = " +
                             std::to_string(lambda));

    const double correction = -step_factor * (d.first / d.second);
    const double next = lambda + correction;
    if (!(next > 0.0 && static_cast<double>(p) * next < std::numbers::pi))
        throw BoundaryError("Newton step left (0, pi/p): proposed " + std::to_string(next), next);
    return {next, correction};
}

inline MnrResult estimate_fundamental(const Signal& signal, std::size_t p,
                                      const MnrConfig& config = {}) {
    config.validate();
    if (p == 0) throw DomainError("number of harmonics must be positive");
    const std::size_t n = signal.size();
    if (n < 10 * p) throw DomainError("estimation needs at least 10 samples per harmonic");

    const auto n1 = static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(n), config.subsample_exponent)));
    if (n1 == 0 || config.subsample_start + n1 > n)
        throw DomainError("subsample block exceeds the signal");

    MnrResult result;
    auto& trace = result.trace;
    const auto value_at = [&](double lambda) {
        return criterion_value(signal, p, lambda, config.criterion);
    };
    const auto best = [&] {
        const TraceRecord* top = &trace.records.front();
        for (const auto& r : trace.records)
            if (r.g_value > top->g_value) top = &r;
        return top->lambda;
    };

    const double start = fourier_grid_init(signal, p, config.init_mode,
                                           config.init_oversample == 0 ? p : config.init_oversample);
    trace.records.push_back({0, start, n, value_at(start), 0.0});

    try {
        const Signal block = signal.slice(config.subsample_start, n1);
        const auto first = mnr_step(block, p, start, config.step_factor, config.criterion);
        trace.records.push_back({1, first.lambda_next, n1, value_at(first.lambda_next),
                                 first.correction});

        trace.status = StopReason::max_iter;
        for (std::size_t k = 0; k < config.max_iter; ++k) {
            const auto& prev = trace.records.back();
            const auto step = mnr_step(signal, p, prev.lambda, config.step_factor,
                                       config.criterion);
            const TraceRecord next{prev.iteration + 1, step.lambda_next, n,
                                   value_at(step.lambda_next), step.correction};
            const bool settled = std::fabs(next.lambda - prev.lambda) < config.tol;
            const bool stalled = !(next.g_value > prev.g_value);
            trace.records.push_back(next);
            if (settled) {
                trace.status = StopReason::converged_tol;
                break;
            }
            if (stalled) {
                trace.status = StopReason::converged_objective;
                break;
            }
        }
    } catch (const BoundaryError& e) {
        trace.status = StopReason::boundary;
        trace.message = e.what();
    } catch (const NumericalError& e) {
        trace.status = StopReason::degenerate;
        trace.message = e.what();
    }

    result.lambda_hat = best();
    return result;
}

}  // namespace fundfreq
