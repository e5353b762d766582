#pragma once

// Amplitude recovery at a given fundamental frequency and residual diagnostics.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fundfreq/criterion.hpp"
#include "fundfreq/errors.hpp"
#include "fundfreq/signal.hpp"

namespace fundfreq {

enum class LseMode {
    joint,         ///< solve the full 2p x 2p normal equations
    per_harmonic,  ///< solve each harmonic's 2x2 system, ignoring cross-harmonic terms
};

/// Least squares amplitudes (A_j, B_j) at frequency lambda_hat.
inline std::vector<Amplitude> lse_linear(const Signal& signal, double lambda_hat, std::size_t p,
                                         LseMode mode = LseMode::joint) {
    detail::require_fundamental_range(p, lambda_hat);
    std::vector<Amplitude> out(p);
    if (mode == LseMode::per_harmonic) {
        for (std::size_t j = 1; j <= p; ++j) {
            const auto m = compute_moments(signal, j, lambda_hat);
            detail::require_regular(m.m_xx, m.n, j);
            const Vec2 theta = m.m_xx.ldlt().solve(m.v_xy);
            out[j - 1] = {static_cast<double>(theta(0)), static_cast<double>(theta(1))};
        }
        return out;
    }

    const auto m = compute_joint_moments(signal, p, lambda_hat, 0);
    detail::require_regular(m);
    const Eigen::LDLT<MatX> solver(m.s0);
    if (solver.info() != Eigen::Success || solver.rcond() < 1e-13L)
        throw DegenerateFrequencyError("joint harmonic design is rank deficient");
    const VecX theta = solver.solve(m.w0);
    for (std::size_t j = 0; j < p; ++j)
        out[j] = {static_cast<double>(theta(static_cast<Eigen::Index>(2 * j))),
                  static_cast<double>(theta(static_cast<Eigen::Index>(2 * j + 1)))};
    return out;
}

/// A_j = (2/n) sum y(t) cos(j lambda t), B_j = (2/n) sum y(t) sin(j lambda t).
inline std::vector<Amplitude> alse_linear(const Signal& signal, double lambda_hat, std::size_t p) {
    detail::require_fundamental_range(p, lambda_hat);
    const auto y = signal.samples();
    const long double scale = 2.0L / static_cast<long double>(y.size());
    std::vector<Amplitude> out(p);
    for (std::size_t j = 1; j <= p; ++j) {
        long double sc = 0.0L, ss = 0.0L;
        const double omega = static_cast<double>(j) * lambda_hat;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double phase = omega * static_cast<double>(i + 1);
            sc += static_cast<long double>(y[i]) * std::cos(phase);
            ss += static_cast<long double>(y[i]) * std::sin(phase);
        }
        out[j - 1] = {static_cast<double>(scale * sc), static_cast<double>(scale * ss)};
    }
    return out;
}

/// y(t) minus the fitted harmonic sum.
inline std::vector<double> residuals(const Signal& signal, double lambda_hat,
                                     std::span<const Amplitude> amplitudes) {
    const HarmonicModel fit{lambda_hat, {amplitudes.begin(), amplitudes.end()}};
    const auto y = signal.samples();
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - fit.evaluate(i + 1);
    return out;
}

/// Sample autocorrelation r_0..r_max_lag with the divide-by-n covariance convention.
inline std::vector<double> sample_acf(std::span<const double> series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (max_lag >= n) throw DomainError("max_lag must be smaller than the series length");
    const long double mean =
        std::accumulate(series.begin(), series.end(), 0.0L) / static_cast<long double>(n);

    std::vector<long double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;
    long double c0 = 0.0L;
    for (auto v : centered) c0 += v * v;
    if (!(c0 > 0.0L)) throw NumericalError("autocorrelation undefined for a constant series");

    std::vector<double> acf(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        long double ck = 0.0L;
        for (std::size_t i = 0; i + k < n; ++i) ck += centered[i] * centered[i + k];
        acf[k] = static_cast<double>(ck / c0);
    }
    acf[0] = 1.0;
    return acf;
}

}  // namespace fundfreq
