#pragma once

// Closed-form asymptotic variances of the least squares and modified Newton-Raphson
// estimators of the fundamental frequency. Values are per-observation variances of
// lambda_hat at sample size n, i.e. the limiting variance of n^{3/2}(lambda_hat - lambda)
// divided by n^3.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "fundfreq/signal.hpp"

namespace fundfreq {

struct AsymptoticReport {
    double beta_star = 0.0;         ///< sum j^2 (A_j^2 + B_j^2)
    double delta_g = 0.0;           ///< sum j^2 (A_j^2 + B_j^2) c(j)
    std::vector<double> c_weights;  ///< c(1..p)
    double sigma2 = 0.0;
    double var_lse = 0.0;
    double var_mnr = 0.0;
    std::size_t n = 0;
};

/// c(j) = |sum_k a(k) e^{-i j k lambda}|^2, the noise spectrum at j*lambda up to 2 pi / sigma^2.
inline double spectral_weight_c(const LinearProcessSpec& spec, std::size_t j, double lambda) {
    std::complex<double> sum = 0.0;
    const double omega = static_cast<double>(j) * lambda;
    for (std::size_t k = 0; k < spec.coeffs.size(); ++k)
        sum += spec.coeffs[k] * std::polar(1.0, -omega * static_cast<double>(k));
    return std::norm(sum);
}

inline AsymptoticReport asymptotic_variances(const HarmonicModel& model,
                                             const LinearProcessSpec& spec, std::size_t n) {
    model.validate();
    spec.validate();
    if (n == 0) throw DomainError("sample size must be positive");

    AsymptoticReport r;
    r.n = n;
    r.sigma2 = spec.sigma2;
    for (std::size_t j = 1; j <= model.harmonics(); ++j) {
        const double jj = static_cast<double>(j * j);
        const double weight = jj * model.amplitudes[j - 1].squared_norm();
        const double c = spectral_weight_c(spec, j, model.lambda);
        r.c_weights.push_back(c);
        r.beta_star += weight;
        r.delta_g += weight * c;
    }
    const double n3 = std::pow(static_cast<double>(n), 3);
    const double base = spec.sigma2 * r.delta_g / (r.beta_star * r.beta_star * n3);
    r.var_lse = 24.0 * base;
    r.var_mnr = 6.0 * base;
    return r;
}

}  // namespace fundfreq
