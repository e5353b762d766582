#pragma once

// Periodogram, harmonic periodogram sum and the coarse Fourier-grid initializer.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string_view>
#include <vector>

#include "fundfreq/errors.hpp"
#include "fundfreq/signal.hpp"

namespace fundfreq {

enum class InitMode {
    plain,         ///< maximize the periodogram I(lambda)
    harmonic_sum,  ///< maximize Q_N(lambda) = sum_j |(1/n) sum_t y(t) e^{i t j lambda}|^2
};

inline std::string_view to_string(InitMode mode) noexcept {
    return mode == InitMode::plain ? "plain" : "harmonic_sum";
}

namespace detail {

/// sum_t y(t) e^{-i omega t}, t = 1..n, accumulated in long double.
inline std::complex<long double> fourier_sum(const Signal& signal, double omega) {
    long double re = 0.0L;
    long double im = 0.0L;
    const auto y = signal.samples();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double phase = omega * static_cast<double>(i + 1);
        re += static_cast<long double>(y[i]) * std::cos(phase);
        im -= static_cast<long double>(y[i]) * std::sin(phase);
    }
    return {re, im};
}

}  // namespace detail

/// I(lambda) = (1/n) |sum_t y(t) e^{-i lambda t}|^2.
inline double periodogram(const Signal& signal, double lambda) {
    if (!(lambda > 0.0 && lambda < std::numbers::pi))
        throw DomainError("periodogram frequency must lie in (0, pi)");
    const auto s = detail::fourier_sum(signal, lambda);
    return static_cast<double>(std::norm(s) / static_cast<long double>(signal.size()));
}

inline double harmonic_criterion_qn(const Signal& signal, double lambda, std::size_t p) {
    if (p == 0) throw DomainError("number of harmonics must be positive");
    if (!(lambda > 0.0) || !(static_cast<double>(p) * lambda < std::numbers::pi))
        throw DomainError("harmonic frequencies j*lambda must lie in (0, pi)");
    const long double n = static_cast<long double>(signal.size());
    long double total = 0.0L;
    for (std::size_t j = 1; j <= p; ++j) {
        // |conj(z)| == |z|, so the sign convention of the exponent does not matter.
        const auto s = detail::fourier_sum(signal, static_cast<double>(j) * lambda);
        total += std::norm(s) / (n * n);
    }
    return static_cast<double>(total);
}

/// Fourier frequencies 2 pi k / n with k >= 1 and 2 pi k / n < pi / p strictly.
/// Grid 2 pi k / (r n) inside (0, pi/p). r = 1 gives the Fourier frequencies.
inline std::vector<double> fourier_grid(std::size_t n, std::size_t p, std::size_t oversample = 1) {
    std::vector<double> grid;
    if (n == 0 || p == 0 || oversample == 0) return grid;
    const std::size_t m = n * oversample;
    // 2 pi k / m < pi / p  <=>  2 k p < m
    for (std::size_t k = 1; 2 * k * p < m; ++k)
        grid.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
    return grid;
}

/// Argmax over the restricted grid. Ties go to the smaller frequency.
inline double fourier_grid_init(const Signal& signal, std::size_t p,
                                InitMode mode = InitMode::harmonic_sum, std::size_t oversample = 1) {
    if (p == 0) throw DomainError("number of harmonics must be positive");
    if (oversample == 0) throw DomainError("grid oversampling factor must be positive");
    const auto grid = fourier_grid(signal.size(), p, oversample);
    if (grid.empty())
        throw DomainError("no Fourier frequency inside (0, pi/p); sample too short for p harmonics");

    double best_lambda = grid.front();
    double best_value = -1.0;
    for (double lambda : grid) {
        const double value = mode == InitMode::plain ? periodogram(signal, lambda)
                                                     : harmonic_criterion_qn(signal, lambda, p);
        if (value > best_value) {
            best_value = value;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

}  // namespace fundfreq
