#pragma once

// Harmonic signal model, synthetic data generation and small preprocessing helpers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fundfreq/errors.hpp"

namespace fundfreq {

/// Cosine/sine amplitude pair of one harmonic: A cos(j lambda t) + B sin(j lambda t).
struct Amplitude {
    double a = 0.0;
    double b = 0.0;

    double squared_norm() const noexcept { return a * a + b * b; }
    friend bool operator==(const Amplitude&, const Amplitude&) = default;
};

/// Fundamental frequency model: p harmonics of lambda (radians per sample).
struct HarmonicModel {
    double lambda = 0.0;
    std::vector<Amplitude> amplitudes;

    std::size_t harmonics() const noexcept { return amplitudes.size(); }

    /// Throws DomainError unless p >= 1, 0 < lambda < pi/p and every harmonic is nonzero.
    void validate() const {
        const auto p = harmonics();
        if (p == 0) throw DomainError("harmonic model needs at least one harmonic");
        if (!(lambda > 0.0) || !(lambda < std::numbers::pi / static_cast<double>(p)))
            throw DomainError("fundamental frequency must lie in (0, pi/p), got " +
                              std::to_string(lambda));
        for (const auto& amp : amplitudes) {
            if (!std::isfinite(amp.a) || !std::isfinite(amp.b))
                throw DomainError("amplitudes must be finite");
            if (!(amp.squared_norm() > 0.0))
                throw DomainError("every harmonic needs a nonzero amplitude");
        }
    }

    /// Noise-free value at time index t (1-based).
    double evaluate(std::size_t t) const noexcept {
        double value = 0.0;
        const double tt = static_cast<double>(t);
        for (std::size_t j = 0; j < amplitudes.size(); ++j) {
            const double phase = static_cast<double>(j + 1) * lambda * tt;
            value += amplitudes[j].a * std::cos(phase) + amplitudes[j].b * std::sin(phase);
        }
        return value;
    }
};

/// Observed series y(1..n). Index 0 of `samples()` holds y(1).
class Signal {
public:
    explicit Signal(std::vector<double> samples, std::optional<double> sample_rate = std::nullopt)
        : samples_(std::move(samples)), sample_rate_(sample_rate) {
        if (samples_.empty()) throw DomainError("signal must contain at least one sample");
        for (double v : samples_)
            if (!std::isfinite(v)) throw DomainError("signal samples must be finite");
        if (sample_rate_ && !(*sample_rate_ > 0.0 && std::isfinite(*sample_rate_)))
            throw DomainError("sample rate must be positive");
    }

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    std::optional<double> sample_rate() const noexcept { return sample_rate_; }

    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Consecutive block of `count` samples starting at zero-based `offset`, re-indexed from t = 1.
    Signal slice(std::size_t offset, std::size_t count) const {
        if (count == 0 || offset + count > samples_.size())
            throw DomainError("slice exceeds signal length");
        return Signal({samples_.begin() + static_cast<std::ptrdiff_t>(offset),
                       samples_.begin() + static_cast<std::ptrdiff_t>(offset + count)},
                      sample_rate_);
    }

    Signal scaled(double c) const {
        auto out = samples_;
        for (double& v : out) v *= c;
        return Signal(std::move(out), sample_rate_);
    }

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> samples_;
    std::optional<double> sample_rate_;
};

/// Finite moving-average noise e(t) = sum_k a(k) eps(t-k), eps i.i.d. N(0, sigma2).
struct LinearProcessSpec {
    std::vector<double> coeffs{1.0};
    double sigma2 = 1.0;

    static LinearProcessSpec iid(double sigma2) { return {{1.0}, sigma2}; }

    void validate() const {
        if (coeffs.empty()) throw DomainError("linear process needs at least one coefficient");
        for (double c : coeffs)
            if (!std::isfinite(c)) throw DomainError("linear process coefficients must be finite");
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
            throw DomainError("innovation variance must be positive");
    }

    /// Marginal variance sigma2 * sum a(k)^2.
    double variance() const noexcept {
        return sigma2 * std::inner_product(coeffs.begin(), coeffs.end(), coeffs.begin(), 0.0);
    }
};

/// Draws n values of the linear process. q = coeffs.size()-1 innovations are burned in
/// before t = 1 so that e(1) already has its full moving-average history.
inline std::vector<double> generate_linear_process(const LinearProcessSpec& spec, std::size_t n,
                                                   std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw DomainError("sample size must be positive");
    const std::size_t q = spec.coeffs.size() - 1;

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> innovation(0.0, std::sqrt(spec.sigma2));
    std::vector<double> eps(n + q);
    for (double& v : eps) v = innovation(engine);

    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        // eps[t + q] is eps(t+1); eps[t + q - k] is eps(t+1-k).
        double acc = 0.0;
        for (std::size_t k = 0; k <= q; ++k) acc += spec.coeffs[k] * eps[t + q - k];
        out[t] = acc;
    }
    return out;
}

inline Signal synthesize(const HarmonicModel& model, std::size_t n,
                         const std::optional<LinearProcessSpec>& noise, std::uint64_t seed) {
    model.validate();
    if (n == 0) throw DomainError("sample size must be positive");
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) y[t] = model.evaluate(t + 1);
    if (noise) {
        const auto e = generate_linear_process(*noise, n, seed);
        for (std::size_t t = 0; t < n; ++t) y[t] += e[t];
    }
    return Signal(std::move(y));
}

inline Signal mean_correct(const Signal& signal) {
    const auto s = signal.samples();
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    std::vector<double> out(s.begin(), s.end());
    for (double& v : out) v -= mean;
    return Signal(std::move(out), signal.sample_rate());
}

/// rho cos(t j lambda - phi) == A cos(j lambda t) + B sin(j lambda t).
inline Amplitude polar_to_cartesian(double rho, double phi) noexcept {
    return {rho * std::cos(phi), -rho * std::sin(phi)};
}

/// Inverse of polar_to_cartesian; returns (rho, phi) with phi in (-pi, pi].
inline std::pair<double, double> cartesian_to_polar(const Amplitude& amp) noexcept {
    return {std::hypot(amp.a, amp.b), std::atan2(-amp.b, amp.a)};
}

namespace presets {

inline HarmonicModel model1() {
    return {0.25, {{5.0, 3.0}, {4.0, 2.5}, {3.0, 2.25}, {2.0, 2.0}}};
}

inline HarmonicModel model2() {
    return {0.3141, {{4.0, 2.0}, {3.0, 1.5}, {2.0, 1.25}, {1.0, 1.0}}};
}

/// e(t) = eps(t) + 0.5 eps(t-1).
inline LinearProcessSpec ma1(double sigma2) { return {{1.0, 0.5}, sigma2}; }

}  // namespace presets

}  // namespace fundfreq
