#pragma once

// Test-only reference computations. These deliberately avoid the library's moment
// algebra: designs are materialized explicitly and solved with Householder QR, and
// derivatives are taken by finite differences.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fundfreq/signal.hpp"

namespace oracle {

using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

inline Vector observations(const fundfreq::Signal& y) {
    Vector v(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) v(static_cast<Eigen::Index>(i)) = y[i];
    return v;
}

/// n x (2 * harmonics.size()) design with columns cos(j lambda t), sin(j lambda t).
inline Matrix design(std::size_t n, long double lambda, const std::vector<std::size_t>& harmonics) {
    Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(2 * harmonics.size()));
    for (std::size_t t = 1; t <= n; ++t)
        for (std::size_t c = 0; c < harmonics.size(); ++c) {
            const long double phase = static_cast<long double>(harmonics[c]) * lambda * t;
            x(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(2 * c)) = std::cos(phase);
            x(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(2 * c + 1)) = std::sin(phase);
        }
    return x;
}

/// ||P_X Y||^2 through a QR factorization of the explicit design.
inline long double projection_norm(const fundfreq::Signal& y, long double lambda,
                                   const std::vector<std::size_t>& harmonics) {
    const Matrix x = design(y.size(), lambda, harmonics);
    const Eigen::HouseholderQR<Matrix> qr(x);
    const Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
    const Vector coords = q.transpose() * observations(y);
    return coords.squaredNorm();
}

inline long double r_j(const fundfreq::Signal& y, std::size_t j, long double lambda) {
    return projection_norm(y, lambda, {j});
}

inline long double g_per_harmonic(const fundfreq::Signal& y, std::size_t p, long double lambda) {
    long double total = 0;
    for (std::size_t j = 1; j <= p; ++j) total += r_j(y, j, lambda);
    return total;
}

inline long double g_joint(const fundfreq::Signal& y, std::size_t p, long double lambda) {
    std::vector<std::size_t> hs;
    for (std::size_t j = 1; j <= p; ++j) hs.push_back(j);
    return projection_norm(y, lambda, hs);
}

/// Least squares coefficients of the explicit design.
inline Vector least_squares(const fundfreq::Signal& y, long double lambda,
                            const std::vector<std::size_t>& harmonics) {
    return design(y.size(), lambda, harmonics).householderQr().solve(observations(y));
}

/// Direct DFT magnitude |sum_t y(t) e^{-i w t}|^2 / n.
inline long double dft_power(const fundfreq::Signal& y, long double w) {
    std::complex<long double> s = 0;
    for (std::size_t t = 1; t <= y.size(); ++t)
        s += static_cast<long double>(y[t - 1]) * std::polar(1.0L, -w * static_cast<long double>(t));
    return std::norm(s) / static_cast<long double>(y.size());
}

using Fn = std::function<long double(long double)>;

inline long double central_first(const Fn& f, long double x, long double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

inline long double central_second(const Fn& f, long double x, long double h) {
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

inline double beta_star(const fundfreq::HarmonicModel& m) {
    double b = 0;
    int j = 1;
    for (const auto& a : m.amplitudes) {
        b += j * j * (a.a * a.a + a.b * a.b);
        ++j;
    }
    return b;
}

inline double relative_error(double a, double b) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace oracle
