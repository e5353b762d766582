#pragma once

// Concentrated least-squares criteria for the fundamental frequency and their analytic
// derivatives.
//
// For a design X(lambda) with u = X^T Y and M = X^T X the criterion is R = u^T M^{-1} u.
// Every column pair of X is (cos(k lambda t), sin(k lambda t)), so
//
//   dX/dlambda   = diag(t) X K,      K  = blockdiag(k E),   E = [0 1; -1 0]
//   d2X/dlambda2 = -diag(t^2) X J2,  J2 = blockdiag(k^2 I)
//
// and all derivatives reduce to the weighted moments S_m = sum t^m x_t x_t^T and
// w_m = sum t^m y(t) x_t for m = 0, 1, 2. No n-by-n or n-by-2p matrix is formed.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fundfreq/errors.hpp"
#include "fundfreq/signal.hpp"

namespace fundfreq {

using Real = long double;
using Mat2 = Eigen::Matrix<Real, 2, 2>;
using Vec2 = Eigen::Matrix<Real, 2, 1>;
using MatX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Which concentrated criterion is maximized.
enum class Criterion {
    /// g(lambda) = sum_j Y^T X_j (X_j^T X_j)^{-1} X_j^T Y, one 2x2 projection per harmonic.
    per_harmonic,
    /// Y^T X (X^T X)^{-1} X^T Y with the full 2p-column design; maximized exactly at the
    /// true frequency for noise-free data.
    joint,
};

inline std::string_view to_string(Criterion c) noexcept {
    return c == Criterion::joint ? "joint" : "per_harmonic";
}

/// Exchange matrix E with E E = -I.
inline Mat2 exchange_matrix() {
    Mat2 e;
    e << 0, 1, -1, 0;
    return e;
}

/// Moment blocks of harmonic j at frequency lambda. D_j = diag(j, 2j, ..., nj).
struct HarmonicDesignMoments {
    Mat2 m_xx = Mat2::Zero();    ///< X_j^T X_j
    Mat2 m_xdx = Mat2::Zero();   ///< X_j^T D_j X_j
    Mat2 m_xd2x = Mat2::Zero();  ///< X_j^T D_j^2 X_j
    Vec2 v_xy = Vec2::Zero();    ///< X_j^T Y
    Vec2 v_dxy = Vec2::Zero();   ///< X_j^T D_j Y
    Vec2 v_d2xy = Vec2::Zero();  ///< X_j^T D_j^2 Y
    std::size_t n = 0;
};

struct CriterionDerivatives {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

namespace detail {

inline void require_harmonic_range(std::size_t j, double lambda) {
    if (j == 0) throw DomainError("harmonic index must be positive");
    const double omega = static_cast<double>(j) * lambda;
    if (!(omega > 0.0 && omega < std::numbers::pi))
        throw DomainError("harmonic frequency j*lambda must lie in (0, pi), got " +
                          std::to_string(omega));
}

inline void require_fundamental_range(std::size_t p, double lambda) {
    if (p == 0) throw DomainError("number of harmonics must be positive");
    if (!(lambda > 0.0 && static_cast<double>(p) * lambda < std::numbers::pi))
        throw DomainError("fundamental frequency must lie in (0, pi/p), got " +
                          std::to_string(lambda));
}

inline void require_regular(const Mat2& m_xx, std::size_t n, std::size_t j) {
    const Real nn = static_cast<Real>(n);
    if (!(std::fabs(m_xx.determinant()) >= 1e-10L * nn * nn))
        throw DegenerateFrequencyError("X^T X is singular for harmonic " + std::to_string(j) +
                                       " (frequency too close to 0 or pi)");
}

/// Value, first and second derivative of u^T M^{-1} u from the moment blocks.
template <class Mat, class Vec, class Solver>
CriterionDerivatives projection_derivatives(const Solver& m_inv, const Mat& s1, const Mat& s2,
                                            const Vec& w0, const Vec& w1, const Vec& w2,
                                            const Mat& k, const Mat& j2) {
    const Vec a = m_inv.solve(w0);
    const Vec du = k.transpose() * w1;
    const Vec d2u = -(j2 * w2);
    const Mat dm = k.transpose() * s1 + s1 * k;
    const Mat d2m = -(j2 * s2) - s2 * j2 + Real(2) * (k.transpose() * s2 * k);
    const Vec b = m_inv.solve(du);
    const Vec dma = dm * a;
    const Vec c = m_inv.solve(dma);

    const Real value = w0.dot(a);
    const Real first = Real(2) * du.dot(a) - a.dot(dma);
    const Real second = Real(2) * d2u.dot(a) + Real(2) * du.dot(b) - Real(4) * b.dot(dma) +
                        Real(2) * dma.dot(c) - a.dot(d2m * a);
    return {static_cast<double>(value), static_cast<double>(first), static_cast<double>(second)};
}

}  // namespace detail

/// All six blocks by direct O(n) summation in extended precision.
inline HarmonicDesignMoments compute_moments(const Signal& signal, std::size_t j, double lambda) {
    detail::require_harmonic_range(j, lambda);
    const double omega = static_cast<double>(j) * lambda;
    const Real jr = static_cast<Real>(j);

    Real cc[3] = {0, 0, 0}, cs[3] = {0, 0, 0}, ss[3] = {0, 0, 0};
    Real yc[3] = {0, 0, 0}, ys[3] = {0, 0, 0};
    const auto y = signal.samples();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i + 1);
        const Real c = std::cos(omega * t);
        const Real s = std::sin(omega * t);
        const Real yt = y[i];
        Real w = 1;
        const Real d = jr * static_cast<Real>(t);
        for (int m = 0; m < 3; ++m) {
            cc[m] += w * c * c;
            cs[m] += w * c * s;
            ss[m] += w * s * s;
            yc[m] += w * yt * c;
            ys[m] += w * yt * s;
            w *= d;
        }
    }

    HarmonicDesignMoments out;
    out.n = y.size();
    out.m_xx << cc[0], cs[0], cs[0], ss[0];
    out.m_xdx << cc[1], cs[1], cs[1], ss[1];
    out.m_xd2x << cc[2], cs[2], cs[2], ss[2];
    out.v_xy << yc[0], ys[0];
    out.v_dxy << yc[1], ys[1];
    out.v_d2xy << yc[2], ys[2];
    return out;
}

/// R_j and its first two derivatives from one harmonic's moments.
inline CriterionDerivatives harmonic_derivatives(const HarmonicDesignMoments& m, std::size_t j) {
    detail::require_regular(m.m_xx, m.n, j);
    const Eigen::LDLT<Mat2> m_inv(m.m_xx);
    return detail::projection_derivatives(m_inv, m.m_xdx, m.m_xd2x, m.v_xy, m.v_dxy, m.v_d2xy,
                                          Mat2(exchange_matrix()), Mat2(Mat2::Identity()));
}

/// R_j(lambda) = Y^T X_j (X_j^T X_j)^{-1} X_j^T Y.
inline double r_j(const Signal& signal, std::size_t j, double lambda) {
    const auto m = compute_moments(signal, j, lambda);
    detail::require_regular(m.m_xx, m.n, j);
    const Vec2 a = m.m_xx.ldlt().solve(m.v_xy);
    // Clamp tiny negative rounding; the quadratic form is a projection norm.
    return std::max(0.0, static_cast<double>(m.v_xy.dot(a)));
}

/// g(lambda) = sum_{j=1..p} R_j(lambda).
inline double g(const Signal& signal, std::size_t p, double lambda) {
    detail::require_fundamental_range(p, lambda);
    double total = 0.0;
    for (std::size_t j = 1; j <= p; ++j) total += r_j(signal, j, lambda);
    return total;
}

/// (g, g', g'') for the per-harmonic criterion, summed over j in index order.
inline CriterionDerivatives g_derivatives(const Signal& signal, std::size_t p, double lambda) {
    detail::require_fundamental_range(p, lambda);
    CriterionDerivatives total;
    for (std::size_t j = 1; j <= p; ++j) {
        const auto d = harmonic_derivatives(compute_moments(signal, j, lambda), j);
        total.value += d.value;
        total.first += d.first;
        total.second += d.second;
    }
    return total;
}

/// Moments of the full 2p-column design: S_m = sum t^m x_t x_t^T, w_m = sum t^m y(t) x_t.
struct JointDesignMoments {
    MatX s0, s1, s2;
    VecX w0, w1, w2;
    std::size_t n = 0;
    std::size_t p = 0;
};

inline JointDesignMoments compute_joint_moments(const Signal& signal, std::size_t p, double lambda,
                                                int max_order = 2) {
    detail::require_fundamental_range(p, lambda);
    const auto dim = static_cast<Eigen::Index>(2 * p);
    JointDesignMoments out;
    out.n = signal.size();
    out.p = p;
    MatX* s[3] = {&out.s0, &out.s1, &out.s2};
    VecX* w[3] = {&out.w0, &out.w1, &out.w2};
    for (int m = 0; m < 3; ++m) {
        *s[m] = MatX::Zero(dim, dim);
        *w[m] = VecX::Zero(dim);
    }

    VecX x(dim);
    const auto y = signal.samples();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = static_cast<double>(i + 1);
        for (std::size_t k = 0; k < p; ++k) {
            const double phase = static_cast<double>(k + 1) * lambda * t;
            x(static_cast<Eigen::Index>(2 * k)) = std::cos(phase);
            x(static_cast<Eigen::Index>(2 * k + 1)) = std::sin(phase);
        }
        Real weight = 1;
        for (int m = 0; m <= max_order; ++m) {
            s[m]->selfadjointView<Eigen::Lower>().rankUpdate(x, weight);
            w[m]->noalias() += (weight * static_cast<Real>(y[i])) * x;
            weight *= static_cast<Real>(t);
        }
    }
    for (int m = 0; m <= max_order; ++m)
        *s[m] = s[m]->selfadjointView<Eigen::Lower>();
    return out;
}

namespace detail {

inline void require_regular(const JointDesignMoments& m) {
    for (std::size_t k = 0; k < m.p; ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        require_regular(Mat2(m.s0.block(i, i, 2, 2)), m.n, k + 1);
    }
}

}  // namespace detail

/// Y^T X (X^T X)^{-1} X^T Y for the joint 2p-column harmonic design.
inline double g_joint(const Signal& signal, std::size_t p, double lambda) {
    const auto m = compute_joint_moments(signal, p, lambda, 0);
    detail::require_regular(m);
    const Eigen::LDLT<MatX> m_inv(m.s0);
    if (m_inv.info() != Eigen::Success || m_inv.rcond() < 1e-13L)
        throw DegenerateFrequencyError("joint harmonic design is rank deficient");
    return std::max(0.0, static_cast<double>(m.w0.dot(m_inv.solve(m.w0))));
}

inline CriterionDerivatives g_joint_derivatives(const Signal& signal, std::size_t p,
                                                double lambda) {
    const auto m = compute_joint_moments(signal, p, lambda);
    detail::require_regular(m);
    const Eigen::LDLT<MatX> m_inv(m.s0);
    if (m_inv.info() != Eigen::Success || m_inv.rcond() < 1e-13L)
        throw DegenerateFrequencyError("joint harmonic design is rank deficient");

    const auto dim = static_cast<Eigen::Index>(2 * p);
    MatX k = MatX::Zero(dim, dim);
    MatX j2 = MatX::Zero(dim, dim);
    for (std::size_t h = 0; h < p; ++h) {
        const auto i = static_cast<Eigen::Index>(2 * h);
        const Real jr = static_cast<Real>(h + 1);
        k.block(i, i, 2, 2) = jr * exchange_matrix();
        j2.block(i, i, 2, 2) = jr * jr * Mat2::Identity();
    }
    return detail::projection_derivatives(m_inv, m.s1, m.s2, m.w0, m.w1, m.w2, k, j2);
}

inline double criterion_value(const Signal& signal, std::size_t p, double lambda, Criterion c) {
    return c == Criterion::joint ? g_joint(signal, p, lambda) : g(signal, p, lambda);
}

inline CriterionDerivatives criterion_derivatives(const Signal& signal, std::size_t p,
                                                  double lambda, Criterion c) {
    return c == Criterion::joint ? g_joint_derivatives(signal, p, lambda)
                                 : g_derivatives(signal, p, lambda);
}

}  // namespace fundfreq
