#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "stlfalsify/samplers/truncated_normal.hpp"

namespace stlf {

inline constexpr double kGpJitter = 1e-8;
inline constexpr int kGibbsSweeps = 200;

/// K_ij = variance * exp(-(t_i - t_j)^2 / (2 length^2)) on t_i = i * dt.
inline Eigen::MatrixXd se_kernel(std::size_t m, double dt, double variance, double length) {
    if (!(variance > 0) || !(length > 0)) throw std::invalid_argument("SE kernel needs positive variance and length");
    Eigen::MatrixXd k(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double d = (static_cast<double>(i) - static_cast<double>(j)) * dt;
            k(i, j) = variance * std::exp(-d * d / (2 * length * length));
        }
    return k;
}

/// Lower Cholesky factor of cov + jitter*I; the jitter grows tenfold until the factorization succeeds.
inline Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& cov, double jitter) {
    Eigen::MatrixXd a = cov;
    a.diagonal().array() += jitter;
    double add = jitter;
    for (int k = 0; k < 12; ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd l = llt.matrixL();
            if (l.allFinite()) return l;
        }
        a.diagonal().array() += 9 * add;
        add *= 10;
    }
    throw std::runtime_error("covariance is not positive definite");
}

/// Draw from N(mean, cov) restricted to lo <= x <= hi by Gibbs sweeps over the
/// whitened coordinates z (x = mean + L z). Exact when no bound is finite.
template <class URBG>
Eigen::VectorXd truncated_mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, URBG& rng,
                                     int sweeps = kGibbsSweeps) {
    const Eigen::Index n = mean.size();
    if (cov.rows() != n || cov.cols() != n || lo.size() != n || hi.size() != n)
        throw std::invalid_argument("truncated_mvn_sample: dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("truncated_mvn_sample: lo > hi");
    if (n == 0) return mean;

    double scale = cov.diagonal().maxCoeff();
    Eigen::MatrixXd l = robust_cholesky(cov, kGpJitter * (scale > 0 ? scale : 1.0));
    std::normal_distribution<double> normal(0.0, 1.0);

    bool bounded = false;
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::isfinite(lo[i]) || std::isfinite(hi[i])) bounded = true;

    Eigen::VectorXd z(n);
    if (!bounded) {
        for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
        return mean + l * z;
    }

    // Feasible start: the mean projected onto the box.
    Eigen::VectorXd x = mean.cwiseMax(lo).cwiseMin(hi);
    z = l.triangularView<Eigen::Lower>().solve(x - mean);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double tiny = 1e-14 * std::sqrt(scale > 0 ? scale : 1.0);

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double zl = -inf, zu = inf;
            for (Eigen::Index k = j; k < n; ++k) {
                double c = l(k, j);
                if (std::abs(c) <= tiny) continue;
                if (!std::isfinite(lo[k]) && !std::isfinite(hi[k])) continue;
                double rest = x[k] - c * z[j];
                double a = (lo[k] - rest) / c;
                double b = (hi[k] - rest) / c;
                if (c < 0) std::swap(a, b);
                zl = std::max(zl, a);
                zu = std::min(zu, b);
            }
            double znew;
            if (zl < zu) znew = std::clamp(detail::tn_standard(zl, zu, rng), zl, zu);
            else znew = z[j];  // rounding collapsed the slice; keep the feasible state
            double delta = znew - z[j];
            if (delta != 0.0) {
                z[j] = znew;
                x.segment(j, n - j) += delta * l.col(j).segment(j, n - j);
            }
        }
        x = mean + l * z;
    }
    return x.cwiseMax(lo).cwiseMin(hi);
}

/// Log density of N(mean, cov) at x, using the same jittered factorization as the sampler.
inline double mvn_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    double scale = cov.diagonal().maxCoeff();
    Eigen::MatrixXd l = robust_cholesky(cov, kGpJitter * (scale > 0 ? scale : 1.0));
    Eigen::VectorXd r = l.triangularView<Eigen::Lower>().solve(x - mean);
    double logdet = 2.0 * l.diagonal().array().log().sum();
    return -0.5 * r.squaredNorm() - 0.5 * logdet - 0.5 * static_cast<double>(x.size()) * std::log(2 * std::numbers::pi);
}

}  // namespace stlf
