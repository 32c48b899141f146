#pragma once

#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "autoeval/errors.hpp"
#include "autoeval/rng.hpp"
#include "autoeval/stats.hpp"

// Asserts that `expr` throws autoeval::Error with the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                      \
    do {                                                           \
        bool thrown_ = false;                                      \
        try {                                                      \
            (void)(expr);                                          \
        } catch (const autoeval::Error& e_) {                      \
            thrown_ = true;                                        \
            CHECK(e_.kind() == (expected_kind));                   \
        }                                                          \
        CHECK_MESSAGE(thrown_, "expected autoeval::Error, got none"); \
    } while (0)

namespace test_support {

// Independent two-pass mean/covariance oracle: plain nested loops, divisor
// M-1. Kept free of any Eigen reductions so it cannot share a code path with
// the implementation it checks.
inline void naive_mean_cov(const std::vector<std::vector<double>>& rows,
                           std::vector<double>& mean_out,
                           std::vector<std::vector<double>>& cov_out) {
    const std::size_t m = rows.size();
    const std::size_t d = rows.front().size();
    mean_out.assign(d, 0.0);
    for (const auto& row : rows)
        for (std::size_t j = 0; j < d; ++j) mean_out[j] += row[j];
    for (std::size_t j = 0; j < d; ++j) mean_out[j] /= static_cast<double>(m);

    cov_out.assign(d, std::vector<double>(d, 0.0));
    for (const auto& row : rows)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                cov_out[a][b] += (row[a] - mean_out[a]) * (row[b] - mean_out[b]);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) cov_out[a][b] /= static_cast<double>(m - 1);
}

// Random symmetric positive definite matrix A = B^T B + 0.1 I.
inline autoeval::Matrix random_spd(int dim, autoeval::CounterRng& rng) {
    autoeval::Matrix b(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) b(i, j) = rng.normal();
    autoeval::Matrix a = b.transpose() * b + 0.1 * autoeval::Matrix::Identity(dim, dim);
    return 0.5 * (a + a.transpose());
}

inline autoeval::DatasetStats random_stats(int dim, autoeval::CounterRng& rng) {
    autoeval::DatasetStats stats;
    stats.mean = autoeval::Vector(dim);
    for (int i = 0; i < dim; ++i) stats.mean[i] = rng.uniform(-2.0, 2.0);
    stats.cov = random_spd(dim, rng);
    stats.count = 100;
    return stats;
}

// Plain ordinary-least-squares line fit (oracle for the robust-fit property).
inline void ols_fit(const std::vector<std::pair<double, double>>& points, double& w0,
                    double& w1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    w1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    w0 = (sy - w1 * sx) / n;
}

}  // namespace test_support
