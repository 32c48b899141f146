#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "autoeval/errors.hpp"

namespace autoeval {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Distributional fingerprint of a dataset in feature space: mean vector,
// sample covariance (divisor M-1), and the number of images it was computed
// from.
struct DatasetStats {
    Vector mean;
    Matrix cov;
    std::size_t count = 0;

    std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }

    // Enforces: cov square with side == mean.dim, symmetric within 1e-9
    // relative, count >= 2, all entries finite.
    void validate() const;
};

// Mean and sample covariance of the rows of `features` (one row per sample).
// Covariance is symmetrized after accumulation so it is exactly symmetric.
DatasetStats compute_stats(const Eigen::Ref<const Matrix>& features);
DatasetStats compute_stats(const std::vector<Vector>& features);

// Symmetric PSD square root via eigendecomposition. Negative eigenvalues are
// clamped to zero; if any eigenvalue falls below -1e-6*trace(A)/dim, a ridge
// of that magnitude is added first (near-singular sample covariances).
Matrix sqrtm_psd(const Eigen::Ref<const Matrix>& a);

// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}).
// The product square root is taken in the symmetric form
// sqrtm(S_a^{1/2} S_b S_a^{1/2}) so only PSD roots are ever computed.
// Tiny negative round-off is clamped to zero.
double frechet_distance(const DatasetStats& a, const DatasetStats& b);

// Spearman's rank correlation; ties receive the mean of their rank span.
double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);

double rmse(const std::vector<double>& preds, const std::vector<double>& truths);
double mae(const std::vector<double>& preds, const std::vector<double>& truths);

}  // namespace autoeval
