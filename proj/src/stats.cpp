#include "autoeval/stats.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace autoeval {

namespace {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
    if (!m.allFinite()) throw Error(ErrorKind::kValidation, std::string(what) + " contains non-finite entries");
}

double max_abs(const Eigen::Ref<const Matrix>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

void DatasetStats::validate() const {
    if (cov.rows() != cov.cols())
        throw Error(ErrorKind::kShape, "covariance is not square");
    if (cov.rows() != mean.size())
        throw Error(ErrorKind::kShape, "covariance side does not match mean dimension");
    if (count < 2)
        throw Error(ErrorKind::kInsufficientData, "stats computed from fewer than 2 images");
    if (!mean.allFinite() || !cov.allFinite())
        throw Error(ErrorKind::kValidation, "stats contain non-finite entries");
    const double scale = std::max(1.0, max_abs(cov));
    const double asym = max_abs(cov - cov.transpose());
    if (asym > 1e-9 * scale)
        throw Error(ErrorKind::kShape, "covariance asymmetric beyond tolerance");
}

DatasetStats compute_stats(const Eigen::Ref<const Matrix>& features) {
    const auto m = features.rows();
    if (m < 2)
        throw Error(ErrorKind::kInsufficientData, "compute_stats needs at least 2 vectors");
    require_finite(features, "features");

    DatasetStats stats;
    stats.count = static_cast<std::size_t>(m);
    stats.mean = features.colwise().mean();
    Matrix centered = features.rowwise() - stats.mean.transpose();
    stats.cov = (centered.transpose() * centered) / static_cast<double>(m - 1);
    stats.cov = (0.5 * (stats.cov + stats.cov.transpose())).eval();
    return stats;
}

DatasetStats compute_stats(const std::vector<Vector>& features) {
    if (features.size() < 2)
        throw Error(ErrorKind::kInsufficientData, "compute_stats needs at least 2 vectors");
    const auto d = features.front().size();
    Matrix packed(static_cast<Eigen::Index>(features.size()), d);
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != d)
            throw Error(ErrorKind::kShape, "feature vectors have mismatched dimensions");
        packed.row(static_cast<Eigen::Index>(i)) = features[i].transpose();
    }
    return compute_stats(packed);
}

Matrix sqrtm_psd(const Eigen::Ref<const Matrix>& a) {
    if (a.rows() != a.cols())
        throw Error(ErrorKind::kShape, "sqrtm_psd requires a square matrix");
    require_finite(a, "matrix");
    const double scale = std::max(1.0, max_abs(a));
    if (max_abs(a - a.transpose()) > 1e-8 * scale)
        throw Error(ErrorKind::kShape, "sqrtm_psd input asymmetric beyond tolerance");

    Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success)
        throw Error(ErrorKind::kNumerical, "eigendecomposition did not converge");

    Vector lambda = eig.eigenvalues();
    const double dim = static_cast<double>(a.rows());
    const double ridge_threshold = 1e-6 * std::max(sym.trace(), 0.0) / dim;
    if (lambda.minCoeff() < -ridge_threshold)
        lambda.array() += ridge_threshold;
    lambda = lambda.cwiseMax(0.0);

    Matrix root = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
                  eig.eigenvectors().transpose();
    return 0.5 * (root + root.transpose());
}

double frechet_distance(const DatasetStats& a, const DatasetStats& b) {
    if (a.mean.size() != b.mean.size())
        throw Error(ErrorKind::kShape, "frechet_distance dimension mismatch");

    const double mean_term = (a.mean - b.mean).squaredNorm();

    Matrix root_a = sqrtm_psd(a.cov);
    Matrix inner = root_a * b.cov * root_a;
    Matrix cross = sqrtm_psd(inner);

    const double trace_term = a.cov.trace() + b.cov.trace() - 2.0 * cross.trace();
    return std::max(mean_term + trace_term, 0.0);
}

namespace {

// Average ranks, 1-based; tied values get the mean of their rank span.
std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw Error(ErrorKind::kInsufficientData, "spearman_rho length mismatch");
    if (xs.size() < 3)
        throw Error(ErrorKind::kInsufficientData, "spearman_rho needs at least 3 points");

    const std::vector<double> rx = average_ranks(xs);
    const std::vector<double> ry = average_ranks(ys);
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw Error(ErrorKind::kDegenerateInput, "spearman_rho: zero rank variance");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

void check_pairs(const std::vector<double>& preds, const std::vector<double>& truths) {
    if (preds.size() != truths.size())
        throw Error(ErrorKind::kInsufficientData, "prediction/truth length mismatch");
    if (preds.empty())
        throw Error(ErrorKind::kInsufficientData, "no prediction/truth pairs");
}

}  // namespace

double rmse(const std::vector<double>& preds, const std::vector<double>& truths) {
    check_pairs(preds, truths);
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - truths[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(preds.size()));
}

double mae(const std::vector<double>& preds, const std::vector<double>& truths) {
    check_pairs(preds, truths);
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        acc += std::abs(preds[i] - truths[i]);
    return acc / static_cast<double>(preds.size());
}

}  // namespace autoeval
