#include "autoeval/predictors.hpp"

#include <algorithm>
#include <cmath>

#include "autoeval/binary_io.hpp"

namespace autoeval {

double predict_confidence(const FeatureBundle& bundle, double tau) {
    if (!(tau > 0.0) || !(tau < 1.0))
        throw Error(ErrorKind::kParameter, "tau must lie strictly inside (0,1)");
    if (bundle.size() == 0)
        throw Error(ErrorKind::kInsufficientData, "empty bundle");
    std::size_t above = 0;
    for (Eigen::Index i = 0; i < bundle.softmax.rows(); ++i)
        if (static_cast<double>(bundle.softmax.row(i).maxCoeff()) > tau) ++above;
    return static_cast<double>(above) / static_cast<double>(bundle.size());
}

double LinearPredictor::predict(double fd) const {
    return std::clamp(raw(fd), 0.0, 1.0);
}

double predict_linear(const LinearPredictor& predictor, double fd) {
    return predictor.predict(fd);
}

namespace {

double median_inplace(std::vector<double>& xs) {
    const std::size_t n = xs.size();
    const std::size_t mid = n / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    double hi = xs[mid];
    if (n % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid) - 1, xs.end());
    return 0.5 * (xs[mid - 1] + hi);
}

// Weighted least squares for a 2-parameter line, closed form.
void solve_wls(const std::vector<std::pair<double, double>>& points,
               const std::vector<double>& weights, double& w0, double& w1) {
    double sw = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = weights[i];
        const double x = points[i].first;
        const double y = points[i].second;
        sw += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    const double denom = sw * sxx - sx * sx;
    if (denom == 0.0 || !std::isfinite(denom))
        throw Error(ErrorKind::kDegenerateInput, "weighted design matrix is singular");
    w1 = (sw * sxy - sx * sy) / denom;
    w0 = (sy - w1 * sx) / sw;
}

}  // namespace

LinearPredictor fit_linear(const std::vector<std::pair<double, double>>& fd_accuracy,
                           double huber_delta, HuberFitInfo* info) {
    const std::size_t n = fd_accuracy.size();
    if (n < 3)
        throw Error(ErrorKind::kInsufficientData, "fit_linear needs at least 3 points");

    double mean_x = 0.0;
    for (const auto& [x, y] : fd_accuracy) mean_x += x;
    mean_x /= static_cast<double>(n);
    double var_x = 0.0;
    for (const auto& [x, y] : fd_accuracy) var_x += (x - mean_x) * (x - mean_x);
    if (var_x == 0.0)
        throw Error(ErrorKind::kDegenerateInput, "fit_linear: zero fd variance");

    std::vector<double> weights(n, 1.0);
    double w0 = 0.0, w1 = 0.0;
    solve_wls(fd_accuracy, weights, w0, w1);  // OLS start

    bool converged = false;
    int iteration = 0;
    std::vector<double> residuals(n), absdev(n);
    for (; iteration < 100; ++iteration) {
        for (std::size_t i = 0; i < n; ++i)
            residuals[i] = fd_accuracy[i].second - (w1 * fd_accuracy[i].first + w0);

        // Robust residual scale: MAD about the median residual.
        std::vector<double> tmp = residuals;
        const double center = median_inplace(tmp);
        for (std::size_t i = 0; i < n; ++i) absdev[i] = std::abs(residuals[i] - center);
        tmp = absdev;
        double scale = median_inplace(tmp) / 0.6745;
        if (scale <= 0.0) {
            double mean_abs = 0.0;
            for (double r : residuals) mean_abs += std::abs(r);
            scale = mean_abs / static_cast<double>(n);
        }
        if (scale <= 0.0) {
            converged = true;  // exact fit
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            const double u = std::abs(residuals[i]) / scale;
            weights[i] = u <= huber_delta ? 1.0 : huber_delta / u;
        }

        double next_w0 = 0.0, next_w1 = 0.0;
        solve_wls(fd_accuracy, weights, next_w0, next_w1);
        const double delta = std::max(std::abs(next_w0 - w0), std::abs(next_w1 - w1));
        w0 = next_w0;
        w1 = next_w1;
        if (delta < 1e-9) {
            converged = true;
            ++iteration;
            break;
        }
    }
    if (!std::isfinite(w0) || !std::isfinite(w1))
        throw Error(ErrorKind::kNumerical, "fit_linear produced non-finite parameters");
    if (info) {
        info->converged = converged;
        info->iterations = iteration;
    }
    return LinearPredictor{w0, w1};
}

DatasetRepresentation assemble_representation(const DatasetStats& stats,
                                              const DatasetStats& ori_stats) {
    if (stats.dim() != ori_stats.dim())
        throw Error(ErrorKind::kShape, "representation dimension mismatch");
    DatasetRepresentation rep;
    rep.fd = frechet_distance(ori_stats, stats);
    rep.mean = stats.mean;
    rep.cov = stats.cov;
    return rep;
}

}  // namespace autoeval
