#include <algorithm>
#include <cmath>
#include <numeric>

#include "autoeval/binary_io.hpp"
#include "autoeval/predictors.hpp"
#include "autoeval/rng.hpp"

namespace autoeval {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Normalized network input [fd; mu; sigma] with sigma = cov * c.
Vector build_input(const NeuralNet& net, const DatasetRepresentation& rep,
                   const InputNormalizers& norms) {
    const int d = net.feature_dim();
    if (static_cast<int>(rep.dim()) != d || rep.cov.rows() != d || rep.cov.cols() != d)
        throw Error(ErrorKind::kShape, "representation does not match predictor dimension");
    Vector x(net.input_dim());
    x[0] = rep.fd / norms.fd_mean;
    x.segment(1, d) = (rep.mean - norms.mu_mean).cwiseQuotient(norms.mu_std);
    const Vector sigma = rep.cov * net.reduction;
    x.segment(1 + d, d) = (sigma - norms.sigma_mean).cwiseQuotient(norms.sigma_std);
    return x;
}

}  // namespace

double NeuralNet::forward(const DatasetRepresentation& rep, const InputNormalizers& norms) const {
    const Vector x = build_input(*this, rep, norms);
    const Vector a1 = (w1 * x + b1).cwiseMax(0.0);
    const Vector a2 = (w2 * a1 + b2).cwiseMax(0.0);
    return sigmoid(w3.dot(a2) + b3);
}

double NeuralNet::loss_and_gradient(const std::vector<DatasetRepresentation>& reps,
                                    const std::vector<double>& targets,
                                    const InputNormalizers& norms, NeuralNet& grad) const {
    if (reps.size() != targets.size() || reps.empty())
        throw Error(ErrorKind::kInsufficientData, "batch size mismatch or empty batch");
    const int d = feature_dim();
    const double inv_batch = 1.0 / static_cast<double>(reps.size());

    grad.reduction.setZero();
    grad.w1.setZero();
    grad.b1.setZero();
    grad.w2.setZero();
    grad.b2.setZero();
    grad.w3.setZero();
    grad.b3 = 0.0;

    double loss = 0.0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const Vector x = build_input(*this, reps[i], norms);
        const Vector z1 = w1 * x + b1;
        const Vector a1 = z1.cwiseMax(0.0);
        const Vector z2 = w2 * a1 + b2;
        const Vector a2 = z2.cwiseMax(0.0);
        const double out = sigmoid(w3.dot(a2) + b3);

        const double err = out - targets[i];
        loss += err * err * inv_batch;

        const double dz3 = 2.0 * err * out * (1.0 - out) * inv_batch;
        grad.w3 += dz3 * a2.transpose();
        grad.b3 += dz3;
        Vector dz2 = (w3.transpose() * dz3).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
        grad.w2 += dz2 * a1.transpose();
        grad.b2 += dz2;
        Vector dz1 = (w2.transpose() * dz2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
        grad.w1 += dz1 * x.transpose();
        grad.b1 += dz1;

        // Through the reduction: x_sigma = (cov*c - sm)/ss.
        const Vector dx = w1.transpose() * dz1;
        const Vector dsigma = dx.segment(1 + d, d).cwiseQuotient(norms.sigma_std);
        grad.reduction += reps[i].cov.transpose() * dsigma;
    }
    return loss;
}

std::size_t NeuralNet::param_count() const {
    return static_cast<std::size_t>(reduction.size() + w1.size() + b1.size() + w2.size() +
                                    b2.size() + w3.size()) +
           1;
}

namespace {

// Shared flat indexing for const and mutable access.
template <typename Net, typename Value>
Value& param_at(Net& net, std::size_t index) {
    std::size_t offset = index;
    auto within = [&offset](auto& block) -> Value* {
        const auto n = static_cast<std::size_t>(block.size());
        if (offset < n) return block.data() + offset;
        offset -= n;
        return nullptr;
    };
    if (auto* p = within(net.reduction)) return *p;
    if (auto* p = within(net.w1)) return *p;
    if (auto* p = within(net.b1)) return *p;
    if (auto* p = within(net.w2)) return *p;
    if (auto* p = within(net.b2)) return *p;
    if (auto* p = within(net.w3)) return *p;
    if (offset == 0) return net.b3;
    throw Error(ErrorKind::kParameter, "parameter index out of range");
}

}  // namespace

double& NeuralNet::param(std::size_t index) { return param_at<NeuralNet, double>(*this, index); }

double NeuralNet::param(std::size_t index) const {
    return param_at<const NeuralNet, const double>(*this, index);
}

NeuralNet NeuralNet::zeros_like(const NeuralNet& other) {
    NeuralNet z;
    z.reduction = Vector::Zero(other.reduction.size());
    z.w1 = Matrix::Zero(other.w1.rows(), other.w1.cols());
    z.b1 = Vector::Zero(other.b1.size());
    z.w2 = Matrix::Zero(other.w2.rows(), other.w2.cols());
    z.b2 = Vector::Zero(other.b2.size());
    z.w3 = Eigen::RowVectorXd::Zero(other.w3.size());
    z.b3 = 0.0;
    return z;
}

InputNormalizers make_input_normalizers(const std::vector<DatasetRepresentation>& train_x) {
    if (train_x.empty())
        throw Error(ErrorKind::kInsufficientData, "no training representations");
    const int d = static_cast<int>(train_x.front().dim());
    const double n = static_cast<double>(train_x.size());

    InputNormalizers norms;
    norms.fd_mean = 0.0;
    norms.mu_mean = Vector::Zero(d);
    norms.sigma_mean = Vector::Zero(d);

    // Sigma statistics taken at the initial reduction (uniform 1/d weights).
    const Vector c0 = Vector::Constant(d, 1.0 / static_cast<double>(d));
    std::vector<Vector> sigmas;
    sigmas.reserve(train_x.size());
    for (const auto& rep : train_x) {
        if (static_cast<int>(rep.dim()) != d)
            throw Error(ErrorKind::kShape, "inconsistent representation dimensions");
        norms.fd_mean += rep.fd;
        norms.mu_mean += rep.mean;
        sigmas.push_back(rep.cov * c0);
        norms.sigma_mean += sigmas.back();
    }
    norms.fd_mean = std::max(norms.fd_mean / n, 1e-12);
    norms.mu_mean /= n;
    norms.sigma_mean /= n;

    Vector mu_var = Vector::Zero(d);
    Vector sigma_var = Vector::Zero(d);
    for (std::size_t i = 0; i < train_x.size(); ++i) {
        mu_var += (train_x[i].mean - norms.mu_mean).cwiseAbs2();
        sigma_var += (sigmas[i] - norms.sigma_mean).cwiseAbs2();
    }
    const double denom = std::max(n - 1.0, 1.0);
    norms.mu_std = (mu_var / denom).cwiseSqrt().cwiseMax(1e-12);
    norms.sigma_std = (sigma_var / denom).cwiseSqrt().cwiseMax(1e-12);
    return norms;
}

namespace {

NeuralNet init_net(int d, const NeuralConfig& config, CounterRng& rng) {
    NeuralNet net;
    net.reduction = Vector::Constant(d, 1.0 / static_cast<double>(d));
    const int input = 1 + 2 * d;
    auto he = [&rng](Eigen::Index rows, Eigen::Index cols) {
        Matrix w(rows, cols);
        const double scale = std::sqrt(2.0 / static_cast<double>(cols));
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = scale * rng.normal();
        return w;
    };
    net.w1 = he(config.hidden1, input);
    net.b1 = Vector::Zero(config.hidden1);
    net.w2 = he(config.hidden2, config.hidden1);
    net.b2 = Vector::Zero(config.hidden2);
    net.w3 = he(1, config.hidden2);
    net.b3 = 0.0;
    return net;
}

double validation_rmse(const NeuralNet& net, const InputNormalizers& norms,
                       const std::vector<DatasetRepresentation>& xs,
                       const std::vector<double>& ys) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double err = net.forward(xs[i], norms) - ys[i];
        acc += err * err;
    }
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

NeuralPredictor fit_neural(const std::vector<DatasetRepresentation>& train_x,
                           const std::vector<double>& train_y,
                           const std::vector<DatasetRepresentation>& val_x,
                           const std::vector<double>& val_y, const NeuralConfig& config,
                           std::uint64_t seed, NeuralFitInfo* info) {
    if (train_x.empty() || train_x.size() != train_y.size())
        throw Error(ErrorKind::kInsufficientData, "fit_neural: bad training split");
    if (val_x.empty() || val_x.size() != val_y.size())
        throw Error(ErrorKind::kInsufficientData, "fit_neural: bad validation split");
    if (config.hidden1 <= 0 || config.hidden2 <= 0 || config.batch_size <= 0 ||
        config.max_epochs <= 0)
        throw Error(ErrorKind::kConfig, "invalid neural fit configuration");

    const int d = static_cast<int>(train_x.front().dim());
    const InputNormalizers norms = make_input_normalizers(train_x);

    CounterRng rng(seed, kStreamNeural);
    NeuralNet net = init_net(d, config, rng);
    NeuralNet grad = NeuralNet::zeros_like(net);
    NeuralNet velocity = NeuralNet::zeros_like(net);

    NeuralNet best = net;
    double best_rmse = validation_rmse(net, norms, val_x, val_y);
    int best_epoch = 0;

    std::vector<std::size_t> order(train_x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    int epoch = 1;
    for (; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            std::vector<DatasetRepresentation> batch_x;
            std::vector<double> batch_y;
            batch_x.reserve(stop - start);
            batch_y.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                batch_x.push_back(train_x[order[i]]);
                batch_y.push_back(train_y[order[i]]);
            }

            const double loss = net.loss_and_gradient(batch_x, batch_y, norms, grad);
            if (!std::isfinite(loss))
                throw Error(ErrorKind::kTrainingFailure, "neural fit loss became non-finite");

            const std::size_t count = net.param_count();
            for (std::size_t p = 0; p < count; ++p) {
                double& v = velocity.param(p);
                v = config.momentum * v - config.learning_rate * grad.param(p);
                net.param(p) += v;
            }
        }

        const double rmse_now = validation_rmse(net, norms, val_x, val_y);
        if (rmse_now < best_rmse) {
            best_rmse = rmse_now;
            best = net;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }

    if (info) {
        info->epochs_run = std::min(epoch, config.max_epochs);
        info->best_val_rmse = best_rmse;
    }
    return NeuralPredictor(std::move(best), norms);
}

double NeuralPredictor::predict(const DatasetRepresentation& rep) const {
    return net_.forward(rep, norms_);
}

double predict_neural(const NeuralPredictor& predictor, const DatasetRepresentation& rep) {
    return predictor.predict(rep);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kLinearMagic[4] = {'A', 'E', 'L', 'P'};
constexpr char kNeuralMagic[4] = {'A', 'E', 'N', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_stats_payload(BinaryWriter& out, const DatasetStats& stats) {
    out.u32(static_cast<std::uint32_t>(stats.dim()));
    out.u64(stats.count);
    out.f64_array(stats.mean.data(), stats.dim());
    for (Eigen::Index i = 0; i < stats.cov.rows(); ++i)
        for (Eigen::Index j = 0; j < stats.cov.cols(); ++j) out.f64(stats.cov(i, j));
}

DatasetStats read_stats_payload(BinaryReader& in) {
    DatasetStats stats;
    const std::uint32_t d = in.u32();
    stats.count = in.u64();
    stats.mean.resize(d);
    in.f64_array(stats.mean.data(), d);
    stats.cov.resize(d, d);
    for (Eigen::Index i = 0; i < stats.cov.rows(); ++i)
        for (Eigen::Index j = 0; j < stats.cov.cols(); ++j) stats.cov(i, j) = in.f64();
    stats.validate();
    return stats;
}

void write_matrix(BinaryWriter& out, const Matrix& m) {
    out.u32(static_cast<std::uint32_t>(m.rows()));
    out.u32(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.f64(m(i, j));
}

Matrix read_matrix(BinaryReader& in) {
    const std::uint32_t rows = in.u32();
    const std::uint32_t cols = in.u32();
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = in.f64();
    return m;
}

void write_vector(BinaryWriter& out, const Vector& v) {
    out.u32(static_cast<std::uint32_t>(v.size()));
    out.f64_array(v.data(), static_cast<std::size_t>(v.size()));
}

Vector read_vector(BinaryReader& in) {
    Vector v(in.u32());
    in.f64_array(v.data(), static_cast<std::size_t>(v.size()));
    return v;
}

}  // namespace

void save_linear_predictor(const LinearPredictor& predictor, const DatasetStats& ori_stats,
                           const std::string& path) {
    BinaryWriter out(path);
    out.magic(kLinearMagic);
    out.u32(kCheckpointVersion);
    out.f64(predictor.w0);
    out.f64(predictor.w1);
    write_stats_payload(out, ori_stats);
    out.close();
}

std::pair<LinearPredictor, DatasetStats> load_linear_predictor(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic(kLinearMagic);
    if (in.u32() != kCheckpointVersion)
        throw Error(ErrorKind::kFormat, "unsupported predictor version in " + path);
    LinearPredictor predictor;
    predictor.w0 = in.f64();
    predictor.w1 = in.f64();
    if (!std::isfinite(predictor.w0) || !std::isfinite(predictor.w1))
        throw Error(ErrorKind::kValidation, "non-finite linear parameters in " + path);
    return {predictor, read_stats_payload(in)};
}

void save_neural_predictor(const NeuralPredictor& predictor, const DatasetStats& ori_stats,
                           const std::string& path) {
    const NeuralNet& net = predictor.net();
    const InputNormalizers& norms = predictor.normalizers();
    BinaryWriter out(path);
    out.magic(kNeuralMagic);
    out.u32(kCheckpointVersion);
    out.u32(static_cast<std::uint32_t>(net.feature_dim()));
    out.f64(norms.fd_mean);
    write_vector(out, norms.mu_mean);
    write_vector(out, norms.mu_std);
    write_vector(out, norms.sigma_mean);
    write_vector(out, norms.sigma_std);
    write_vector(out, net.reduction);
    write_matrix(out, net.w1);
    write_vector(out, net.b1);
    write_matrix(out, net.w2);
    write_vector(out, net.b2);
    write_vector(out, net.w3.transpose());
    out.f64(net.b3);
    write_stats_payload(out, ori_stats);
    out.close();
}

std::pair<NeuralPredictor, DatasetStats> load_neural_predictor(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic(kNeuralMagic);
    if (in.u32() != kCheckpointVersion)
        throw Error(ErrorKind::kFormat, "unsupported predictor version in " + path);
    const std::uint32_t d = in.u32();

    InputNormalizers norms;
    norms.fd_mean = in.f64();
    norms.mu_mean = read_vector(in);
    norms.mu_std = read_vector(in);
    norms.sigma_mean = read_vector(in);
    norms.sigma_std = read_vector(in);

    NeuralNet net;
    net.reduction = read_vector(in);
    net.w1 = read_matrix(in);
    net.b1 = read_vector(in);
    net.w2 = read_matrix(in);
    net.b2 = read_vector(in);
    net.w3 = read_vector(in).transpose();
    net.b3 = in.f64();

    if (net.reduction.size() != static_cast<Eigen::Index>(d) ||
        net.w1.cols() != static_cast<Eigen::Index>(1 + 2 * d))
        throw Error(ErrorKind::kFormat, "inconsistent neural checkpoint shapes in " + path);

    DatasetStats ori = read_stats_payload(in);
    return {NeuralPredictor(std::move(net), std::move(norms)), std::move(ori)};
}

PredictorKind peek_predictor_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char got[4] = {};
    if (!in || !in.read(got, 4))
        throw Error(ErrorKind::kFormat, "cannot read predictor checkpoint: " + path);
    if (std::memcmp(got, kLinearMagic, 4) == 0) return PredictorKind::kLinear;
    if (std::memcmp(got, kNeuralMagic, 4) == 0) return PredictorKind::kNeural;
    throw Error(ErrorKind::kFormat, "not a predictor checkpoint: " + path);
}

}  // namespace autoeval
