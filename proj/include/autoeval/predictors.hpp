#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "autoeval/bundle.hpp"
#include "autoeval/stats.hpp"

namespace autoeval {

// ---------------------------------------------------------------------------
// Confidence baseline: fraction of rows whose max softmax entry exceeds tau.
// ---------------------------------------------------------------------------

double predict_confidence(const FeatureBundle& bundle, double tau);

// ---------------------------------------------------------------------------
// Robust linear regression of accuracy on the Frechet distance.
// ---------------------------------------------------------------------------

struct LinearPredictor {
    double w0 = 0.0;
    double w1 = 0.0;

    double raw(double fd) const { return w1 * fd + w0; }  // pre-clamp value
    double predict(double fd) const;                      // clamped to [0,1]
};

struct HuberFitInfo {
    bool converged = false;
    int iterations = 0;
};

// Huber-loss fit via iteratively reweighted least squares; residuals are
// standardized by their MAD each sweep. Stops when the parameter change
// drops below 1e-9 or after 100 sweeps (then the best iterate is returned
// and `info->converged` stays false).
LinearPredictor fit_linear(const std::vector<std::pair<double, double>>& fd_accuracy,
                           double huber_delta = 1.345, HuberFitInfo* info = nullptr);

double predict_linear(const LinearPredictor& predictor, double fd);

// ---------------------------------------------------------------------------
// Neural regression on [fd; mu; sigma], sigma = Sigma * c with learned c.
// ---------------------------------------------------------------------------

// Raw inputs of the neural representation before the learned covariance
// reduction is applied inside the network.
struct DatasetRepresentation {
    double fd = 0.0;
    Vector mean;
    Matrix cov;

    std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
};

DatasetRepresentation assemble_representation(const DatasetStats& stats,
                                              const DatasetStats& ori_stats);

// Per-coordinate input standardization, frozen from the meta-train split.
// The sigma statistics are taken at the initial reduction (uniform weights);
// the network absorbs any drift as c trains.
struct InputNormalizers {
    double fd_mean = 1.0;
    Vector mu_mean, mu_std;
    Vector sigma_mean, sigma_std;
};

// Trainable core. Layout: reduction c (d), then the normalized (1+2d) input
// through dense(h1, relu) -> dense(h2, relu) -> dense(1) -> logistic.
struct NeuralNet {
    Vector reduction;  // c, shared across covariance rows
    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;
    Eigen::RowVectorXd w3;
    double b3 = 0.0;

    int feature_dim() const { return static_cast<int>(reduction.size()); }
    int input_dim() const { return 1 + 2 * feature_dim(); }

    double forward(const DatasetRepresentation& rep, const InputNormalizers& norms) const;

    // Mean squared error over the batch; gradients accumulate into `grad`
    // (zeroed first). Returns the loss.
    double loss_and_gradient(const std::vector<DatasetRepresentation>& reps,
                             const std::vector<double>& targets, const InputNormalizers& norms,
                             NeuralNet& grad) const;

    // Flat parameter view in the order [c, w1, b1, w2, b2, w3, b3]; used by
    // the finite-difference gradient check and the momentum update.
    std::size_t param_count() const;
    double& param(std::size_t index);
    double param(std::size_t index) const;

    static NeuralNet zeros_like(const NeuralNet& other);
};

struct NeuralConfig {
    int hidden1 = 128;
    int hidden2 = 64;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    int batch_size = 32;
    int max_epochs = 500;
    int patience = 50;  // epochs without validation improvement before stopping
};

struct NeuralFitInfo {
    int epochs_run = 0;
    double best_val_rmse = 0.0;
};

class NeuralPredictor {
public:
    NeuralPredictor() = default;
    NeuralPredictor(NeuralNet net, InputNormalizers norms)
        : net_(std::move(net)), norms_(std::move(norms)) {}

    // Logistic output unit keeps every prediction inside [0,1].
    double predict(const DatasetRepresentation& rep) const;

    const NeuralNet& net() const { return net_; }
    const InputNormalizers& normalizers() const { return norms_; }

private:
    NeuralNet net_;
    InputNormalizers norms_;
};

// Minimizes mean squared error on the train split; returns the parameters
// with the best validation RMSE. Deterministic given seed.
NeuralPredictor fit_neural(const std::vector<DatasetRepresentation>& train_x,
                           const std::vector<double>& train_y,
                           const std::vector<DatasetRepresentation>& val_x,
                           const std::vector<double>& val_y, const NeuralConfig& config,
                           std::uint64_t seed, NeuralFitInfo* info = nullptr);

double predict_neural(const NeuralPredictor& predictor, const DatasetRepresentation& rep);

// Builds the normalizers exactly as fit_neural does (exposed for the
// gradient-check fixture).
InputNormalizers make_input_normalizers(const std::vector<DatasetRepresentation>& train_x);

// ---------------------------------------------------------------------------
// Checkpoints: header+payload binary files embedding the original training
// stats so `predict` is self-contained.
// ---------------------------------------------------------------------------

enum class PredictorKind { kLinear, kNeural };

void save_linear_predictor(const LinearPredictor& predictor, const DatasetStats& ori_stats,
                           const std::string& path);
std::pair<LinearPredictor, DatasetStats> load_linear_predictor(const std::string& path);

void save_neural_predictor(const NeuralPredictor& predictor, const DatasetStats& ori_stats,
                           const std::string& path);
std::pair<NeuralPredictor, DatasetStats> load_neural_predictor(const std::string& path);

// Reads the magic of a checkpoint file to decide which loader applies.
PredictorKind peek_predictor_kind(const std::string& path);

}  // namespace autoeval
