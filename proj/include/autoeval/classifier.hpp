#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "autoeval/bundle.hpp"
#include "autoeval/raster.hpp"

namespace autoeval {

struct ClassifierConfig {
    int hidden = 64;  // width of both hidden layers; the second is the feature layer
    int epochs = 20;
    int batch_size = 64;
    double learning_rate = 0.01;
    double momentum = 0.9;
};

// flatten -> dense(hidden, relu) -> dense(hidden, relu) -> dense(K) -> softmax.
// The post-relu activations of the second hidden layer are the penultimate
// features every dataset statistic is computed from.
class TinyClassifier {
public:
    int input_height() const { return in_h_; }
    int input_width() const { return in_w_; }
    int input_channels() const { return in_c_; }
    int feature_dim() const { return static_cast<int>(w2_.rows()); }
    int class_count() const { return static_cast<int>(w3_.rows()); }

    // Per-image penultimate features and softmax rows. Inference is a
    // per-image pass, so a row never depends on what else is in the batch.
    FeatureBundle extract(const std::vector<Raster>& images) const;

    // FNV over all parameter bytes in a fixed order; provenance fingerprint.
    std::uint64_t param_hash() const;

    void save(const std::string& path) const;
    static TinyClassifier load(const std::string& path);

    friend TinyClassifier train_classifier(const LabeledImageSet&, const ClassifierConfig&,
                                           std::uint64_t);

private:
    Eigen::MatrixXd w1_, w2_, w3_;
    Eigen::VectorXd b1_, b2_, b3_;
    int in_h_ = 0, in_w_ = 0, in_c_ = 0;

    Eigen::VectorXd flatten(const Raster& image) const;
};

// Mini-batch SGD with momentum on the cross-entropy loss; bit-reproducible
// for a fixed seed on the same platform.
TinyClassifier train_classifier(const LabeledImageSet& train, const ClassifierConfig& config,
                                std::uint64_t seed);

// Fraction of images whose argmax softmax class equals the label; argmax ties
// broken by lowest class index.
double accuracy(const TinyClassifier& clf, const LabeledImageSet& data);

}  // namespace autoeval
