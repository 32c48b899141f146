#include "autoeval/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "autoeval/binary_io.hpp"
#include "autoeval/hash.hpp"
#include "autoeval/rng.hpp"

namespace autoeval {

namespace {

constexpr char kMagic[4] = {'A', 'E', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

Eigen::MatrixXd he_init(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
    Eigen::MatrixXd w(rows, cols);
    const double scale = std::sqrt(2.0 / static_cast<double>(cols));
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            w(i, j) = scale * rng.normal();
    return w;
}

Eigen::VectorXd softmax_stable(const Eigen::VectorXd& logits) {
    Eigen::VectorXd shifted = (logits.array() - logits.maxCoeff()).exp();
    return shifted / shifted.sum();
}

}  // namespace

Eigen::VectorXd TinyClassifier::flatten(const Raster& image) const {
    Eigen::VectorXd x(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = static_cast<double>(image.data[i]);
    return x;
}

FeatureBundle TinyClassifier::extract(const std::vector<Raster>& images) const {
    for (const Raster& image : images)
        if (image.height != in_h_ || image.width != in_w_ || image.channels != in_c_)
            throw Error(ErrorKind::kShape, "image shape does not match classifier input");

    const Eigen::Index m = static_cast<Eigen::Index>(images.size());
    FeatureBundle bundle;
    bundle.features.resize(m, feature_dim());
    bundle.softmax.resize(m, class_count());

    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::VectorXd x = flatten(images[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd a1 = (w1_ * x + b1_).cwiseMax(0.0);
        const Eigen::VectorXd a2 = (w2_ * a1 + b2_).cwiseMax(0.0);
        const Eigen::VectorXd probs = softmax_stable(w3_ * a2 + b3_);
        bundle.features.row(i) = a2.cast<float>().transpose();
        bundle.softmax.row(i) = probs.cast<float>().transpose();
    }
    return bundle;
}

std::uint64_t TinyClassifier::param_hash() const {
    Fnv1a64 h;
    auto add_matrix = [&h](const Eigen::MatrixXd& m) {
        h.update(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
    };
    auto add_vector = [&h](const Eigen::VectorXd& v) {
        h.update(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
    };
    h.update_value(in_h_);
    h.update_value(in_w_);
    h.update_value(in_c_);
    add_matrix(w1_);
    add_vector(b1_);
    add_matrix(w2_);
    add_vector(b2_);
    add_matrix(w3_);
    add_vector(b3_);
    return h.digest();
}

void TinyClassifier::save(const std::string& path) const {
    BinaryWriter out(path);
    out.magic(kMagic);
    out.u32(kVersion);
    out.u32(static_cast<std::uint32_t>(in_h_));
    out.u32(static_cast<std::uint32_t>(in_w_));
    out.u32(static_cast<std::uint32_t>(in_c_));
    out.u32(static_cast<std::uint32_t>(class_count()));
    out.u32(static_cast<std::uint32_t>(feature_dim()));

    const Eigen::MatrixXd* weights[3] = {&w1_, &w2_, &w3_};
    const Eigen::VectorXd* biases[3] = {&b1_, &b2_, &b3_};
    out.u32(3);  // layer-shape table
    for (const auto* w : weights) {
        out.u32(static_cast<std::uint32_t>(w->rows()));
        out.u32(static_cast<std::uint32_t>(w->cols()));
    }
    for (int layer = 0; layer < 3; ++layer) {
        const Eigen::MatrixXd& w = *weights[layer];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                out.f64(w(i, j));
        out.f64_array(biases[layer]->data(), static_cast<std::size_t>(biases[layer]->size()));
    }
    out.close();
}

TinyClassifier TinyClassifier::load(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic(kMagic);
    if (in.u32() != kVersion)
        throw Error(ErrorKind::kFormat, "unsupported classifier version in " + path);

    TinyClassifier clf;
    clf.in_h_ = static_cast<int>(in.u32());
    clf.in_w_ = static_cast<int>(in.u32());
    clf.in_c_ = static_cast<int>(in.u32());
    const std::uint32_t k = in.u32();
    const std::uint32_t d = in.u32();
    if (in.u32() != 3) throw Error(ErrorKind::kFormat, "unexpected layer count in " + path);

    std::uint32_t shapes[3][2];
    for (auto& shape : shapes) {
        shape[0] = in.u32();
        shape[1] = in.u32();
    }
    const std::size_t input = static_cast<std::size_t>(clf.in_h_) * clf.in_w_ * clf.in_c_;
    if (shapes[0][1] != input || shapes[1][1] != shapes[0][0] || shapes[2][1] != shapes[1][0] ||
        shapes[1][0] != d || shapes[2][0] != k)
        throw Error(ErrorKind::kFormat, "inconsistent layer-shape table in " + path);

    Eigen::MatrixXd* weights[3] = {&clf.w1_, &clf.w2_, &clf.w3_};
    Eigen::VectorXd* biases[3] = {&clf.b1_, &clf.b2_, &clf.b3_};
    for (int layer = 0; layer < 3; ++layer) {
        weights[layer]->resize(shapes[layer][0], shapes[layer][1]);
        for (Eigen::Index i = 0; i < weights[layer]->rows(); ++i)
            for (Eigen::Index j = 0; j < weights[layer]->cols(); ++j)
                (*weights[layer])(i, j) = in.f64();
        biases[layer]->resize(shapes[layer][0]);
        in.f64_array(biases[layer]->data(), static_cast<std::size_t>(biases[layer]->size()));
    }
    if (!clf.w1_.allFinite() || !clf.w2_.allFinite() || !clf.w3_.allFinite() ||
        !clf.b1_.allFinite() || !clf.b2_.allFinite() || !clf.b3_.allFinite())
        throw Error(ErrorKind::kValidation, "classifier checkpoint has non-finite parameters");
    return clf;
}

TinyClassifier train_classifier(const LabeledImageSet& train, const ClassifierConfig& config,
                                std::uint64_t seed) {
    train.validate();
    if (train.images.empty())
        throw Error(ErrorKind::kInsufficientData, "empty training set");
    std::set<std::uint32_t> distinct(train.labels.begin(), train.labels.end());
    if (distinct.size() < 2)
        throw Error(ErrorKind::kDegenerateInput, "training labels cover fewer than 2 classes");
    if (config.hidden <= 0 || config.epochs <= 0 || config.batch_size <= 0)
        throw Error(ErrorKind::kConfig, "invalid classifier training hyperparameters");

    const Raster& first = train.images.front();
    const Eigen::Index input = static_cast<Eigen::Index>(first.data.size());
    const Eigen::Index n = static_cast<Eigen::Index>(train.images.size());
    const Eigen::Index k = static_cast<Eigen::Index>(train.class_count);
    const Eigen::Index h = config.hidden;

    // All draws (init, then per-epoch shuffles) come from one stream.
    CounterRng rng(seed, kStreamClassifier);

    TinyClassifier clf;
    clf.in_h_ = first.height;
    clf.in_w_ = first.width;
    clf.in_c_ = first.channels;
    clf.w1_ = he_init(h, input, rng);
    clf.w2_ = he_init(h, h, rng);
    clf.w3_ = he_init(k, h, rng);
    clf.b1_ = Eigen::VectorXd::Zero(h);
    clf.b2_ = Eigen::VectorXd::Zero(h);
    clf.b3_ = Eigen::VectorXd::Zero(k);

    // Flatten the dataset once: columns are images.
    Eigen::MatrixXd data(input, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& pixels = train.images[static_cast<std::size_t>(i)].data;
        for (std::size_t p = 0; p < pixels.size(); ++p)
            data(static_cast<Eigen::Index>(p), i) = static_cast<double>(pixels[p]);
    }

    Eigen::MatrixXd vel_w1 = Eigen::MatrixXd::Zero(h, input);
    Eigen::MatrixXd vel_w2 = Eigen::MatrixXd::Zero(h, h);
    Eigen::MatrixXd vel_w3 = Eigen::MatrixXd::Zero(k, h);
    Eigen::VectorXd vel_b1 = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd vel_b2 = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd vel_b3 = Eigen::VectorXd::Zero(k);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (Eigen::Index start = 0; start < n; start += config.batch_size) {
            const Eigen::Index b = std::min<Eigen::Index>(config.batch_size, n - start);

            Eigen::MatrixXd x(input, b);
            for (Eigen::Index col = 0; col < b; ++col)
                x.col(col) = data.col(order[static_cast<std::size_t>(start + col)]);

            Eigen::MatrixXd z1 = (clf.w1_ * x).colwise() + clf.b1_;
            Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
            Eigen::MatrixXd z2 = (clf.w2_ * a1).colwise() + clf.b2_;
            Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
            Eigen::MatrixXd logits = (clf.w3_ * a2).colwise() + clf.b3_;

            // Softmax minus one-hot is the cross-entropy gradient at the logits.
            Eigen::MatrixXd dz3(k, b);
            double loss = 0.0;
            for (Eigen::Index col = 0; col < b; ++col) {
                const Eigen::VectorXd probs = softmax_stable(logits.col(col));
                const auto label = static_cast<Eigen::Index>(
                    train.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + col)])]);
                loss -= std::log(std::max(probs[label], 1e-300));
                dz3.col(col) = probs;
                dz3(label, col) -= 1.0;
            }
            loss /= static_cast<double>(b);
            if (!std::isfinite(loss))
                throw Error(ErrorKind::kTrainingFailure, "training loss became non-finite");
            dz3 /= static_cast<double>(b);

            const Eigen::MatrixXd grad_w3 = dz3 * a2.transpose();
            const Eigen::VectorXd grad_b3 = dz3.rowwise().sum();
            Eigen::MatrixXd dz2 = (clf.w3_.transpose() * dz3).cwiseProduct(
                (z2.array() > 0.0).cast<double>().matrix());
            const Eigen::MatrixXd grad_w2 = dz2 * a1.transpose();
            const Eigen::VectorXd grad_b2 = dz2.rowwise().sum();
            Eigen::MatrixXd dz1 = (clf.w2_.transpose() * dz2).cwiseProduct(
                (z1.array() > 0.0).cast<double>().matrix());
            const Eigen::MatrixXd grad_w1 = dz1 * x.transpose();
            const Eigen::VectorXd grad_b1 = dz1.rowwise().sum();

            const double lr = config.learning_rate;
            const double mu = config.momentum;
            vel_w1 = mu * vel_w1 - lr * grad_w1;
            vel_w2 = mu * vel_w2 - lr * grad_w2;
            vel_w3 = mu * vel_w3 - lr * grad_w3;
            vel_b1 = mu * vel_b1 - lr * grad_b1;
            vel_b2 = mu * vel_b2 - lr * grad_b2;
            vel_b3 = mu * vel_b3 - lr * grad_b3;
            clf.w1_ += vel_w1;
            clf.w2_ += vel_w2;
            clf.w3_ += vel_w3;
            clf.b1_ += vel_b1;
            clf.b2_ += vel_b2;
            clf.b3_ += vel_b3;
        }
    }

    const double train_accuracy = accuracy(clf, train);
    if (train_accuracy <= 1.0 / static_cast<double>(train.class_count))
        throw Error(ErrorKind::kTrainingFailure, "training accuracy did not exceed chance");
    return clf;
}

double accuracy(const TinyClassifier& clf, const LabeledImageSet& data) {
    if (data.images.empty())
        throw Error(ErrorKind::kInsufficientData, "accuracy of an empty set is undefined");
    data.validate();
    FeatureBundle bundle = clf.extract(data.images);
    bundle.labels = data.labels;
    return bundle_accuracy(bundle);
}

}  // namespace autoeval
