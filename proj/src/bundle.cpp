#include "autoeval/bundle.hpp"

#include <cmath>

#include "autoeval/binary_io.hpp"

namespace autoeval {

namespace {
constexpr char kMagic[4] = {'A', 'E', 'F', 'B'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void FeatureBundle::validate(double softmax_tol) const {
    if (features.rows() != softmax.rows())
        throw Error(ErrorKind::kValidation, "feature/softmax row count mismatch");
    if (features.rows() < 2)
        throw Error(ErrorKind::kValidation, "bundle holds fewer than 2 rows");
    if (!features.allFinite() || !softmax.allFinite())
        throw Error(ErrorKind::kValidation, "bundle contains non-finite values");
    for (Eigen::Index i = 0; i < softmax.rows(); ++i) {
        if (softmax.row(i).minCoeff() < 0.0f)
            throw Error(ErrorKind::kValidation, "negative softmax entry");
        const double sum = softmax.row(i).cast<double>().sum();
        if (std::abs(sum - 1.0) > softmax_tol)
            throw Error(ErrorKind::kValidation, "softmax row not normalized");
    }
    if (labels) {
        if (labels->size() != size())
            throw Error(ErrorKind::kValidation, "label count does not match rows");
        for (auto label : *labels)
            if (label >= static_cast<std::uint32_t>(class_count()))
                throw Error(ErrorKind::kValidation, "label outside [0, K)");
    }
}

std::vector<std::uint32_t> bundle_predictions(const FeatureBundle& bundle) {
    std::vector<std::uint32_t> preds(bundle.size());
    for (Eigen::Index i = 0; i < bundle.softmax.rows(); ++i) {
        // First strict maximum keeps the lowest index on ties.
        std::uint32_t best = 0;
        float best_value = bundle.softmax(i, 0);
        for (Eigen::Index k = 1; k < bundle.softmax.cols(); ++k) {
            if (bundle.softmax(i, k) > best_value) {
                best_value = bundle.softmax(i, k);
                best = static_cast<std::uint32_t>(k);
            }
        }
        preds[static_cast<std::size_t>(i)] = best;
    }
    return preds;
}

double bundle_accuracy(const FeatureBundle& bundle) {
    if (!bundle.labels)
        throw Error(ErrorKind::kValidation, "bundle has no labels; accuracy unavailable");
    if (bundle.size() == 0)
        throw Error(ErrorKind::kInsufficientData, "empty bundle");
    const auto preds = bundle_predictions(bundle);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == (*bundle.labels)[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

void export_feature_bundle(const FeatureBundle& bundle, const std::string& path) {
    BinaryWriter out(path);
    out.magic(kMagic);
    out.u32(kVersion);
    out.u64(bundle.size());
    out.u32(static_cast<std::uint32_t>(bundle.feature_dim()));
    out.u32(static_cast<std::uint32_t>(bundle.class_count()));
    out.u8(bundle.labels ? 1 : 0);
    for (Eigen::Index i = 0; i < bundle.features.rows(); ++i)
        for (Eigen::Index j = 0; j < bundle.features.cols(); ++j)
            out.f32(bundle.features(i, j));
    for (Eigen::Index i = 0; i < bundle.softmax.rows(); ++i)
        for (Eigen::Index j = 0; j < bundle.softmax.cols(); ++j)
            out.f32(bundle.softmax(i, j));
    if (bundle.labels) out.u32_array(bundle.labels->data(), bundle.labels->size());
    out.close();
}

FeatureBundle import_feature_bundle(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic(kMagic);
    const std::uint32_t version = in.u32();
    if (version != kVersion)
        throw Error(ErrorKind::kFormat, "unsupported bundle version in " + path);
    const std::uint64_t m = in.u64();
    const std::uint32_t d = in.u32();
    const std::uint32_t k = in.u32();
    const std::uint8_t has_labels = in.u8();
    if (m < 2 || d == 0 || k == 0 || m > (1ull << 32))
        throw Error(ErrorKind::kFormat, "implausible bundle dimensions in " + path);

    FeatureBundle bundle;
    bundle.source_id = path;
    bundle.features.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    bundle.softmax.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < bundle.features.rows(); ++i)
        for (Eigen::Index j = 0; j < bundle.features.cols(); ++j)
            bundle.features(i, j) = in.f32();
    for (Eigen::Index i = 0; i < bundle.softmax.rows(); ++i)
        for (Eigen::Index j = 0; j < bundle.softmax.cols(); ++j)
            bundle.softmax(i, j) = in.f32();
    if (has_labels == 1) {
        std::vector<std::uint32_t> labels(m);
        in.u32_array(labels.data(), labels.size());
        bundle.labels = std::move(labels);
    } else if (has_labels != 0) {
        throw Error(ErrorKind::kFormat, "bad has_labels flag in " + path);
    }
    // Import is the trust boundary: softmax drift beyond 1e-4 is rejected.
    bundle.validate(1e-4);
    return bundle;
}

}  // namespace autoeval
