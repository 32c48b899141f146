#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autoeval/errors.hpp"

namespace autoeval {

// Per-image penultimate features and softmax rows for one dataset, plus
// optional ground-truth labels. Float32 end to end so that an exported and
// re-imported bundle is bit-identical to the in-memory one.
struct FeatureBundle {
    Eigen::MatrixXf features;  // M x d
    Eigen::MatrixXf softmax;   // M x K
    std::optional<std::vector<std::uint32_t>> labels;
    std::string source_id;

    std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
    int feature_dim() const { return static_cast<int>(features.cols()); }
    int class_count() const { return static_cast<int>(softmax.cols()); }

    // Invariants: row counts match and M >= 2; softmax rows non-negative and
    // summing to 1 within `softmax_tol`; labels (if present) sized M and
    // inside [0, K); everything finite.
    void validate(double softmax_tol = 1e-6) const;
};

// Argmax class per row, ties broken by lowest class index.
std::vector<std::uint32_t> bundle_predictions(const FeatureBundle& bundle);

// Fraction of rows whose argmax equals the stored label. Throws
// Error(kValidation) when the bundle has no labels.
double bundle_accuracy(const FeatureBundle& bundle);

// Binary bundle format, little-endian:
//   magic "AEFB", version u32, M u64, d u32, K u32, has_labels u8,
//   features M*d f32, softmax M*K f32, labels M*u32 when present.
void export_feature_bundle(const FeatureBundle& bundle, const std::string& path);
FeatureBundle import_feature_bundle(const std::string& path);

}  // namespace autoeval
