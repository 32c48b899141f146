#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "autoeval/classifier.hpp"
#include "autoeval/glyphs.hpp"
#include "autoeval/stats.hpp"
#include "autoeval/transforms.hpp"

namespace autoeval {

// One synthesized sample set, reduced to what the regressors train on. The
// images themselves are not kept; (provenance, recipe, id) regenerate them
// bit-exactly.
struct SampleSetRecord {
    std::uint64_t id = 0;  // record index; also selects the rng streams
    TransformRecipe recipe;
    DatasetStats stats;
    double fd = 0.0;
    double accuracy = 0.0;
    std::size_t image_count = 0;
};

struct MetaProvenance {
    GlyphSeedConfig seed_config;
    std::uint64_t rng_seed = 0;
    std::uint64_t classifier_hash = 0;
    std::uint64_t corpus_hash = 0;
};

struct MetaDataset {
    std::vector<SampleSetRecord> records;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> val_indices;
    MetaProvenance provenance;

    std::size_t size() const { return records.size(); }
    void validate() const;  // disjoint splits covering all records, record invariants
};

struct MetaBuildConfig {
    std::size_t n_sets = 200;
    std::size_t set_size = 0;  // images per sample set; 0 = full seed
    unsigned split_train = 2;  // train:val ratio
    unsigned split_val = 1;
    int jobs = 1;
};

// Rng stream layout: record `id` uses stream 4*id for recipe sampling and
// 4*id+1 for materialization, so a recipe loaded from a manifest can be
// re-materialized without replaying the sampling draws.
std::uint64_t record_recipe_stream(std::uint64_t id);
std::uint64_t record_body_stream(std::uint64_t id);

// Everything derived from one sample set in one pass.
struct MaterializedSet {
    LabeledImageSet images;
    FeatureBundle bundle;
    DatasetStats stats;
    double fd = 0.0;
    double accuracy = 0.0;
};

// Subsample (when set_size > 0 and smaller than the seed), synthesize with
// the recipe, extract features, and compute stats / FD / true accuracy.
MaterializedSet materialize_sample_set(const SeedSet& seed, const TransformRecipe& recipe,
                                       const TinyClassifier& clf, const DatasetStats& ori_stats,
                                       const BackgroundCorpus& corpus, std::size_t set_size,
                                       CounterRng& rng);

using RecipeSampler = std::function<TransformRecipe(CounterRng&)>;

// N independent records, each labeled with the classifier's true accuracy.
// Deterministic given rng_seed; identical for any job count. A custom
// `sampler` overrides the default 3-of-6 recipe draw (control experiments).
MetaDataset build_meta_dataset(const SeedSet& seed, const TinyClassifier& clf,
                               const DatasetStats& ori_stats, const MetaBuildConfig& config,
                               const BackgroundCorpus& corpus, std::uint64_t rng_seed,
                               const RecipeSampler& sampler = {});

// Binary stats file: magic "AEDS", version, d u32, count u64, mean f64[d],
// cov f64[d*d] row-major.
void write_dataset_stats(const DatasetStats& stats, const std::string& path);
DatasetStats read_dataset_stats(const std::string& path);

// Manifest: one JSON object per line. First line holds format/provenance,
// each following line one record (with a relative stats-file path).
// `write` also writes the per-record stats files under `stats_dir`.
void write_meta_manifest(const MetaDataset& meta, const std::string& manifest_path,
                         const std::string& stats_dir);
MetaDataset read_meta_manifest(const std::string& manifest_path);

}  // namespace autoeval
