#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autoeval/classifier.hpp"
#include "autoeval/glyphs.hpp"
#include "autoeval/predictors.hpp"

namespace autoeval {

// Everything an experiment run needs, mirroring the sectioned key-value
// config file one to one. Defaults here are the desk-scale defaults.
struct ExperimentConfig {
    // [run]
    std::uint64_t seed = 7;
    int jobs = 0;  // 0 = all cores
    std::string out_dir = "out";

    // [glyphs]
    std::uint32_t classes = 10;
    std::uint32_t train_per_class = 100;
    std::uint32_t seed_per_class = 50;
    int height = 28;
    int width = 28;
    float stroke_min = 1.4f;
    float stroke_max = 2.4f;

    // [classifier]
    ClassifierConfig classifier;

    // [meta]
    std::size_t meta_sets = 200;
    std::size_t set_size = 0;  // 0 = full seed
    unsigned split_train = 2;
    unsigned split_val = 1;
    std::size_t textures = 48;
    std::string background_dir;
    bool procedural_textures = true;
    bool identity_recipes = false;  // pipeline self-check knob

    // [predictors]
    std::vector<double> taus = {0.7, 0.8, 0.9};
    double huber_delta = 1.345;
    NeuralConfig neural;

    // [eval]
    std::size_t heldout_sets = 40;
    std::size_t robustness_sets = 24;
    // CI thresholds; non-positive disables a check.
    double max_neural_rmse = 0.10;        // absolute accuracy units
    bool require_neural_beats_linear = true;
    double robust_abs_err = 0.15;
    double robust_fraction = 0.75;

    // [ablate]
    std::vector<std::size_t> ablate_meta_sizes = {25, 50, 100, 200};
    std::vector<std::size_t> ablate_set_sizes = {50, 125, 250, 500};

    void validate() const;

    GlyphSeedConfig train_glyph_config() const;
    GlyphSeedConfig synth_glyph_config() const;
};

// Flat `key = value` lines under `[section]` headers, `#` comments.
// Unknown sections or keys are configuration errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

}  // namespace autoeval
