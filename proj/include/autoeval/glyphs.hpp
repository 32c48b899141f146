#pragma once

#include <cstdint>
#include <vector>

#include "autoeval/raster.hpp"

namespace autoeval {

// Procedural glyph seed set: K classes of stroke-based glyphs rendered onto a
// black background with anti-aliased edges and per-image pose/thickness
// jitter. Classes 0..9 are seven-segment digit shapes; higher classes get
// deterministic random stroke patterns derived from the class id.
struct GlyphSeedConfig {
    std::uint32_t class_count = 10;
    std::uint32_t images_per_class = 100;
    int height = 28;
    int width = 28;
    float stroke_min = 1.4f;  // stroke thickness jitter range, pixels
    float stroke_max = 2.4f;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (class_count < 2)
            throw Error(ErrorKind::kConfig, "glyph class count must be >= 2");
        if (height < 16 || width < 16)
            throw Error(ErrorKind::kConfig, "glyph raster must be at least 16x16");
        if (images_per_class == 0)
            throw Error(ErrorKind::kConfig, "images_per_class must be positive");
        if (!(stroke_min > 0.0f) || stroke_max < stroke_min)
            throw Error(ErrorKind::kConfig, "invalid stroke thickness range");
    }
};

struct SeedSet {
    LabeledImageSet images;      // 3-channel, glyph gray replicated to RGB
    std::vector<Raster> masks;   // 1-channel foreground coverage in [0,1]
};

// Deterministic given the config: same config -> identical bytes. Labels are
// balanced (images_per_class per class, grouped by class).
SeedSet render_seed(const GlyphSeedConfig& config);

// Balanced subsample of `seed`: per class, `per_class` images chosen without
// replacement using `rng`. Used by the sample-set-size ablation.
SeedSet subsample_seed(const SeedSet& seed, std::size_t total, class CounterRng& rng);

}  // namespace autoeval
