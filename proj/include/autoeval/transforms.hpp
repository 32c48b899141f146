#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "autoeval/raster.hpp"
#include "autoeval/rng.hpp"
#include "autoeval/textures.hpp"

namespace autoeval {

// The six training-catalog transforms. Held-out robustness transforms live in
// a separate enum (heldout.hpp) so a held-out id cannot appear in a training
// recipe by construction.
enum class TransformId : std::uint8_t {
    kAutoContrast = 0,
    kRotation = 1,
    kColor = 2,
    kBrightness = 3,
    kSharpness = 4,
    kTranslation = 5,
};
inline constexpr int kTransformCount = 6;

const char* transform_name(TransformId id);
TransformId transform_from_name(const std::string& name);

struct MagnitudeBounds {
    double lo;
    double hi;
    double identity;  // magnitude at which the transform is a no-op
};

// Catalog magnitude bounds: rotation degrees in [-30,30], translation in
// [-0.2,0.2] of the side, enhancement factors in [0.4,1.6], autoContrast
// parameterless.
MagnitudeBounds catalog_bounds(TransformId id);

// One slot of a recipe: a transform plus the magnitude sub-range its
// per-image magnitudes are drawn from.
struct RecipeTransform {
    TransformId id;
    double lo = 0.0;
    double hi = 0.0;
};

// Background patch source for one sample set: an index into the corpus plus
// a base rectangle (pixels). Per-image crops are random sub-rectangles of
// the base rectangle. `source == kSeedBackground` keeps the original
// background (control recipes only; never sampled).
struct BackgroundSpec {
    static constexpr int kSeedBackground = -1;
    int source = kSeedBackground;
    int x = 0, y = 0, w = 0, h = 0;
};

// Full provenance of one sample set: where the background comes from and the
// ordered three-transform pipeline with magnitude ranges.
struct TransformRecipe {
    BackgroundSpec background;
    std::array<RecipeTransform, 3> transforms;

    // Exactly 3 distinct ids, each range inside catalog bounds.
    void validate() const;
};

// Random recipe: 3-of-6 distinct transforms in random order, each with a
// random magnitude sub-range, and a random-scale random-position background
// patch.
TransformRecipe sample_recipe(const BackgroundCorpus& corpus, CounterRng& rng);

// Recipe that leaves the foreground untouched: rotation 0, brightness 1,
// translation 0, optionally over a corpus background.
TransformRecipe identity_recipe(int background_source = BackgroundSpec::kSeedBackground,
                                const BackgroundCorpus* corpus = nullptr);

// Two-step synthesis for one sample set: per image, replace the background
// with a random crop of the recipe's patch, then apply the three transforms
// in recipe order with per-image magnitudes drawn from the recipe ranges.
// Labels are inherited from the seed; all pixels clamped to [0,1].
LabeledImageSet apply_recipe(const LabeledImageSet& seed, const std::vector<Raster>& masks,
                             const TransformRecipe& recipe, const BackgroundCorpus& corpus,
                             CounterRng& rng);

// Individual pixel ops (exposed for tests and the held-out generators).
void apply_auto_contrast(Raster& image);
void apply_rotation(Raster& image, double degrees);
void apply_color(Raster& image, double factor);
void apply_brightness(Raster& image, double factor);
void apply_sharpness(Raster& image, double factor);
void apply_translation(Raster& image, double dx_frac, double dy_frac);

// Random sub-crop of `spec`'s base rectangle resized to (h, w). Draws three
// values from `rng` (sub-scale, x offset, y offset).
Raster crop_background(const BackgroundCorpus& corpus, const BackgroundSpec& spec,
                       int h, int w, CounterRng& rng);

// mask*fg + (1-mask)*bg, exact at mask values 0 and 1.
Raster composite(const Raster& foreground, const Raster& mask, const Raster& background);

}  // namespace autoeval
