#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "autoeval/glyphs.hpp"
#include "autoeval/transforms.hpp"

namespace autoeval {

// Robustness-only transform families. A separate enum from TransformId, so a
// held-out id can never appear inside a training TransformRecipe.
enum class HeldOutTransformId : std::uint8_t {
    kCutout = 0,
    kShear = 1,
    kEqualize = 2,
    kColorTemperature = 3,
};
inline constexpr int kHeldOutTransformCount = 4;

const char* held_out_name(HeldOutTransformId id);

struct HeldOutSlot {
    HeldOutTransformId id;
    double lo = 0.0;
    double hi = 0.0;
};

struct HeldOutRecipe {
    BackgroundSpec background;
    std::array<HeldOutSlot, 3> transforms;  // 3-of-4 distinct families
};

// Magnitude catalogs: cutout square covers 10-25% of the side; shear in
// [-0.3, 0.3]; equalize parameterless; color temperature factor in
// [0.7, 1.3]. Sampled sub-ranges keep away from the identity so every
// held-out set is genuinely corrupted.
HeldOutRecipe sample_held_out_recipe(const BackgroundCorpus& corpus, CounterRng& rng);

LabeledImageSet apply_held_out_recipe(const LabeledImageSet& seed,
                                      const std::vector<Raster>& masks,
                                      const HeldOutRecipe& recipe, const BackgroundCorpus& corpus,
                                      CounterRng& rng);

// Individual ops (exposed for tests).
void apply_cutout(Raster& image, double side_frac, int center_y, int center_x);
void apply_shear(Raster& image, double shear);
void apply_equalize(Raster& image);
void apply_color_temperature(Raster& image, double factor);

}  // namespace autoeval
