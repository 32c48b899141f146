#include "autoeval/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace autoeval {

const char* transform_name(TransformId id) {
    switch (id) {
        case TransformId::kAutoContrast: return "autoContrast";
        case TransformId::kRotation: return "rotation";
        case TransformId::kColor: return "color";
        case TransformId::kBrightness: return "brightness";
        case TransformId::kSharpness: return "sharpness";
        case TransformId::kTranslation: return "translation";
    }
    throw Error(ErrorKind::kParameter, "unknown transform id");
}

TransformId transform_from_name(const std::string& name) {
    for (int i = 0; i < kTransformCount; ++i) {
        const auto id = static_cast<TransformId>(i);
        if (name == transform_name(id)) return id;
    }
    throw Error(ErrorKind::kFormat, "unknown transform name: " + name);
}

MagnitudeBounds catalog_bounds(TransformId id) {
    switch (id) {
        case TransformId::kAutoContrast: return {0.0, 0.0, 0.0};
        case TransformId::kRotation: return {-30.0, 30.0, 0.0};
        case TransformId::kColor: return {0.4, 1.6, 1.0};
        case TransformId::kBrightness: return {0.4, 1.6, 1.0};
        case TransformId::kSharpness: return {0.4, 1.6, 1.0};
        case TransformId::kTranslation: return {-0.2, 0.2, 0.0};
    }
    throw Error(ErrorKind::kParameter, "unknown transform id");
}

void TransformRecipe::validate() const {
    for (std::size_t i = 0; i < transforms.size(); ++i) {
        const auto& t = transforms[i];
        const MagnitudeBounds bounds = catalog_bounds(t.id);
        if (t.lo < bounds.lo - 1e-12 || t.hi > bounds.hi + 1e-12 || t.lo > t.hi)
            throw Error(ErrorKind::kValidation,
                        std::string("magnitude range outside catalog bounds for ") +
                            transform_name(t.id));
        for (std::size_t j = i + 1; j < transforms.size(); ++j)
            if (transforms[j].id == t.id)
                throw Error(ErrorKind::kValidation, "recipe repeats a transform id");
    }
    if (background.source != BackgroundSpec::kSeedBackground &&
        (background.w <= 0 || background.h <= 0))
        throw Error(ErrorKind::kValidation, "background patch rectangle is empty");
}

TransformRecipe sample_recipe(const BackgroundCorpus& corpus, CounterRng& rng) {
    if (corpus.size() == 0)
        throw Error(ErrorKind::kConfig, "cannot sample a recipe from an empty background corpus");

    TransformRecipe recipe;

    // Background: random source image, random-scale random-position patch.
    const int source = static_cast<int>(rng.below(corpus.size()));
    const Raster& src = corpus.images[static_cast<std::size_t>(source)];
    const double sx = rng.uniform(0.3, 1.0);
    const double sy = rng.uniform(0.3, 1.0);
    const int w = std::max(8, static_cast<int>(std::lround(sx * src.width)));
    const int h = std::max(8, static_cast<int>(std::lround(sy * src.height)));
    recipe.background.source = source;
    recipe.background.w = std::min(w, src.width);
    recipe.background.h = std::min(h, src.height);
    recipe.background.x = static_cast<int>(rng.below(static_cast<std::uint64_t>(src.width - recipe.background.w + 1)));
    recipe.background.y = static_cast<int>(rng.below(static_cast<std::uint64_t>(src.height - recipe.background.h + 1)));

    // 3-of-6 distinct transforms, order as drawn.
    std::array<int, kTransformCount> ids = {0, 1, 2, 3, 4, 5};
    for (int i = 0; i < 3; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(kTransformCount - i)));
        std::swap(ids[i], ids[j]);
    }

    // Each slot gets a sub-range of the catalog bounds: random center, random
    // half-width up to a quarter of the catalog span. Narrow ranges keep the
    // set's per-image magnitudes clustered, so distinct recipes land at
    // distinct points of the shift spectrum.
    for (int i = 0; i < 3; ++i) {
        RecipeTransform slot;
        slot.id = static_cast<TransformId>(ids[i]);
        const MagnitudeBounds bounds = catalog_bounds(slot.id);
        const double span = bounds.hi - bounds.lo;
        const double center = rng.uniform(bounds.lo, bounds.hi);
        const double half_width = 0.25 * span * rng.next_double();
        slot.lo = std::max(bounds.lo, center - half_width);
        slot.hi = std::min(bounds.hi, center + half_width);
        recipe.transforms[static_cast<std::size_t>(i)] = slot;
    }
    recipe.validate();
    return recipe;
}

TransformRecipe identity_recipe(int background_source, const BackgroundCorpus* corpus) {
    TransformRecipe recipe;
    recipe.transforms = {{{TransformId::kRotation, 0.0, 0.0},
                          {TransformId::kBrightness, 1.0, 1.0},
                          {TransformId::kTranslation, 0.0, 0.0}}};
    recipe.background.source = background_source;
    if (background_source != BackgroundSpec::kSeedBackground) {
        if (corpus == nullptr || background_source >= static_cast<int>(corpus->size()))
            throw Error(ErrorKind::kConfig, "identity recipe background source out of range");
        const Raster& src = corpus->images[static_cast<std::size_t>(background_source)];
        recipe.background.x = 0;
        recipe.background.y = 0;
        recipe.background.w = src.width;
        recipe.background.h = src.height;
    }
    recipe.validate();
    return recipe;
}

void apply_auto_contrast(Raster& image) {
    for (int c = 0; c < image.channels; ++c) {
        float lo = 1.0f, hi = 0.0f;
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                const float v = image.at(y, x, c);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        if (hi <= lo) continue;
        const float scale = 1.0f / (hi - lo);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                image.at(y, x, c) = clamp01((image.at(y, x, c) - lo) * scale);
    }
}

namespace {

// Inverse-mapped affine resample, zero fill outside the source frame.
void affine_resample(Raster& image, double m00, double m01, double m10, double m11,
                     double tx, double ty) {
    const Raster src = image;
    const double cx = 0.5 * (image.width - 1);
    const double cy = 0.5 * (image.height - 1);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const double rx = x - cx - tx;
            const double ry = y - cy - ty;
            const double sx = m00 * rx + m01 * ry + cx;
            const double sy = m10 * rx + m11 * ry + cy;
            if (sx < -0.5 || sy < -0.5 || sx > image.width - 0.5 || sy > image.height - 0.5) {
                for (int c = 0; c < image.channels; ++c) image.at(y, x, c) = 0.0f;
                continue;
            }
            for (int c = 0; c < image.channels; ++c)
                image.at(y, x, c) = clamp01(src.sample(static_cast<float>(sy), static_cast<float>(sx), c));
        }
    }
}

}  // namespace

void apply_rotation(Raster& image, double degrees) {
    const double rad = degrees * 3.14159265358979323846 / 180.0;
    const double ca = std::cos(rad), sa = std::sin(rad);
    // Inverse rotation matrix maps output coords back to source coords.
    affine_resample(image, ca, sa, -sa, ca, 0.0, 0.0);
}

void apply_color(Raster& image, double factor) {
    if (image.channels != 3) return;
    const float f = static_cast<float>(factor);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const float gray = 0.299f * image.at(y, x, 0) + 0.587f * image.at(y, x, 1) +
                               0.114f * image.at(y, x, 2);
            for (int c = 0; c < 3; ++c)
                image.at(y, x, c) = clamp01(gray + f * (image.at(y, x, c) - gray));
        }
}

void apply_brightness(Raster& image, double factor) {
    const float f = static_cast<float>(factor);
    for (auto& v : image.data) v = clamp01(v * f);
}

void apply_sharpness(Raster& image, double factor) {
    // Blend against a 3x3 smoothing (center weight 5, total 13), clamp-to-edge.
    const Raster src = image;
    const float f = static_cast<float>(factor);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < image.channels; ++c) {
                float acc = 0.0f;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int yy = std::clamp(y + dy, 0, image.height - 1);
                        const int xx = std::clamp(x + dx, 0, image.width - 1);
                        const float wgt = (dy == 0 && dx == 0) ? 5.0f : 1.0f;
                        acc += wgt * src.at(yy, xx, c);
                    }
                const float smooth = acc / 13.0f;
                image.at(y, x, c) = clamp01(smooth + f * (src.at(y, x, c) - smooth));
            }
}

void apply_translation(Raster& image, double dx_frac, double dy_frac) {
    const double tx = dx_frac * image.width;
    const double ty = dy_frac * image.height;
    affine_resample(image, 1.0, 0.0, 0.0, 1.0, tx, ty);
}

Raster crop_background(const BackgroundCorpus& corpus, const BackgroundSpec& spec,
                       int h, int w, CounterRng& rng) {
    if (spec.source == BackgroundSpec::kSeedBackground)
        throw Error(ErrorKind::kParameter, "crop_background called for seed background");
    if (spec.source < 0 || spec.source >= static_cast<int>(corpus.size()))
        throw Error(ErrorKind::kConfig, "background source index out of range");
    const Raster& src = corpus.images[static_cast<std::size_t>(spec.source)];

    // Per-image sub-crop of the recipe's base patch.
    const double sub_scale = rng.uniform(0.5, 1.0);
    const int sub_w = std::max(4, static_cast<int>(std::lround(sub_scale * spec.w)));
    const int sub_h = std::max(4, static_cast<int>(std::lround(sub_scale * spec.h)));
    const int max_dx = std::max(0, spec.w - sub_w);
    const int max_dy = std::max(0, spec.h - sub_h);
    const int x0 = spec.x + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dx + 1)));
    const int y0 = spec.y + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dy + 1)));

    Raster out(h, w, 3);
    const float step_x = static_cast<float>(sub_w) / static_cast<float>(w);
    const float step_y = static_cast<float>(sub_h) / static_cast<float>(h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float sx = static_cast<float>(x0) + (static_cast<float>(x) + 0.5f) * step_x - 0.5f;
            const float sy = static_cast<float>(y0) + (static_cast<float>(y) + 0.5f) * step_y - 0.5f;
            for (int c = 0; c < 3; ++c)
                out.at(y, x, c) = clamp01(src.sample(sy, sx, c));
        }
    return out;
}

Raster composite(const Raster& foreground, const Raster& mask, const Raster& background) {
    if (!foreground.same_shape(background) || mask.height != foreground.height ||
        mask.width != foreground.width || mask.channels != 1)
        throw Error(ErrorKind::kShape, "composite shape mismatch");
    Raster out = foreground;
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            const float m = mask.at(y, x, 0);
            if (m >= 1.0f) continue;  // pure foreground, keep exact bytes
            for (int c = 0; c < out.channels; ++c) {
                const float bg = background.at(y, x, c);
                out.at(y, x, c) = (m <= 0.0f) ? bg : m * foreground.at(y, x, c) + (1.0f - m) * bg;
            }
        }
    return out;
}

LabeledImageSet apply_recipe(const LabeledImageSet& seed, const std::vector<Raster>& masks,
                             const TransformRecipe& recipe, const BackgroundCorpus& corpus,
                             CounterRng& rng) {
    recipe.validate();
    if (masks.size() != seed.images.size())
        throw Error(ErrorKind::kShape, "mask count does not match seed images");
    const bool replace_background = recipe.background.source != BackgroundSpec::kSeedBackground;
    if (replace_background && corpus.size() == 0)
        throw Error(ErrorKind::kConfig, "recipe needs a background corpus but it is empty");

    LabeledImageSet out;
    out.class_count = seed.class_count;
    out.labels = seed.labels;  // sample sets inherit every seed label
    out.images.reserve(seed.images.size());

    for (std::size_t i = 0; i < seed.images.size(); ++i) {
        const Raster& fg = seed.images[i];
        Raster img;
        if (replace_background) {
            const Raster patch = crop_background(corpus, recipe.background, fg.height, fg.width, rng);
            img = composite(fg, masks[i], patch);
        } else {
            img = fg;
        }

        // Per-image magnitudes, drawn in recipe order. Translation consumes
        // two draws (x and y); the others one; autoContrast none.
        for (const RecipeTransform& slot : recipe.transforms) {
            switch (slot.id) {
                case TransformId::kAutoContrast:
                    apply_auto_contrast(img);
                    break;
                case TransformId::kRotation:
                    apply_rotation(img, rng.uniform(slot.lo, slot.hi));
                    break;
                case TransformId::kColor:
                    apply_color(img, rng.uniform(slot.lo, slot.hi));
                    break;
                case TransformId::kBrightness:
                    apply_brightness(img, rng.uniform(slot.lo, slot.hi));
                    break;
                case TransformId::kSharpness:
                    apply_sharpness(img, rng.uniform(slot.lo, slot.hi));
                    break;
                case TransformId::kTranslation:
                    apply_translation(img, rng.uniform(slot.lo, slot.hi), rng.uniform(slot.lo, slot.hi));
                    break;
            }
        }
        out.images.push_back(std::move(img));
    }
    return out;
}

}  // namespace autoeval
