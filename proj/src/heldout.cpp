#include "autoeval/heldout.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

namespace autoeval {

const char* held_out_name(HeldOutTransformId id) {
    switch (id) {
        case HeldOutTransformId::kCutout: return "cutout";
        case HeldOutTransformId::kShear: return "shear";
        case HeldOutTransformId::kEqualize: return "equalize";
        case HeldOutTransformId::kColorTemperature: return "colorTemperature";
    }
    throw Error(ErrorKind::kParameter, "unknown held-out transform id");
}

void apply_cutout(Raster& image, double side_frac, int center_y, int center_x) {
    const int side = std::max(1, static_cast<int>(std::lround(
                                      side_frac * std::min(image.height, image.width))));
    const int half = side / 2;
    const int y0 = std::clamp(center_y - half, 0, image.height);
    const int x0 = std::clamp(center_x - half, 0, image.width);
    const int y1 = std::clamp(y0 + side, 0, image.height);
    const int x1 = std::clamp(x0 + side, 0, image.width);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            for (int c = 0; c < image.channels; ++c) image.at(y, x, c) = 0.0f;
}

void apply_shear(Raster& image, double shear) {
    // Horizontal shear about the center, zero fill outside.
    const Raster src = image;
    const double cx = 0.5 * (image.width - 1);
    const double cy = 0.5 * (image.height - 1);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const double sx = (x - cx) - shear * (y - cy) + cx;
            if (sx < -0.5 || sx > image.width - 0.5) {
                for (int c = 0; c < image.channels; ++c) image.at(y, x, c) = 0.0f;
                continue;
            }
            for (int c = 0; c < image.channels; ++c)
                image.at(y, x, c) = clamp01(src.sample(static_cast<float>(y), static_cast<float>(sx), c));
        }
}

void apply_equalize(Raster& image) {
    // Classic 256-bin histogram equalization, per channel.
    const int bins = 256;
    for (int c = 0; c < image.channels; ++c) {
        std::array<std::uint32_t, 256> hist{};
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                const int v = std::clamp(static_cast<int>(std::lround(image.at(y, x, c) * 255.0f)),
                                         0, bins - 1);
                ++hist[static_cast<std::size_t>(v)];
            }

        std::array<std::uint32_t, 256> cdf{};
        std::uint32_t running = 0;
        std::uint32_t cdf_min = 0;
        bool found_min = false;
        for (int v = 0; v < bins; ++v) {
            running += hist[static_cast<std::size_t>(v)];
            cdf[static_cast<std::size_t>(v)] = running;
            if (!found_min && hist[static_cast<std::size_t>(v)] > 0) {
                cdf_min = running;
                found_min = true;
            }
        }
        const std::uint32_t total = running;
        if (!found_min || total == cdf_min) continue;  // constant channel

        std::array<float, 256> lut{};
        for (int v = 0; v < bins; ++v) {
            const double num = static_cast<double>(cdf[static_cast<std::size_t>(v)]) - cdf_min;
            const double den = static_cast<double>(total) - cdf_min;
            lut[static_cast<std::size_t>(v)] = clamp01(static_cast<float>(num / den));
        }
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                const int v = std::clamp(static_cast<int>(std::lround(image.at(y, x, c) * 255.0f)),
                                         0, bins - 1);
                image.at(y, x, c) = lut[static_cast<std::size_t>(v)];
            }
    }
}

void apply_color_temperature(Raster& image, double factor) {
    if (image.channels != 3) return;
    const float warm = static_cast<float>(factor);
    const float cool = static_cast<float>(1.0 / factor);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            image.at(y, x, 0) = clamp01(image.at(y, x, 0) * warm);
            image.at(y, x, 2) = clamp01(image.at(y, x, 2) * cool);
        }
}

namespace {

// Sub-range of [lo_mag, hi_mag] magnitudes, mirrored to a random sign.
// Keeps at least `off` distance from zero.
std::pair<double, double> signed_subrange(double off, double hi_mag, CounterRng& rng) {
    const double center = rng.uniform(off, hi_mag);
    const double half = 0.25 * (hi_mag - off) * rng.next_double();
    double lo = std::max(off, center - half);
    double hi = std::min(hi_mag, center + half);
    if (rng.next_double() < 0.5) return {-hi, -lo};
    return {lo, hi};
}

}  // namespace

HeldOutRecipe sample_held_out_recipe(const BackgroundCorpus& corpus, CounterRng& rng) {
    if (corpus.size() == 0)
        throw Error(ErrorKind::kConfig, "cannot sample a held-out recipe from an empty corpus");

    HeldOutRecipe recipe;

    const int source = static_cast<int>(rng.below(corpus.size()));
    const Raster& src = corpus.images[static_cast<std::size_t>(source)];
    const double sx = rng.uniform(0.3, 1.0);
    const double sy = rng.uniform(0.3, 1.0);
    recipe.background.source = source;
    recipe.background.w = std::min(std::max(8, static_cast<int>(std::lround(sx * src.width))), src.width);
    recipe.background.h = std::min(std::max(8, static_cast<int>(std::lround(sy * src.height))), src.height);
    recipe.background.x = static_cast<int>(rng.below(static_cast<std::uint64_t>(src.width - recipe.background.w + 1)));
    recipe.background.y = static_cast<int>(rng.below(static_cast<std::uint64_t>(src.height - recipe.background.h + 1)));

    std::array<int, kHeldOutTransformCount> ids = {0, 1, 2, 3};
    for (int i = 0; i < 3; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(kHeldOutTransformCount - i)));
        std::swap(ids[i], ids[j]);
    }

    for (int i = 0; i < 3; ++i) {
        HeldOutSlot slot;
        slot.id = static_cast<HeldOutTransformId>(ids[i]);
        switch (slot.id) {
            case HeldOutTransformId::kCutout: {
                const double center = rng.uniform(0.10, 0.25);
                const double half = 0.03 * rng.next_double();
                slot.lo = std::max(0.10, center - half);
                slot.hi = std::min(0.25, center + half);
                break;
            }
            case HeldOutTransformId::kShear: {
                std::tie(slot.lo, slot.hi) = signed_subrange(0.08, 0.3, rng);
                break;
            }
            case HeldOutTransformId::kEqualize:
                slot.lo = slot.hi = 0.0;
                break;
            case HeldOutTransformId::kColorTemperature: {
                // Factor range [0.7, 1.3], avoiding the near-identity band.
                auto [lo, hi] = signed_subrange(0.07, 0.3, rng);
                slot.lo = 1.0 + lo;
                slot.hi = 1.0 + hi;
                break;
            }
        }
        recipe.transforms[static_cast<std::size_t>(i)] = slot;
    }
    return recipe;
}

LabeledImageSet apply_held_out_recipe(const LabeledImageSet& seed,
                                      const std::vector<Raster>& masks,
                                      const HeldOutRecipe& recipe, const BackgroundCorpus& corpus,
                                      CounterRng& rng) {
    if (masks.size() != seed.images.size())
        throw Error(ErrorKind::kShape, "mask count does not match seed images");

    LabeledImageSet out;
    out.class_count = seed.class_count;
    out.labels = seed.labels;
    out.images.reserve(seed.images.size());

    const bool replace_background = recipe.background.source != BackgroundSpec::kSeedBackground;
    for (std::size_t i = 0; i < seed.images.size(); ++i) {
        const Raster& fg = seed.images[i];
        Raster img;
        if (replace_background) {
            const Raster patch = crop_background(corpus, recipe.background, fg.height, fg.width, rng);
            img = composite(fg, masks[i], patch);
        } else {
            img = fg;
        }

        for (const HeldOutSlot& slot : recipe.transforms) {
            switch (slot.id) {
                case HeldOutTransformId::kCutout: {
                    const double frac = rng.uniform(slot.lo, slot.hi);
                    const int cy = static_cast<int>(rng.below(static_cast<std::uint64_t>(img.height)));
                    const int cx = static_cast<int>(rng.below(static_cast<std::uint64_t>(img.width)));
                    apply_cutout(img, frac, cy, cx);
                    break;
                }
                case HeldOutTransformId::kShear:
                    apply_shear(img, rng.uniform(slot.lo, slot.hi));
                    break;
                case HeldOutTransformId::kEqualize:
                    apply_equalize(img);
                    break;
                case HeldOutTransformId::kColorTemperature:
                    apply_color_temperature(img, rng.uniform(slot.lo, slot.hi));
                    break;
            }
        }
        out.images.push_back(std::move(img));
    }
    return out;
}

}  // namespace autoeval
