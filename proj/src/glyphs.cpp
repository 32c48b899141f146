#include "autoeval/glyphs.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "autoeval/rng.hpp"

namespace autoeval {

namespace {

struct Point {
    float x, y;
};

struct Segment {
    Point a, b;
};

// Seven-segment layout on a unit box (x right, y down), 2:3-ish aspect
// handled by the placement transform.
constexpr Point kTL{0.0f, 0.0f}, kTR{1.0f, 0.0f};
constexpr Point kML{0.0f, 0.5f}, kMR{1.0f, 0.5f};
constexpr Point kBL{0.0f, 1.0f}, kBR{1.0f, 1.0f};

const std::array<Segment, 7> kSegments = {{
    {kTL, kTR},  // A top
    {kTR, kMR},  // B upper right
    {kMR, kBR},  // C lower right
    {kBL, kBR},  // D bottom
    {kML, kBL},  // E lower left
    {kTL, kML},  // F upper left
    {kML, kMR},  // G middle
}};

// Active segments per digit, bit i = kSegments[i].
constexpr std::array<std::uint8_t, 10> kDigitSegments = {
    0b0111111,  // 0: ABCDEF
    0b0000110,  // 1: BC
    0b1011011,  // 2: ABDEG
    0b1001111,  // 3: ABCDG
    0b1100110,  // 4: BCFG
    0b1101101,  // 5: ACDFG
    0b1111101,  // 6: ACDEFG
    0b0000111,  // 7: ABC
    0b1111111,  // 8: all
    0b1101111,  // 9: ABCDFG
};

std::vector<Segment> class_strokes(std::uint32_t cls) {
    std::vector<Segment> strokes;
    if (cls < 10) {
        for (std::size_t i = 0; i < kSegments.size(); ++i)
            if (kDigitSegments[cls] & (1u << i)) strokes.push_back(kSegments[i]);
        return strokes;
    }
    // Classes beyond the digit vocabulary: a deterministic 5-stroke walk on a
    // 3x4 lattice keyed by the class id.
    CounterRng rng(0x6175746F65766Cull, cls);
    Point prev{static_cast<float>(rng.below(3)) / 2.0f,
               static_cast<float>(rng.below(4)) / 3.0f};
    for (int i = 0; i < 5; ++i) {
        Point next{static_cast<float>(rng.below(3)) / 2.0f,
                   static_cast<float>(rng.below(4)) / 3.0f};
        if (next.x == prev.x && next.y == prev.y) {
            next.x = prev.x < 0.5f ? 1.0f : 0.0f;
        }
        strokes.push_back({prev, next});
        prev = next;
    }
    return strokes;
}

float point_segment_distance(float px, float py, const Segment& s) {
    const float vx = s.b.x - s.a.x;
    const float vy = s.b.y - s.a.y;
    const float wx = px - s.a.x;
    const float wy = py - s.a.y;
    const float vv = vx * vx + vy * vy;
    float t = vv > 0.0f ? (wx * vx + wy * vy) / vv : 0.0f;
    t = std::clamp(t, 0.0f, 1.0f);
    const float dx = px - (s.a.x + t * vx);
    const float dy = py - (s.a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

SeedSet render_seed(const GlyphSeedConfig& config) {
    config.validate();

    const int h = config.height;
    const int w = config.width;
    const float side = static_cast<float>(std::min(h, w));

    SeedSet out;
    out.images.class_count = config.class_count;
    out.images.images.reserve(static_cast<std::size_t>(config.class_count) * config.images_per_class);
    out.images.labels.reserve(out.images.images.capacity());
    out.masks.reserve(out.images.images.capacity());

    for (std::uint32_t cls = 0; cls < config.class_count; ++cls) {
        const std::vector<Segment> strokes = class_strokes(cls);
        for (std::uint32_t rep = 0; rep < config.images_per_class; ++rep) {
            // One stream per (class, replica) so image identity does not
            // depend on render order.
            CounterRng rng(config.rng_seed, (static_cast<std::uint64_t>(cls) << 32) | rep);

            const float thickness = static_cast<float>(rng.uniform(config.stroke_min, config.stroke_max));
            const float scale = static_cast<float>(rng.uniform(0.78, 0.95));
            const float angle = static_cast<float>(rng.uniform(-0.14, 0.14));  // radians, ~8 deg
            const float jx = static_cast<float>(rng.uniform(-0.05, 0.05)) * side;
            const float jy = static_cast<float>(rng.uniform(-0.05, 0.05)) * side;
            const float fg_level = static_cast<float>(rng.uniform(0.85, 1.0));

            // Map the unit glyph box to pixel space: 0.36*side wide,
            // 0.62*side tall, centered with jitter, then rotated.
            const float gw = 0.36f * side * scale;
            const float gh = 0.62f * side * scale;
            const float cx = 0.5f * static_cast<float>(w) + jx;
            const float cy = 0.5f * static_cast<float>(h) + jy;
            const float ca = std::cos(angle);
            const float sa = std::sin(angle);

            std::vector<Segment> placed(strokes.size());
            for (std::size_t i = 0; i < strokes.size(); ++i) {
                auto map = [&](Point p) {
                    const float lx = (p.x - 0.5f) * gw;
                    const float ly = (p.y - 0.5f) * gh;
                    return Point{cx + ca * lx - sa * ly, cy + sa * lx + ca * ly};
                };
                placed[i] = {map(strokes[i].a), map(strokes[i].b)};
            }

            Raster image(h, w, 3);
            Raster mask(h, w, 1);
            const float half = 0.5f * thickness;
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    float best = 1e9f;
                    for (const Segment& s : placed)
                        best = std::min(best, point_segment_distance(static_cast<float>(x) + 0.5f,
                                                                     static_cast<float>(y) + 0.5f, s));
                    // 1-pixel anti-aliasing band around the stroke edge.
                    const float coverage = clamp01(half + 0.5f - best);
                    if (coverage > 0.0f) {
                        mask.at(y, x, 0) = coverage;
                        const float value = coverage * fg_level;
                        image.at(y, x, 0) = value;
                        image.at(y, x, 1) = value;
                        image.at(y, x, 2) = value;
                    }
                }
            }

            out.images.images.push_back(std::move(image));
            out.images.labels.push_back(cls);
            out.masks.push_back(std::move(mask));
        }
    }
    out.images.validate();
    return out;
}

SeedSet subsample_seed(const SeedSet& seed, std::size_t total, CounterRng& rng) {
    const std::size_t n = seed.images.size();
    if (total >= n) return seed;
    const std::uint32_t k = seed.images.class_count;

    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < n; ++i)
        by_class[seed.images.labels[i]].push_back(i);

    // Balanced draw: total/k per class, remainder spread over low class ids.
    std::vector<std::size_t> chosen;
    chosen.reserve(total);
    for (std::uint32_t cls = 0; cls < k; ++cls) {
        std::size_t want = total / k + (cls < total % k ? 1 : 0);
        auto& pool = by_class[cls];
        rng.shuffle(pool);
        want = std::min(want, pool.size());
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    }
    std::sort(chosen.begin(), chosen.end());

    SeedSet out;
    out.images.class_count = k;
    for (std::size_t idx : chosen) {
        out.images.images.push_back(seed.images.images[idx]);
        out.images.labels.push_back(seed.images.labels[idx]);
        out.masks.push_back(seed.masks[idx]);
    }
    return out;
}

}  // namespace autoeval
