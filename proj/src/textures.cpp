#include "autoeval/textures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "autoeval/hash.hpp"
#include "autoeval/rng.hpp"

namespace autoeval {

namespace fs = std::filesystem;

void BackgroundCorpus::recompute_hash() {
    Fnv1a64 h;
    for (std::size_t i = 0; i < images.size(); ++i) {
        h.update(names[i]);
        const Raster& r = images[i];
        h.update_value(r.height);
        h.update_value(r.width);
        h.update_value(r.channels);
        h.update(r.data.data(), r.data.size() * sizeof(float));
    }
    content_hash = h.digest();
}

namespace {

constexpr int kTextureSide = 64;

enum class Kind { kNoise, kSmoothNoise, kGradient, kStripes, kChecker, kBlobs };
constexpr int kKindCount = 6;

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::kNoise: return "noise";
        case Kind::kSmoothNoise: return "smooth";
        case Kind::kGradient: return "gradient";
        case Kind::kStripes: return "stripes";
        case Kind::kChecker: return "checker";
        case Kind::kBlobs: return "blobs";
    }
    return "texture";
}

Raster render_texture(Kind kind, float level, CounterRng& rng) {
    const int s = kTextureSide;
    Raster img(s, s, 3);

    // Two base colors scaled by the corpus brightness level.
    float c0[3], c1[3];
    for (int c = 0; c < 3; ++c) {
        c0[c] = level * static_cast<float>(rng.uniform(0.0, 1.0));
        c1[c] = level * static_cast<float>(rng.uniform(0.3, 1.0));
    }

    switch (kind) {
        case Kind::kNoise: {
            for (auto& v : img.data) v = level * static_cast<float>(rng.next_double());
            break;
        }
        case Kind::kSmoothNoise: {
            // Low-resolution noise field upsampled bilinearly.
            const int g = 5;
            std::vector<float> grid(static_cast<std::size_t>(g) * g * 3);
            for (auto& v : grid) v = level * static_cast<float>(rng.next_double());
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x) {
                    const float gy = static_cast<float>(y) / (s - 1) * (g - 1);
                    const float gx = static_cast<float>(x) / (s - 1) * (g - 1);
                    const int y0 = std::min(static_cast<int>(gy), g - 2);
                    const int x0 = std::min(static_cast<int>(gx), g - 2);
                    const float wy = gy - static_cast<float>(y0);
                    const float wx = gx - static_cast<float>(x0);
                    for (int c = 0; c < 3; ++c) {
                        auto at = [&](int yy, int xx) {
                            return grid[(static_cast<std::size_t>(yy) * g + xx) * 3 + c];
                        };
                        const float top = at(y0, x0) * (1 - wx) + at(y0, x0 + 1) * wx;
                        const float bot = at(y0 + 1, x0) * (1 - wx) + at(y0 + 1, x0 + 1) * wx;
                        img.at(y, x, c) = top * (1 - wy) + bot * wy;
                    }
                }
            break;
        }
        case Kind::kGradient: {
            const float angle = static_cast<float>(rng.uniform(0.0, 6.283185307179586));
            const float dx = std::cos(angle), dy = std::sin(angle);
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x) {
                    float t = 0.5f + 0.5f * ((static_cast<float>(x) / s - 0.5f) * dx +
                                             (static_cast<float>(y) / s - 0.5f) * dy) * 2.0f;
                    t = clamp01(t);
                    for (int c = 0; c < 3; ++c)
                        img.at(y, x, c) = c0[c] * (1 - t) + c1[c] * t;
                }
            break;
        }
        case Kind::kStripes: {
            const float period = static_cast<float>(rng.uniform(4.0, 14.0));
            const float angle = static_cast<float>(rng.uniform(0.0, 3.14159265));
            const float dx = std::cos(angle), dy = std::sin(angle);
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x) {
                    const float phase = (x * dx + y * dy) / period;
                    const bool on = (static_cast<int>(std::floor(phase)) & 1) == 0;
                    for (int c = 0; c < 3; ++c) img.at(y, x, c) = on ? c0[c] : c1[c];
                }
            break;
        }
        case Kind::kChecker: {
            const int cell = 4 + static_cast<int>(rng.below(10));
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x) {
                    const bool on = (((y / cell) + (x / cell)) & 1) == 0;
                    for (int c = 0; c < 3; ++c) img.at(y, x, c) = on ? c0[c] : c1[c];
                }
            break;
        }
        case Kind::kBlobs: {
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x)
                    for (int c = 0; c < 3; ++c) img.at(y, x, c) = c0[c] * 0.5f;
            const int blobs = 6 + static_cast<int>(rng.below(8));
            for (int b = 0; b < blobs; ++b) {
                const float bx = static_cast<float>(rng.uniform(0.0, s));
                const float by = static_cast<float>(rng.uniform(0.0, s));
                const float radius = static_cast<float>(rng.uniform(4.0, 16.0));
                float col[3];
                for (int c = 0; c < 3; ++c) col[c] = level * static_cast<float>(rng.uniform(0.2, 1.0));
                for (int y = 0; y < s; ++y)
                    for (int x = 0; x < s; ++x) {
                        const float d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
                        const float wgt = std::exp(-d2 / (2.0f * radius * radius * 0.25f));
                        for (int c = 0; c < 3; ++c)
                            img.at(y, x, c) = clamp01(img.at(y, x, c) * (1 - wgt) + col[c] * wgt);
                    }
            }
            break;
        }
    }
    for (auto& v : img.data) v = clamp01(v);
    return img;
}

}  // namespace

BackgroundCorpus make_procedural_corpus(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error(ErrorKind::kConfig, "procedural corpus needs at least 1 texture");
    BackgroundCorpus corpus;
    corpus.images.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(seed, kStreamTextures + i);
        const Kind kind = static_cast<Kind>(i % kKindCount);
        // Brightness ladder over 8 rungs plus jitter, from near-black up.
        const float rung = static_cast<float>((i / kKindCount) % 8) / 7.0f;
        const float level = clamp01(0.04f + 0.92f * rung + static_cast<float>(rng.uniform(-0.03, 0.03)));
        corpus.images.push_back(render_texture(kind, level, rng));
        corpus.names.push_back("tex:" + std::string(kind_name(kind)) + "-" + std::to_string(i));
    }
    corpus.recompute_hash();
    return corpus;
}

BackgroundCorpus load_corpus_directory(const std::string& dir) {
    if (!fs::is_directory(dir))
        throw Error(ErrorKind::kConfig, "background directory not found: " + dir);
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            paths.push_back(entry.path());
    if (paths.empty())
        throw Error(ErrorKind::kConfig, "no PNG files in background directory: " + dir);
    std::sort(paths.begin(), paths.end());

    BackgroundCorpus corpus;
    for (const auto& p : paths) {
        corpus.images.push_back(read_png(p.string()));
        corpus.names.push_back("png:" + p.filename().string());
    }
    corpus.recompute_hash();
    return corpus;
}

void merge_corpus(BackgroundCorpus& base, const BackgroundCorpus& extra) {
    base.images.insert(base.images.end(), extra.images.begin(), extra.images.end());
    base.names.insert(base.names.end(), extra.names.begin(), extra.names.end());
    base.recompute_hash();
}

}  // namespace autoeval
