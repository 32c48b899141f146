#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "autoeval/errors.hpp"

namespace autoeval {

// H x W x C image, float pixels in [0,1], row-major with interleaved
// channels. C is 3 for images and 1 for foreground masks.
struct Raster {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    Raster() = default;
    Raster(int h, int w, int c, float fill = 0.0f)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {}

    float& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * width;
    }

    bool same_shape(const Raster& other) const {
        return height == other.height && width == other.width && channels == other.channels;
    }

    // Bilinear sample with clamp-to-edge; (y, x) in pixel coordinates.
    float sample(float y, float x, int c) const;
};

// Labeled image collection; labels are class indices in [0, K).
struct LabeledImageSet {
    std::vector<Raster> images;
    std::vector<std::uint32_t> labels;
    std::uint32_t class_count = 0;

    std::size_t size() const { return images.size(); }

    void validate() const {
        if (images.size() != labels.size())
            throw Error(ErrorKind::kShape, "image/label count mismatch");
        if (class_count < 2)
            throw Error(ErrorKind::kDegenerateInput, "need at least 2 classes");
        for (std::size_t i = 1; i < images.size(); ++i)
            if (!images[i].same_shape(images[0]))
                throw Error(ErrorKind::kShape, "rasters have mismatched shapes");
        for (auto label : labels)
            if (label >= class_count)
                throw Error(ErrorKind::kValidation, "label outside [0, K)");
    }
};

inline float clamp01(float v) {
    return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
}

// PNG I/O (8-bit; gray/gray-alpha/RGB/RGBA all load as 3-channel float).
Raster read_png(const std::string& path);
void write_png(const Raster& image, const std::string& path);

}  // namespace autoeval
