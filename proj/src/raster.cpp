#include "autoeval/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

namespace autoeval {

float Raster::sample(float y, float x, int c) const {
    const float fy = std::floor(y);
    const float fx = std::floor(x);
    const int y0 = std::clamp(static_cast<int>(fy), 0, height - 1);
    const int x0 = std::clamp(static_cast<int>(fx), 0, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const int x1 = std::min(x0 + 1, width - 1);
    const float wy = std::clamp(y - fy, 0.0f, 1.0f);
    const float wx = std::clamp(x - fx, 0.0f, 1.0f);
    const float top = at(y0, x0, c) * (1.0f - wx) + at(y0, x1, c) * wx;
    const float bot = at(y1, x0, c) * (1.0f - wx) + at(y1, x1, c) * wx;
    return top * (1.0f - wy) + bot * wy;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

}  // namespace

Raster read_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error(ErrorKind::kFormat, "cannot open PNG: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw Error(ErrorKind::kFormat, "not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::kFormat, "libpng init failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::kFormat, "corrupt PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);

    std::vector<png_byte> pixels(stride * static_cast<std::size_t>(height));
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = pixels.data() + stride * static_cast<std::size_t>(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Raster out(height, width, 3);
    for (int y = 0; y < height; ++y) {
        const png_byte* row = pixels.data() + stride * static_cast<std::size_t>(y);
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(y, x, c) = static_cast<float>(row[x * 3 + c]) / 255.0f;
    }
    return out;
}

void write_png(const Raster& image, const std::string& path) {
    if (image.channels != 1 && image.channels != 3)
        throw Error(ErrorKind::kShape, "write_png supports 1- or 3-channel rasters");

    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error(ErrorKind::kFormat, "cannot open PNG for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::kFormat, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::kFormat, "PNG write failed: " + path);
    }

    png_init_io(png, fp.get());
    const int color_type = image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(image.width) * image.channels);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < image.channels; ++c)
                row[static_cast<std::size_t>(x) * image.channels + c] =
                    static_cast<png_byte>(std::lround(clamp01(image.at(y, x, c)) * 255.0f));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace autoeval
