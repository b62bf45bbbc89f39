#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace proposalbench {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major.
class ImageBuffer {
public:
    ImageBuffer() = default;
    /// Throws ParameterError when either dimension is zero.
    ImageBuffer(int width, int height, Rgb fill = {0, 0, 0});
    /// Throws ParameterError when `pixels.size() != width * height`.
    ImageBuffer(int width, int height, std::vector<Rgb> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
    Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

    const std::vector<Rgb>& pixels() const { return pixels_; }

    bool operator==(const ImageBuffer&) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

/// Real-valued three-channel image, channel-interleaved, row-major.
struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

/// Decodes a PNG or binary PPM (P6) file. The format is chosen by content,
/// not by extension. Grayscale sources are replicated across RGB and 16-bit
/// samples are reduced to 8 bits.
ImageBuffer load_image(const std::filesystem::path& path);

/// Decodes a P6 byte stream already in memory.
ImageBuffer decode_ppm(const std::vector<std::uint8_t>& bytes);

/// Encodes an 8-bit RGB PNG.
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img);

}  // namespace proposalbench
