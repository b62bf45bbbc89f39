#include "proposalbench/image.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "proposalbench/errors.hpp"

namespace proposalbench {

ImageBuffer::ImageBuffer(int width, int height, Rgb fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw ParameterError("image dimensions must be positive");
    }
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 1 || height < 1) {
        throw ParameterError("image dimensions must be positive");
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ParameterError("pixel count does not match image dimensions");
    }
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed for " + path.string());
    }
    return bytes;
}

// Minimal cursor over a PPM header: whitespace and '#' comments between tokens.
class PpmHeader {
public:
    explicit PpmHeader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    long next_int() {
        skip_space();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw DecodeError("malformed PPM header");
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) {
                throw DecodeError("PPM header value out of range");
            }
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw DecodeError("malformed PPM header");
        }
        return pos_ + 1;
    }

    std::size_t pos_ = 2;

private:
    void skip_space() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& bytes_;
};

bool is_png(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

struct PngReadSource {
    const std::vector<std::uint8_t>* bytes;
    std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->offset + count > src->bytes->size()) {
        png_error(png, "truncated PNG stream");
    }
    std::memcpy(out, src->bytes->data() + src->offset, count);
    src->offset += count;
}

void png_error_handler(png_structp png, png_const_charp) { png_longjmp(png, 1); }
void png_warning_handler(png_structp, png_const_charp) {}

ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             png_error_handler, png_warning_handler);
    if (png == nullptr) {
        throw DecodeError("libpng initialisation failed");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("libpng initialisation failed");
    }

    PngReadSource source{&bytes, 0};
    std::vector<Rgb> pixels;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("malformed PNG");
    }
    png_set_read_fn(png, &source, png_read_from_memory);
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);

    png_set_strip_16(png);
    png_set_packing(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3) {
        png_error(png, "unexpected row layout");
    }
    pixels.resize(static_cast<std::size_t>(width) * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        rows[y] = reinterpret_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (width == 0 || height == 0) {
        throw DecodeError("zero-dimension image");
    }
    return ImageBuffer(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

}  // namespace

ImageBuffer decode_ppm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        throw DecodeError("not a binary PPM (P6) stream");
    }
    PpmHeader header(bytes);
    const long width = header.next_int();
    const long height = header.next_int();
    const long maxval = header.next_int();
    const std::size_t start = header.raster_start();
    if (width == 0 || height == 0) {
        throw DecodeError("zero-dimension image");
    }
    if (maxval < 1 || maxval > 65535) {
        throw DecodeError("PPM maxval out of range");
    }
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - start < count * 3 * sample_bytes) {
        throw DecodeError("truncated PPM raster");
    }
    std::vector<Rgb> pixels(count);
    const std::uint8_t* p = bytes.data() + start;
    for (std::size_t i = 0; i < count; ++i) {
        for (int c = 0; c < 3; ++c) {
            long v = *p++;
            if (sample_bytes == 2) v = (v << 8) | *p++;
            pixels[i][c] = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
        }
    }
    return ImageBuffer(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

ImageBuffer load_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (is_png(bytes)) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
        return decode_ppm(bytes);
    }
    throw DecodeError("unsupported image format: " + path.string());
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              png_error_handler, png_warning_handler);
    if (png == nullptr) {
        throw IoError("libpng initialisation failed");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed");
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height(); ++y) {
        const auto* row = img.pixels().data() + static_cast<std::size_t>(y) * img.width();
        png_write_row(png, reinterpret_cast<png_const_bytep>(row));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img) {
    const std::string header =
        "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (const Rgb& p : img.pixels()) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

}  // namespace proposalbench
