#include "neugen/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>

namespace neugen {

ImageF::ImageF(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw InvalidChannelCount("ImageF: width/height must be >= 1 and channels in {1,3}");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

namespace {

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

} // namespace

ImageF load_image(const std::string& path) {
    PngReader r;
    r.fp = std::fopen(path.c_str(), "rb");
    if (!r.fp) throw FileNotFound("load_image: cannot open " + path);

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, r.fp) != 8 || png_sig_cmp(sig, 0, 8))
        throw UnsupportedFormat("load_image: not a PNG file: " + path);

    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    r.info = png_create_info_struct(r.png);
    if (!r.png || !r.info) throw IoError("load_image: libpng init failed");
    if (setjmp(png_jmpbuf(r.png))) throw IoError("load_image: PNG decode error in " + path);

    png_init_io(r.png, r.fp);
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    const png_uint_32 w = png_get_image_width(r.png, r.info);
    const png_uint_32 h = png_get_image_height(r.png, r.info);
    const int bit_depth = png_get_bit_depth(r.png, r.info);
    const int color_type = png_get_color_type(r.png, r.info);

    if (color_type == PNG_COLOR_TYPE_PALETTE)
        throw UnsupportedFormat("load_image: palette PNG not supported: " + path);
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_strip_alpha(r.png);

    png_read_update_info(r.png, r.info);

    const int channels = png_get_channels(r.png, r.info);
    if (channels != 1 && channels != 3)
        throw UnsupportedFormat("load_image: unsupported channel count after alpha drop: " + path);

    const int out_depth = bit_depth == 16 ? 16 : 8;
    const std::size_t row_bytes = png_get_rowbytes(r.png, r.info);
    std::vector<unsigned char> raw(row_bytes * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * row_bytes;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);

    ImageF img(static_cast<int>(w), static_cast<int>(h), channels);
    const float scale = out_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
    for (png_uint_32 y = 0; y < h; ++y) {
        const unsigned char* row = rows[y];
        for (png_uint_32 x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                unsigned v;
                if (out_depth == 16) {
                    const std::size_t o = (static_cast<std::size_t>(x) * channels + c) * 2;
                    v = (static_cast<unsigned>(row[o]) << 8) | row[o + 1]; // PNG is big-endian
                } else {
                    v = row[static_cast<std::size_t>(x) * channels + c];
                }
                img.at(static_cast<int>(x), static_cast<int>(y), c) = static_cast<float>(v) * scale;
            }
        }
    }
    return img;
}

void save_image(const ImageF& img, const std::string& path, int depth) {
    if (depth != 8 && depth != 16) throw UsageError("save_image: depth must be 8 or 16");

    PngWriter wtr;
    wtr.fp = std::fopen(path.c_str(), "wb");
    if (!wtr.fp) throw IoError("save_image: cannot open " + path);
    wtr.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    wtr.info = png_create_info_struct(wtr.png);
    if (!wtr.png || !wtr.info) throw IoError("save_image: libpng init failed");
    if (setjmp(png_jmpbuf(wtr.png))) throw IoError("save_image: PNG encode error for " + path);

    png_init_io(wtr.png, wtr.fp);
    const int color_type = img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(wtr.png, wtr.info, img.width(), img.height(), depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(wtr.png, wtr.info);

    const double maxval = depth == 16 ? 65535.0 : 255.0;
    const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * img.channels() * (depth / 8);
    std::vector<unsigned char> row(row_bytes);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                const double s = std::clamp(static_cast<double>(img.at(x, y, c)), 0.0, 1.0);
                const unsigned q = static_cast<unsigned>(std::lround(s * maxval));
                if (depth == 16) {
                    const std::size_t o = (static_cast<std::size_t>(x) * img.channels() + c) * 2;
                    row[o] = static_cast<unsigned char>(q >> 8);
                    row[o + 1] = static_cast<unsigned char>(q & 0xff);
                } else {
                    row[static_cast<std::size_t>(x) * img.channels() + c] = static_cast<unsigned char>(q);
                }
            }
        }
        png_write_row(wtr.png, row.data());
    }
    png_write_end(wtr.png, nullptr);
}

namespace {

void put_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void save_ngf(const ImageF& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("save_ngf: cannot open " + path);
    os.write("NGF1", 4);
    put_u32le(os, static_cast<std::uint32_t>(img.width()));
    put_u32le(os, static_cast<std::uint32_t>(img.height()));
    put_u32le(os, static_cast<std::uint32_t>(img.channels()));
    static_assert(sizeof(float) == 4);
    // host is little-endian on all supported targets
    os.write(reinterpret_cast<const char*>(img.data().data()),
             static_cast<std::streamsize>(img.size() * sizeof(float)));
    if (!os) throw IoError("save_ngf: write failed for " + path);
}

ImageF load_ngf(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FileNotFound("load_ngf: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "NGF1", 4) != 0)
        throw UnsupportedFormat("load_ngf: bad magic in " + path);
    const auto w = get_u32le(is);
    const auto h = get_u32le(is);
    const auto c = get_u32le(is);
    if (!is || w < 1 || h < 1 || (c != 1 && c != 3))
        throw UnsupportedFormat("load_ngf: bad header in " + path);
    ImageF img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
    is.read(reinterpret_cast<char*>(img.data().data()),
            static_cast<std::streamsize>(img.size() * sizeof(float)));
    if (!is) throw IoError("load_ngf: truncated file " + path);
    return img;
}

ImageF to_grayscale(const ImageF& img) {
    if (img.channels() == 1) return img;
    ImageF out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.at(x, y) = 0.299f * img.at(x, y, 0) + 0.587f * img.at(x, y, 1) + 0.114f * img.at(x, y, 2);
    return out;
}

ImageF broadcast_channel(const ImageF& map, int channels) {
    if (map.channels() != 1) throw InvalidChannelCount("broadcast_channel: input must be 1-channel");
    if (channels != 1 && channels != 3) throw InvalidChannelCount("broadcast_channel: channels must be 1 or 3");
    if (channels == 1) return map;
    ImageF out(map.width(), map.height(), channels);
    for (int c = 0; c < channels; ++c)
        std::copy(map.data().begin(), map.data().end(), out.data().begin() + c * out.plane_size());
    return out;
}

} // namespace neugen
