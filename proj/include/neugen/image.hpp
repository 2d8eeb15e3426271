#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neugen/errors.hpp"

namespace neugen {

// Planar row-major float image. Plane c occupies data[c*W*H .. (c+1)*W*H).
// Samples are nominally in [0,1]; intermediate maps may hold unclamped values.
class ImageF {
public:
    ImageF() = default;
    ImageF(int width, int height, int channels, float fill = 0.0f);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }
    std::size_t size() const { return data_.size(); }

    float& at(int x, int y, int c = 0) {
        return data_[static_cast<std::size_t>(c) * plane_size() + static_cast<std::size_t>(y) * width_ + x];
    }
    float at(int x, int y, int c = 0) const {
        return data_[static_cast<std::size_t>(c) * plane_size() + static_cast<std::size_t>(y) * width_ + x];
    }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    bool same_extent(const ImageF& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

// PNG I/O. 8- or 16-bit, gray or RGB; alpha is dropped on load; palette rejected.
ImageF load_image(const std::string& path);
void save_image(const ImageF& img, const std::string& path, int depth = 8);

// Lossless raw-float container: magic "NGF1", u32 width, u32 height,
// u32 channels (little-endian), then float32 LE samples, row-major planar.
ImageF load_ngf(const std::string& path);
void save_ngf(const ImageF& img, const std::string& path);

ImageF to_grayscale(const ImageF& img);
ImageF broadcast_channel(const ImageF& map, int channels);

} // namespace neugen
