#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace labelgrid {

// Row-major single-channel image.
template <typename T>
class Image {
public:
    Image() = default;
    Image(int height, int width, T fill = T{})
        : height_(height), width_(width),
          data_(static_cast<std::size_t>(checked(height)) * checked(width), fill)
    {
    }

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t pixel_count() const { return data_.size(); }

    T& operator()(int v, int u) { return data_[index(v, u)]; }
    const T& operator()(int v, int u) const { return data_[index(v, u)]; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    bool operator==(const Image&) const = default;

private:
    static int checked(int n)
    {
        if (n < 0) throw std::invalid_argument("image dimensions must be non-negative");
        return n;
    }
    std::size_t index(int v, int u) const
    {
        return static_cast<std::size_t>(v) * width_ + static_cast<std::size_t>(u);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<T> data_;
};

// Depth in meters along the optical axis; 0 or NaN means no return.
using DepthImage = Image<double>;
using LabelImage = Image<std::uint32_t>;

// H x W x C scores, channel-fastest (v, u, c) layout.
class ClassImage {
public:
    ClassImage() = default;
    ClassImage(int height, int width, int channels, double fill = 0.0);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

    std::span<double> pixel(int v, int u)
    {
        return {data_.data() + offset(v, u), static_cast<std::size_t>(channels_)};
    }
    std::span<const double> pixel(int v, int u) const
    {
        return {data_.data() + offset(v, u), static_cast<std::size_t>(channels_)};
    }
    std::span<double> pixel(std::size_t flat)
    {
        return {data_.data() + flat * channels_, static_cast<std::size_t>(channels_)};
    }
    std::span<const double> pixel(std::size_t flat) const
    {
        return {data_.data() + flat * channels_, static_cast<std::size_t>(channels_)};
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool operator==(const ClassImage&) const = default;

private:
    std::size_t offset(int v, int u) const
    {
        return (static_cast<std::size_t>(v) * width_ + static_cast<std::size_t>(u)) * channels_;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

inline ClassImage::ClassImage(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels)
{
    if (height < 0 || width < 0 || channels < 0)
        throw std::invalid_argument("image dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

} // namespace labelgrid
