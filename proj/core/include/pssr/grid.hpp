#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pssr {

using Rgb = std::array<double, 3>;

/// Sentinel stored at invalid pixels.
inline constexpr double kInvalidValue = std::numeric_limits<double>::quiet_NaN();

/// 2-D scalar field over a pixel domain with a per-pixel validity mask.
/// Indexing is row-major: flat index = y * width + x, x being the column.
/// Pixel coordinates are zero-based with centers at integer coordinates.
class ScalarGrid
{
public:
    ScalarGrid() = default;
    ScalarGrid(int width, int height, double fill = 0.0, bool valid = true)
        : width_(width), height_(height),
          values_(static_cast<size_t>(width) * height, valid ? fill : kInvalidValue),
          valid_(static_cast<size_t>(width) * height, valid ? 1 : 0)
    {
        if (width < 1 || height < 1)
            throw std::invalid_argument("ScalarGrid: size must be at least 1x1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return values_.size(); }

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width_ + x; }

    double operator()(int x, int y) const { return values_[index(x, y)]; }
    double& operator()(int x, int y) { return values_[index(x, y)]; }
    double at_flat(size_t i) const { return values_[i]; }
    double& at_flat(size_t i) { return values_[i]; }

    bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
    bool valid_flat(size_t i) const { return valid_[i] != 0; }

    void set(int x, int y, double v)
    {
        values_[index(x, y)] = v;
        valid_[index(x, y)] = 1;
    }
    void invalidate(int x, int y)
    {
        values_[index(x, y)] = kInvalidValue;
        valid_[index(x, y)] = 0;
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    const std::vector<uint8_t>& mask() const { return valid_; }
    std::vector<uint8_t>& mask() { return valid_; }

    bool all_valid() const
    {
        for (uint8_t v : valid_)
            if (!v) return false;
        return true;
    }

    size_t count_valid() const
    {
        size_t n = 0;
        for (uint8_t v : valid_) n += v;
        return n;
    }

    bool same_size(const ScalarGrid& o) const
    {
        return width_ == o.width_ && height_ == o.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
    std::vector<uint8_t> valid_;
};

/// 2-D RGB field with a validity mask shared across channels.
class ColorGrid
{
public:
    ColorGrid() = default;
    ColorGrid(int width, int height, Rgb fill = {0, 0, 0}, bool valid = true)
        : width_(width), height_(height),
          values_(static_cast<size_t>(width) * height,
                  valid ? fill : Rgb{kInvalidValue, kInvalidValue, kInvalidValue}),
          valid_(static_cast<size_t>(width) * height, valid ? 1 : 0)
    {
        if (width < 1 || height < 1)
            throw std::invalid_argument("ColorGrid: size must be at least 1x1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return values_.size(); }

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width_ + x; }

    const Rgb& operator()(int x, int y) const { return values_[index(x, y)]; }
    Rgb& operator()(int x, int y) { return values_[index(x, y)]; }
    const Rgb& at_flat(size_t i) const { return values_[i]; }
    Rgb& at_flat(size_t i) { return values_[i]; }

    bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
    bool valid_flat(size_t i) const { return valid_[i] != 0; }

    void set(int x, int y, const Rgb& v)
    {
        values_[index(x, y)] = v;
        valid_[index(x, y)] = 1;
    }
    void invalidate(int x, int y)
    {
        values_[index(x, y)] = {kInvalidValue, kInvalidValue, kInvalidValue};
        valid_[index(x, y)] = 0;
    }

    const std::vector<Rgb>& values() const { return values_; }
    std::vector<Rgb>& values() { return values_; }
    const std::vector<uint8_t>& mask() const { return valid_; }
    std::vector<uint8_t>& mask() { return valid_; }

    bool all_valid() const
    {
        for (uint8_t v : valid_)
            if (!v) return false;
        return true;
    }

    bool same_size(const ColorGrid& o) const
    {
        return width_ == o.width_ && height_ == o.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> values_;
    std::vector<uint8_t> valid_;
};

}  // namespace pssr
