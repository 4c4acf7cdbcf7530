#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace octaseg {

/// Raised when a raster is constructed or combined with inconsistent dimensions or values.
class RasterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row/column pixel coordinate.
struct Pixel {
    int row{};
    int col{};
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/**
 * Row-major raster of normalized intensities in [0,1].
 *
 * Used for input scans and for every enhancement filter output. The range
 * invariant is checked on construction; intermediate real-valued fields
 * (Hessians, raw filter banks) use RealField instead.
 */
class GrayImage {
public:
    GrayImage(int width, int height, double fill = 0.0);
    GrayImage(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    double at(int row, int col) const { return data_[index(row, col)]; }
    void set(int row, int col, double v);

    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }

    int width_;
    int height_;
    std::vector<double> data_;
};

/// Row-major boolean raster; true marks vessel.
class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false);
    BinaryMask(int width, int height, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    bool at(int row, int col) const { return data_[index(row, col)] != 0; }
    /// Out-of-range coordinates read as background.
    bool at_or_false(int row, int col) const {
        return row >= 0 && col >= 0 && row < height_ && col < width_ && at(row, col);
    }
    void set(int row, int col, bool v) { data_[index(row, col)] = v ? 1 : 0; }

    bool operator[](std::size_t i) const { return data_[i] != 0; }
    void set_index(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::size_t count() const noexcept;
    bool same_shape(const BinaryMask& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// Unbounded real-valued raster for filter internals.
struct RealField {
    int width{};
    int height{};
    std::vector<double> data;

    RealField() = default;
    RealField(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
};

/// Throws RasterError unless both masks share dimensions.
void require_same_shape(const BinaryMask& a, const BinaryMask& b, const std::string& what);

/// Elementwise set operations on equally sized masks.
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_complement(const BinaryMask& a);

/// Min-max rescale to [0,1]; a field with zero range maps to all zeros.
GrayImage rescale_to_unit(const RealField& f);

RealField to_field(const GrayImage& img);

/// Axis-aligned transforms used for equivariance checks and ROI handling.
GrayImage rotate90(const GrayImage& img);
GrayImage flip_horizontal(const GrayImage& img);
GrayImage flip_vertical(const GrayImage& img);
GrayImage transpose(const GrayImage& img);
BinaryMask rotate90(const BinaryMask& m);
BinaryMask transpose(const BinaryMask& m);

}  // namespace octaseg
