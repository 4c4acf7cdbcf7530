#include "octaseg/image.hpp"

#include <algorithm>
#include <numeric>

namespace octaseg {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw RasterError("raster dimensions must be at least 1x1, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
}

std::size_t area(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

void check_unit(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw RasterError("intensity outside [0,1]: " + std::to_string(v));
    }
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    check_unit(fill);
    data_.assign(area(width, height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != area(width, height)) {
        throw RasterError("gray image data length does not match dimensions");
    }
    for (double v : data_) check_unit(v);
}

void GrayImage::set(int row, int col, double v) {
    check_unit(v);
    data_[index(row, col)] = v;
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(area(width, height), fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != area(width, height)) {
        throw RasterError("mask data length does not match dimensions");
    }
    for (auto& v : data_) v = v ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

void require_same_shape(const BinaryMask& a, const BinaryMask& b, const std::string& what) {
    if (!a.same_shape(b)) {
        throw RasterError(what + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + ")");
    }
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "mask_union");
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
    return {a.width(), a.height(), std::move(out)};
}

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "mask_intersection");
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
    return {a.width(), a.height(), std::move(out)};
}

BinaryMask mask_complement(const BinaryMask& a) {
    std::vector<std::uint8_t> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] ? 0 : 1;
    return {a.width(), a.height(), std::move(out)};
}

GrayImage rescale_to_unit(const RealField& f) {
    const auto [lo, hi] = std::minmax_element(f.data.begin(), f.data.end());
    std::vector<double> out(f.data.size(), 0.0);
    const double range = *hi - *lo;
    if (range > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = std::clamp((f.data[i] - *lo) / range, 0.0, 1.0);
        }
    }
    return {f.width, f.height, std::move(out)};
}

RealField to_field(const GrayImage& img) {
    RealField f;
    f.width = img.width();
    f.height = img.height();
    f.data.assign(img.data().begin(), img.data().end());
    return f;
}

namespace {

// Generic remap: out(r, c) = in(src(r, c)) with output dims (w, h).
template <typename Raster, typename Get, typename Src>
std::vector<typename std::decay_t<decltype(std::declval<Get>()(0, 0))>> remap(int w, int h, Get get, Src src) {
    std::vector<std::decay_t<decltype(get(0, 0))>> out(area(w, h));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Pixel p = src(r, c);
            out[static_cast<std::size_t>(r) * w + c] = get(p.row, p.col);
        }
    }
    return out;
}

}  // namespace

// Counter-clockwise quarter turn: out(r, c) = in(c, W-1-r), output is H wide and W tall.
GrayImage rotate90(const GrayImage& img) {
    const int w = img.height(), h = img.width();
    auto data = remap<GrayImage>(w, h, [&](int r, int c) { return img.at(r, c); },
                                 [&](int r, int c) { return Pixel{c, img.width() - 1 - r}; });
    return {w, h, std::move(data)};
}

GrayImage flip_horizontal(const GrayImage& img) {
    auto data = remap<GrayImage>(img.width(), img.height(), [&](int r, int c) { return img.at(r, c); },
                                 [&](int r, int c) { return Pixel{r, img.width() - 1 - c}; });
    return {img.width(), img.height(), std::move(data)};
}

GrayImage flip_vertical(const GrayImage& img) {
    auto data = remap<GrayImage>(img.width(), img.height(), [&](int r, int c) { return img.at(r, c); },
                                 [&](int r, int c) { return Pixel{img.height() - 1 - r, c}; });
    return {img.width(), img.height(), std::move(data)};
}

GrayImage transpose(const GrayImage& img) {
    auto data = remap<GrayImage>(img.height(), img.width(), [&](int r, int c) { return img.at(r, c); },
                                 [&](int r, int c) { return Pixel{c, r}; });
    return {img.height(), img.width(), std::move(data)};
}

BinaryMask rotate90(const BinaryMask& m) {
    const int w = m.height(), h = m.width();
    auto data = remap<BinaryMask>(w, h, [&](int r, int c) { return std::uint8_t(m.at(r, c)); },
                                  [&](int r, int c) { return Pixel{c, m.width() - 1 - r}; });
    return {w, h, std::move(data)};
}

BinaryMask transpose(const BinaryMask& m) {
    auto data = remap<BinaryMask>(m.height(), m.width(), [&](int r, int c) { return std::uint8_t(m.at(r, c)); },
                                  [&](int r, int c) { return Pixel{c, r}; });
    return {m.height(), m.width(), std::move(data)};
}

}  // namespace octaseg
