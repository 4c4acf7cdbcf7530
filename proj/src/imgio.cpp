#include "octaseg/imgio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace octaseg {

namespace {

struct RawGray {
    int width{};
    int height{};
    std::vector<std::uint8_t> bytes;
};

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw ImageIoError(IoErrorKind::MissingFile, "no such file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError(IoErrorKind::MissingFile, "cannot open: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_png(const std::vector<std::uint8_t>& buf) {
    static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return buf.size() >= 8 && std::memcmp(buf.data(), sig, 8) == 0;
}

RawGray decode_png(const std::vector<std::uint8_t>& buf, const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, buf.data(), buf.size())) {
        throw ImageIoError(IoErrorKind::Corrupt, "bad PNG " + path.string() + ": " + image.message);
    }
    const auto fmt = image.format;
    if ((fmt & PNG_FORMAT_FLAG_COLOR) || (fmt & PNG_FORMAT_FLAG_ALPHA)) {
        png_image_free(&image);
        throw ImageIoError(IoErrorKind::NotGrayscale, "not a single-channel grayscale PNG: " + path.string());
    }
    if (fmt & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw ImageIoError(IoErrorKind::UnsupportedFormat, "only 8-bit PNGs are supported: " + path.string());
    }
    image.format = PNG_FORMAT_GRAY;
    RawGray out{static_cast<int>(image.width), static_cast<int>(image.height), {}};
    out.bytes.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.bytes.data(), 0, nullptr)) {
        throw ImageIoError(IoErrorKind::Corrupt, "bad PNG " + path.string() + ": " + image.message);
    }
    return out;
}

// Binary PGM: "P5" <ws> width <ws> height <ws> maxval <single ws> raster, '#' comments allowed.
RawGray decode_pgm(const std::vector<std::uint8_t>& buf, const std::filesystem::path& path) {
    std::size_t pos = 2;
    auto skip = [&] {
        while (pos < buf.size()) {
            if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else if (std::isspace(buf[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&]() -> long {
        skip();
        long v = 0;
        bool any = false;
        while (pos < buf.size() && std::isdigit(buf[pos])) {
            v = v * 10 + (buf[pos++] - '0');
            any = true;
            if (v > 1'000'000) break;
        }
        if (!any) throw ImageIoError(IoErrorKind::Corrupt, "malformed PGM header: " + path.string());
        return v;
    };
    const long w = number();
    const long h = number();
    const long maxval = number();
    if (maxval != 255) {
        throw ImageIoError(IoErrorKind::UnsupportedFormat, "only 8-bit PGM (maxval 255) is supported: " + path.string());
    }
    if (w < 1 || h < 1) throw ImageIoError(IoErrorKind::Corrupt, "PGM has empty raster: " + path.string());
    ++pos;  // single whitespace before raster
    const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (buf.size() < pos + n) throw ImageIoError(IoErrorKind::Corrupt, "truncated PGM raster: " + path.string());
    RawGray out{static_cast<int>(w), static_cast<int>(h), {}};
    out.bytes.assign(buf.begin() + static_cast<std::ptrdiff_t>(pos), buf.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return out;
}

RawGray read_raw(const std::filesystem::path& path) {
    const auto buf = read_all(path);
    if (is_png(buf)) return decode_png(buf, path);
    if (buf.size() >= 2 && buf[0] == 'P') {
        if (buf[1] == '5') return decode_pgm(buf, path);
        if (buf[1] == '6' || buf[1] == '3') {
            throw ImageIoError(IoErrorKind::NotGrayscale, "PPM colour raster is not grayscale: " + path.string());
        }
    }
    throw ImageIoError(IoErrorKind::UnsupportedFormat, "unsupported raster format: " + path.string());
}

void write_png(int width, int height, const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
        throw ImageIoError(IoErrorKind::WriteFailed, "cannot write " + path.string() + ": " + image.message);
    }
}

}  // namespace

GrayImage load_gray(const std::filesystem::path& path) {
    const RawGray raw = read_raw(path);
    std::vector<double> data(raw.bytes.size());
    std::transform(raw.bytes.begin(), raw.bytes.end(), data.begin(), [](std::uint8_t b) { return b / 255.0; });
    return {raw.width, raw.height, std::move(data)};
}

BinaryMask load_mask(const std::filesystem::path& path) {
    const RawGray raw = read_raw(path);
    std::vector<std::uint8_t> data(raw.bytes.size());
    std::transform(raw.bytes.begin(), raw.bytes.end(), data.begin(),
                   [](std::uint8_t b) { return static_cast<std::uint8_t>(b > 127 ? 1 : 0); });
    return {raw.width, raw.height, std::move(data)};
}

std::vector<std::uint8_t> to_bytes(const GrayImage& img) {
    std::vector<std::uint8_t> bytes(img.size());
    std::transform(img.data().begin(), img.data().end(), bytes.begin(),
                   [](double v) { return static_cast<std::uint8_t>(std::lround(v * 255.0)); });
    return bytes;
}

void save_gray(const GrayImage& img, const std::filesystem::path& path) {
    write_png(img.width(), img.height(), to_bytes(img), path);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(mask.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask[i] ? 255 : 0;
    write_png(mask.width(), mask.height(), bytes, path);
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError(IoErrorKind::WriteFailed, "cannot write " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    const auto bytes = to_bytes(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ImageIoError(IoErrorKind::WriteFailed, "short write to " + path.string());
}

std::string_view to_string(RoiLabel label) {
    switch (label) {
        case RoiLabel::Superior: return "superior";
        case RoiLabel::Nasal: return "nasal";
        case RoiLabel::Inferior: return "inferior";
        case RoiLabel::Temporal: return "temporal";
        case RoiLabel::Foveal: return "foveal";
    }
    return "unknown";
}

std::optional<RoiLabel> parse_roi_label(std::string_view name) {
    for (RoiLabel l : kAllRoiLabels) {
        if (to_string(l) == name) return l;
    }
    return std::nullopt;
}

RoiSpec default_roi_spec(int width, int height) {
    RoiSpec spec;
    spec.roi_size = std::max(1, std::min(width, height) / 4);
    const int s = spec.roi_size;
    const int r0 = (height - s) / 2;
    const int c0 = (width - s) / 2;
    spec.set_offset(RoiLabel::Foveal, {r0, c0});
    spec.set_offset(RoiLabel::Superior, {r0 - s, c0});
    spec.set_offset(RoiLabel::Inferior, {r0 + s, c0});
    spec.set_offset(RoiLabel::Nasal, {r0, c0 + s});
    spec.set_offset(RoiLabel::Temporal, {r0, c0 - s});
    return spec;
}

namespace {

void check_window(int img_w, int img_h, Pixel origin, int width, int height) {
    if (width < 1 || height < 1 || origin.row < 0 || origin.col < 0 || origin.row + height > img_h ||
        origin.col + width > img_w) {
        throw std::out_of_range("crop window outside image");
    }
}

template <class Raster>
std::vector<std::pair<RoiLabel, Raster>> extract_all(const Raster& img, const RoiSpec& spec) {
    std::vector<std::pair<RoiLabel, Raster>> out;
    out.reserve(kAllRoiLabels.size());
    for (RoiLabel label : kAllRoiLabels) {
        const Pixel o = spec.offset(label);
        const int s = spec.roi_size;
        if (s < 1 || o.row < 0 || o.col < 0 || o.row + s > img.height() || o.col + s > img.width()) {
            throw RoiBoundsError(label, "ROI '" + std::string(to_string(label)) + "' at (" + std::to_string(o.row) +
                                            "," + std::to_string(o.col) + ") size " + std::to_string(s) +
                                            " does not fit a " + std::to_string(img.width()) + "x" +
                                            std::to_string(img.height()) + " image");
        }
        out.emplace_back(label, crop(img, o, s, s));
    }
    return out;
}

}  // namespace

GrayImage crop(const GrayImage& img, Pixel origin, int width, int height) {
    check_window(img.width(), img.height(), origin, width, height);
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
        const auto row = img.data().subspan(static_cast<std::size_t>(origin.row + r) * img.width() + origin.col,
                                            static_cast<std::size_t>(width));
        data.insert(data.end(), row.begin(), row.end());
    }
    return {width, height, std::move(data)};
}

BinaryMask crop(const BinaryMask& mask, Pixel origin, int width, int height) {
    check_window(mask.width(), mask.height(), origin, width, height);
    std::vector<std::uint8_t> data;
    data.reserve(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
        const auto row = mask.data().subspan(static_cast<std::size_t>(origin.row + r) * mask.width() + origin.col,
                                             static_cast<std::size_t>(width));
        data.insert(data.end(), row.begin(), row.end());
    }
    return {width, height, std::move(data)};
}

std::vector<std::pair<RoiLabel, GrayImage>> extract_rois(const GrayImage& img, const RoiSpec& spec) {
    return extract_all(img, spec);
}

std::vector<std::pair<RoiLabel, BinaryMask>> extract_rois(const BinaryMask& mask, const RoiSpec& spec) {
    return extract_all(mask, spec);
}

}  // namespace octaseg
