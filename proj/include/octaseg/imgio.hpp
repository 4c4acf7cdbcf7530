#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "octaseg/image.hpp"

namespace octaseg {

enum class IoErrorKind {
    MissingFile,
    UnsupportedFormat,
    NotGrayscale,
    Corrupt,
    WriteFailed,
};

class ImageIoError : public std::runtime_error {
public:
    ImageIoError(IoErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    IoErrorKind kind() const noexcept { return kind_; }

private:
    IoErrorKind kind_;
};

/// 8-bit grayscale PNG or binary PGM (P5); bytes scale linearly to [0,1].
GrayImage load_gray(const std::filesystem::path& path);

/// Same formats as load_gray; a pixel is vessel iff its byte is > 127.
BinaryMask load_mask(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG, rounding v*255 to the nearest byte.
void save_gray(const GrayImage& img, const std::filesystem::path& path);
/// Writes an 8-bit grayscale PNG with vessel = 255, background = 0.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
/// Binary PGM writer, mostly for interop with tools that lack PNG support.
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Raw 8-bit bytes of an image as save_gray would write them.
std::vector<std::uint8_t> to_bytes(const GrayImage& img);

// --- clinical regions of interest -------------------------------------------

enum class RoiLabel { Superior, Nasal, Inferior, Temporal, Foveal };

inline constexpr std::array<RoiLabel, 5> kAllRoiLabels = {RoiLabel::Superior, RoiLabel::Nasal, RoiLabel::Inferior,
                                                          RoiLabel::Temporal, RoiLabel::Foveal};

std::string_view to_string(RoiLabel label);
std::optional<RoiLabel> parse_roi_label(std::string_view name);

struct RoiSpec {
    int roi_size{};
    /// Window origin (top-left row, col), indexed by RoiLabel.
    std::array<Pixel, 5> offsets{};

    Pixel offset(RoiLabel label) const { return offsets[static_cast<std::size_t>(label)]; }
    void set_offset(RoiLabel label, Pixel p) { offsets[static_cast<std::size_t>(label)] = p; }
};

/**
 * Default layout: square windows of side min(width, height) / 4, one centred
 * on the image (foveal) and the other four directly above, right of, below and
 * left of it. Nasal is placed to the right and temporal to the left; swap
 * them in configuration for left eyes.
 */
RoiSpec default_roi_spec(int width, int height);

class RoiBoundsError : public std::out_of_range {
public:
    RoiBoundsError(RoiLabel label, const std::string& msg) : std::out_of_range(msg), label_(label) {}
    RoiLabel label() const noexcept { return label_; }

private:
    RoiLabel label_;
};

/// Five independent crops in kAllRoiLabels order; pixel values are copied.
std::vector<std::pair<RoiLabel, GrayImage>> extract_rois(const GrayImage& img, const RoiSpec& spec);
std::vector<std::pair<RoiLabel, BinaryMask>> extract_rois(const BinaryMask& mask, const RoiSpec& spec);

/// Copies a rectangular window; throws std::out_of_range if it does not fit.
GrayImage crop(const GrayImage& img, Pixel origin, int width, int height);
BinaryMask crop(const BinaryMask& mask, Pixel origin, int width, int height);

}  // namespace octaseg
