#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "octaseg/enhance.hpp"
#include "octaseg/image.hpp"

namespace octaseg {

class ThresholdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bradley-style local-mean threshold: true iff v > mean_window * (1 - ratio).
BinaryMask adaptive_threshold(const GrayImage& img, int window = 25, double ratio = 0.1);

/// 256-bin histogram of round(v * 255).
std::array<std::uint64_t, 256> histogram256(const GrayImage& img);

/// Otsu bin: the first t maximizing between-class variance with classes {<= t}, {> t}.
int otsu_level(const std::array<std::uint64_t, 256>& hist);
BinaryMask otsu_threshold(const GrayImage& img);

/// Triangle method bin on the side of the longer histogram tail.
int triangle_level(const std::array<std::uint64_t, 256>& hist);
BinaryMask histogram_shape_threshold(const GrayImage& img);

/// Union of a global cut (v * 255 > upthreshold) and adaptive_threshold.
BinaryMask two_step_binarise(const GrayImage& img, const OofParams& params, int window = 25, double ratio = 0.1);
BinaryMask global_threshold(const GrayImage& img, double level_0_255);

// --- pixel features and lazy classification ---------------------------------

inline constexpr std::size_t kFeatureCount = 7;

/// intensity, range, mean, std, entropy (3x3), Hessian eigenvalues l1, l2 (|l1| <= |l2|, sigma 1).
using FeatureVector = std::array<double, kFeatureCount>;

inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "intensity", "range", "mean", "std", "entropy", "lambda1", "lambda2"};

struct FeatureField {
    int width{};
    int height{};
    std::vector<FeatureVector> values;

    const FeatureVector& at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

FeatureField pixel_features(const GrayImage& img);

struct LabeledFeature {
    FeatureVector features;
    bool vessel;
};

/// Non-empty list of labelled feature vectors containing both classes.
class TrainingSet {
public:
    explicit TrainingSet(std::vector<LabeledFeature> samples);

    const std::vector<LabeledFeature>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }

    /// CSV with header "intensity,range,mean,std,entropy,lambda1,lambda2,label" and 0/1 labels.
    void write_csv(std::ostream& out) const;
    static TrainingSet read_csv(std::istream& in);
    static TrainingSet load_csv(const std::filesystem::path& path);
    void save_csv(const std::filesystem::path& path) const;

private:
    std::vector<LabeledFeature> samples_;
};

/// Balanced random sample of up to per_class pixels from each class of a labelled image.
std::vector<LabeledFeature> sample_training_pixels(const GrayImage& img, const BinaryMask& truth, std::size_t per_class,
                                                   std::uint64_t seed);

/// Pixel classifier over FeatureVectors; implementations must be thread-safe for const calls.
class PixelClassifier {
public:
    virtual ~PixelClassifier() = default;
    virtual bool is_vessel(const FeatureVector& f) const = 0;
};

/// Brute-force k-NN in the space standardized by the training mean and std.
class KnnClassifier final : public PixelClassifier {
public:
    KnnClassifier(const TrainingSet& train, int k);

    bool is_vessel(const FeatureVector& f) const override;
    FeatureVector standardize(const FeatureVector& f) const;

private:
    int k_;
    FeatureVector mean_{};
    FeatureVector scale_{};
    std::vector<FeatureVector> points_;
    std::vector<std::uint8_t> labels_;
};

BinaryMask classify_pixels(const GrayImage& img, const PixelClassifier& classifier);
BinaryMask knn_binarise(const TrainingSet& train, const GrayImage& img, int k);

// --- cleanup -----------------------------------------------------------------

/// Area opening: drops every 8-connected component smaller than min_area.
BinaryMask clean_small_structures(const BinaryMask& mask, int min_area = 10);

/// Structural opening (erosion then dilation) with a discrete Euclidean disc.
BinaryMask open_disc(const BinaryMask& mask, double radius);
BinaryMask erode_disc(const BinaryMask& mask, double radius);

}  // namespace octaseg
