#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "octaseg/enhance.hpp"
#include "octaseg/imgio.hpp"

namespace octaseg {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Enhancement { None, Frangi, Gabor, ScirdTs, Oof };
enum class Binarisation { Adaptive, Otsu, Histogram, TwoStep, Knn };

std::string to_string(Enhancement e);
std::string to_string(Binarisation b);
Enhancement parse_enhancement(const std::string& name);
Binarisation parse_binarisation(const std::string& name);

struct PipelineConfig {
    Enhancement enhancement{Enhancement::Oof};
    FrangiParams frangi;
    GaborParams gabor;
    ScirdParams scird;
    OofParams oof;

    Binarisation binarisation{Binarisation::TwoStep};
    int window{25};
    double ratio{0.1};
    int knn_k{5};
    std::string knn_training;  // TrainingSet CSV, required for knn

    int min_area{10};
    double opening_radius{0.0};  // structural opening after area opening; 0 = off

    /// Absent means the per-image default layout.
    std::optional<RoiSpec> roi;

    /// Throws ConfigError on invalid parameters or pairings.
    void validate() const;
};

/**
 * Reads the JSON layout
 *
 *   { "enhancement": "oof", "binarisation": "two_step",
 *     "Frangi": {"FrangiScaleRange": [0.5, 2], "FrangiScaleRatio": 0.5, ...},
 *     "Gabor": {"scales": [1,2,3,4], "epsilon": 4, "k0": [0, 3], "n_orientations": 18},
 *     "SCIRD-TS": {"fb_parameters.sigma_1": [1, 5], ..., "alpha": 0.05},
 *     "OOF": {"range": [0.5, 2], "sigma": 0.5, "upthreshold": 70},
 *     "adaptive": {"window": 25, "ratio": 0.1},
 *     "knn": {"k": 5, "training": "train.csv"},
 *     "cleanup": {"min_area": 10, "opening_radius": 0},
 *     "roi": {"roi_size": 76, "offsets": {"superior": [38, 114], ...}} }
 *
 * Every key is optional; unknown keys are rejected.
 */
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Fully resolved config as sorted JSON. Only blocks the chosen methods read are included.
std::string canonical_config(const PipelineConfig& cfg);
/// Hex SHA-256 of canonical_config.
std::string config_digest(const PipelineConfig& cfg);

}  // namespace octaseg
