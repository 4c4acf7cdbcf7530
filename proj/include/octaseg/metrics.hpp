#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "octaseg/image.hpp"
#include "octaseg/netstruct.hpp"

namespace octaseg {

/// Pixel tallies with vessel as the positive class.
struct ConfusionCounts {
    std::uint64_t tp{};
    std::uint64_t fp{};
    std::uint64_t tn{};
    std::uint64_t fn{};

    std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const BinaryMask& seg, const BinaryMask& gt);

struct PixelMetrics {
    double dice{};   // 1 when both masks are empty
    double accuracy{};
    std::optional<double> precision;  // absent when nothing was predicted
    std::optional<double> recall;     // absent when the truth is empty
};

PixelMetrics pixel_metrics(const ConfusionCounts& c);

/// Chance-corrected agreement. Absent only when chance agreement is 1 and the masks differ.
std::optional<double> cohens_kappa(const BinaryMask& a, const BinaryMask& b);

struct CalScore {
    double connectivity{};
    double area{};
    double length{};
    double cal{};
};

/// Connectivity / area / length similarity and their product; throws on an empty ground truth.
CalScore cal_metric(const BinaryMask& seg, const BinaryMask& gt, double alpha = 1.0, double beta = 1.0);

/// 1 - min(1, |a - b| / b); absent when the reference b is zero.
std::optional<double> clamped_similarity(double value, double reference);

/// Largest-skeleton-component length similarity.
std::optional<double> lcc_ratio(const BinaryMask& seg, const BinaryMask& gt);
/// First-Betti-number similarity.
std::optional<double> tops(const BinaryMask& seg, const BinaryMask& gt);

double vessel_density(const BinaryMask& mask);

/// Perimeter over the circumference of the circle of equal area.
double acircularity(const FazRegion& faz);
double acircularity(double perimeter, double area);

/// |measured - truth| / |truth|; absent when truth is zero.
std::optional<double> relative_error(double measured, double truth);

struct FazMeasure {
    double area{};
    double perimeter{};
    double acircularity{};
};

/// FAZ of a vessel mask via its skeleton; absent when no bounded face exists.
std::optional<FazMeasure> measure_faz(const BinaryMask& mask);

struct EvalReport {
    double dice{};
    double accuracy{};
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> kappa;
    std::optional<double> c;
    std::optional<double> a;
    std::optional<double> l;
    std::optional<double> cal;
    std::optional<double> lcc;
    std::optional<double> tops;
    double vessel_density_seg{};
    double vessel_density_gt{};
    std::optional<double> vd_rel_error;
    std::optional<double> faz_area_rel_error;
    std::optional<double> acircularity_rel_error;
    std::optional<FazMeasure> faz_seg;
    std::optional<FazMeasure> faz_gt;
};

/// All metrics with alpha = beta = 1. Dimension mismatch throws; undefined metrics are left absent.
EvalReport evaluate(const BinaryMask& seg, const BinaryMask& gt);

}  // namespace octaseg
