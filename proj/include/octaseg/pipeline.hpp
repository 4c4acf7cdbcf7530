#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "octaseg/binarise.hpp"
#include "octaseg/config.hpp"
#include "octaseg/metrics.hpp"
#include "octaseg/netstruct.hpp"

namespace octaseg {

GrayImage enhance_image(const GrayImage& img, const PipelineConfig& cfg);

/// Enhance, binarise, then clean. The classifier is only read for knn configs.
class Segmenter {
public:
    /// Loads the k-NN training set when the config asks for it.
    explicit Segmenter(PipelineConfig cfg);

    const PipelineConfig& config() const noexcept { return cfg_; }
    BinaryMask binarise(const GrayImage& enhanced) const;
    BinaryMask clean(const BinaryMask& mask) const;
    BinaryMask segment(const GrayImage& img) const;

private:
    PipelineConfig cfg_;
    std::unique_ptr<KnnClassifier> knn_;
};

/// Runs fn(0..count-1) on at most jobs threads; exceptions are rethrown after all workers stop.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

/// Regular files with a supported raster extension, sorted by filename.
std::vector<std::filesystem::path> list_rasters(const std::filesystem::path& dir);

struct ReportRow {
    std::string file;
    std::optional<EvalReport> report;  // absent when the pair could not be evaluated
    std::string error;
};

struct MetricMean {
    std::optional<double> mean;
    std::size_t used{};
    std::size_t skipped{};
};

/// Column name to mean over rows with a defined value.
using Aggregate = std::map<std::string, MetricMean>;

/// Column order of the CSV report.
const std::vector<std::string>& report_columns();
/// Column values of one report, in report_columns() order (after "file").
std::vector<std::optional<double>> report_values(const EvalReport& r);

Aggregate aggregate_rows(const std::vector<ReportRow>& rows);

std::string rows_to_csv(const std::vector<ReportRow>& rows, const Aggregate& agg);
std::string rows_to_json(const std::vector<ReportRow>& rows, const Aggregate& agg);

struct SegmentEntry {
    std::string input;
    std::string mask;
    std::string error;
    std::optional<std::string> ground_truth;
    std::optional<EvalReport> report;
};

struct RunManifest {
    std::string config_digest;
    std::string config;  // canonical JSON
    std::vector<SegmentEntry> entries;
};

std::string manifest_to_json(const RunManifest& m);

/// {"width", "height", "nodes": [{"row", "col", "kind"}], "edges": [{"a", "b", "length", "chain": [[r, c], ...]}]}
std::string graph_to_json(const VesselGraph& g);

/// Pairs files of two directories by name; unmatched names come back with one side missing.
struct FilePair {
    std::string name;
    std::optional<std::filesystem::path> a;
    std::optional<std::filesystem::path> b;
};
std::vector<FilePair> match_files(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b);

}  // namespace octaseg
