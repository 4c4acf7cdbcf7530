#include "octaseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

namespace octaseg {

using nlohmann::json;

GrayImage enhance_image(const GrayImage& img, const PipelineConfig& cfg) {
    switch (cfg.enhancement) {
        case Enhancement::None: return img;
        case Enhancement::Frangi: return frangi(img, cfg.frangi);
        case Enhancement::Gabor: return gabor(img, cfg.gabor);
        case Enhancement::ScirdTs: return scird_ts(img, cfg.scird);
        case Enhancement::Oof: return oof(img, cfg.oof);
    }
    throw ConfigError("unknown enhancement");
}

Segmenter::Segmenter(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.binarisation == Binarisation::Knn) {
        try {
            knn_ = std::make_unique<KnnClassifier>(TrainingSet::load_csv(cfg_.knn_training), cfg_.knn_k);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("knn training set: " + std::string(e.what()));
        }
    }
}

BinaryMask Segmenter::binarise(const GrayImage& enhanced) const {
    switch (cfg_.binarisation) {
        case Binarisation::Adaptive: return adaptive_threshold(enhanced, cfg_.window, cfg_.ratio);
        case Binarisation::Otsu: return otsu_threshold(enhanced);
        case Binarisation::Histogram: return histogram_shape_threshold(enhanced);
        case Binarisation::TwoStep: return two_step_binarise(enhanced, cfg_.oof, cfg_.window, cfg_.ratio);
        case Binarisation::Knn: return classify_pixels(enhanced, *knn_);
    }
    throw ConfigError("unknown binarisation");
}

BinaryMask Segmenter::clean(const BinaryMask& mask) const {
    BinaryMask out = clean_small_structures(mask, cfg_.min_area);
    if (cfg_.opening_radius > 0.0) out = open_disc(out, cfg_.opening_radius);
    return out;
}

BinaryMask Segmenter::segment(const GrayImage& img) const { return clean(binarise(enhance_image(img, cfg_))); }

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::filesystem::path> list_rasters(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ImageIoError(IoErrorKind::MissingFile, "not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".pgm") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return out;
}

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols{"dice", "acc", "rec", "pre", "C", "A", "L", "cal",
                                               "lcc", "tops", "vd_seg", "vd_gt", "vd_err", "faz_err", "ai_err"};
    return cols;
}

std::vector<std::optional<double>> report_values(const EvalReport& r) {
    return {r.dice,  r.accuracy, r.recall, r.precision,         r.c,                  r.a,
            r.l,     r.cal,      r.lcc,    r.tops,              r.vessel_density_seg, r.vessel_density_gt,
            r.vd_rel_error,      r.faz_area_rel_error,          r.acircularity_rel_error};
}

Aggregate aggregate_rows(const std::vector<ReportRow>& rows) {
    const auto& cols = report_columns();
    std::vector<double> sums(cols.size(), 0.0);
    Aggregate agg;
    for (const auto& c : cols) agg[c] = {};
    for (const ReportRow& row : rows) {
        if (!row.report) {
            for (const auto& c : cols) ++agg[c].skipped;
            continue;
        }
        const auto values = report_values(*row.report);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (values[i]) {
                sums[i] += *values[i];
                ++agg[cols[i]].used;
            } else {
                ++agg[cols[i]].skipped;
            }
        }
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
        MetricMean& m = agg[cols[i]];
        if (m.used > 0) m.mean = sums[i] / static_cast<double>(m.used);
    }
    return agg;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json faz_json(const std::optional<FazMeasure>& f) {
    if (!f) return nullptr;
    return {{"area", f->area}, {"perimeter", f->perimeter}, {"acircularity", f->acircularity}};
}

json report_json(const EvalReport& r) {
    json j;
    const auto& cols = report_columns();
    const auto values = report_values(r);
    for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = opt_json(values[i]);
    j["kappa"] = opt_json(r.kappa);
    j["faz_seg"] = faz_json(r.faz_seg);
    j["faz_gt"] = faz_json(r.faz_gt);
    return j;
}

json aggregate_json(const Aggregate& agg) {
    json j = json::object();
    for (const auto& [name, m] : agg) j[name] = {{"mean", opt_json(m.mean)}, {"n", m.used}, {"skipped", m.skipped}};
    return j;
}

}  // namespace

std::string rows_to_csv(const std::vector<ReportRow>& rows, const Aggregate& agg) {
    std::string out = "file";
    for (const auto& c : report_columns()) out += "," + c;
    out += "\n";
    for (const ReportRow& row : rows) {
        out += csv_field(row.file);
        if (row.report) {
            for (const auto& v : report_values(*row.report)) out += "," + fmt(v);
        } else {
            out += std::string(report_columns().size(), ',');
        }
        out += "\n";
    }
    out += "mean";
    for (const auto& c : report_columns()) out += "," + fmt(agg.at(c).mean);
    out += "\nskipped";
    for (const auto& c : report_columns()) out += "," + std::to_string(agg.at(c).skipped);
    out += "\n";
    return out;
}

std::string rows_to_json(const std::vector<ReportRow>& rows, const Aggregate& agg) {
    json j;
    j["rows"] = json::array();
    for (const ReportRow& row : rows) {
        json r = row.report ? report_json(*row.report) : json::object();
        r["file"] = row.file;
        if (!row.error.empty()) r["error"] = row.error;
        j["rows"].push_back(std::move(r));
    }
    j["aggregate"] = aggregate_json(agg);
    j["definitions"] = {
        {"acircularity", "faz perimeter / (2 sqrt(pi * faz area)); perimeter walks the outer contour, diagonal steps sqrt(2)"},
        {"vd_err", "|vd_seg - vd_gt| / vd_gt"},
        {"faz_err", "|area_seg - area_gt| / area_gt"},
        {"ai_err", "|acircularity_seg - acircularity_gt| / acircularity_gt"},
        {"mean", "average over rows where the value is defined; skipped counts the others"}};
    return j.dump(2) + "\n";
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["config_digest"] = m.config_digest;
    j["config"] = json::parse(m.config);
    j["entries"] = json::array();
    std::vector<ReportRow> rows;
    for (const SegmentEntry& e : m.entries) {
        json r = {{"input", e.input}};
        if (!e.mask.empty()) r["mask"] = e.mask;
        if (!e.error.empty()) r["error"] = e.error;
        if (e.ground_truth) r["ground_truth"] = *e.ground_truth;
        if (e.report) {
            r["report"] = report_json(*e.report);
            rows.push_back({e.input, e.report, {}});
        }
        j["entries"].push_back(std::move(r));
    }
    if (!rows.empty()) j["aggregate"] = aggregate_json(aggregate_rows(rows));
    return j.dump(2) + "\n";
}

std::vector<FilePair> match_files(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b) {
    std::map<std::string, FilePair> by_name;
    for (const auto& p : list_rasters(dir_a)) {
        auto& fp = by_name[p.filename().string()];
        fp.name = p.filename().string();
        fp.a = p;
    }
    for (const auto& p : list_rasters(dir_b)) {
        auto& fp = by_name[p.filename().string()];
        fp.name = p.filename().string();
        fp.b = p;
    }
    std::vector<FilePair> out;
    out.reserve(by_name.size());
    for (auto& [_, fp] : by_name) out.push_back(std::move(fp));
    return out;
}

std::string graph_to_json(const VesselGraph& g) {
    static constexpr const char* kinds[] = {"endpoint", "junction", "isolated", "loop_anchor"};
    json j = {{"width", g.width}, {"height", g.height}, {"nodes", json::array()}, {"edges", json::array()}};
    for (const GraphNode& n : g.nodes) {
        j["nodes"].push_back({{"row", n.pos.row}, {"col", n.pos.col}, {"kind", kinds[static_cast<int>(n.kind)]}});
    }
    for (const GraphEdge& e : g.edges) {
        json chain = json::array();
        for (const Pixel& p : e.chain) chain.push_back({p.row, p.col});
        j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"length", e.length}, {"chain", std::move(chain)}});
    }
    return j.dump() + "\n";
}

}  // namespace octaseg
