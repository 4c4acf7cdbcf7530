#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "octaseg/config.hpp"
#include "octaseg/imgio.hpp"
#include "octaseg/metrics.hpp"
#include "octaseg/phantom.hpp"
#include "octaseg/pipeline.hpp"

namespace fs = std::filesystem;
using namespace octaseg;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kInvalid = 2;

struct Common {
    std::string config_path;
    std::string out;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c, bool with_config, bool with_out, bool with_jobs, bool with_format) {
    if (with_config) sub->add_option("--config", c.config_path, "pipeline configuration (JSON)")->check(CLI::ExistingFile);
    if (with_out) sub->add_option("--out", c.out, "output directory");
    if (with_jobs) sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    if (with_format) sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "json"}));
}

PipelineConfig config_from(const Common& c) {
    return c.config_path.empty() ? PipelineConfig{} : load_config(c.config_path);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ImageIoError(IoErrorKind::WriteFailed, "cannot write " + path.string());
    f << text;
    if (!f) throw ImageIoError(IoErrorKind::WriteFailed, "cannot write " + path.string());
}

/// Report to --out/<name> when an output directory is given, otherwise stdout.
void emit(const Common& c, const std::string& name, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(c.out);
    write_text(fs::path(c.out) / name, text);
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            auto listed = list_rasters(in);
            files.insert(files.end(), listed.begin(), listed.end());
        } else {
            files.emplace_back(in);
        }
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename() != b.filename() ? a.filename() < b.filename() : a < b;
    });
    return files;
}

std::vector<ReportRow> rows_for_pair(const std::string& name, const BinaryMask& seg, const BinaryMask& gt,
                                     const std::optional<RoiSpec>& roi, bool per_roi) {
    if (!per_roi) return {{name, evaluate(seg, gt), {}}};
    const RoiSpec spec = roi ? *roi : default_roi_spec(gt.width(), gt.height());
    const auto seg_rois = extract_rois(seg, spec);
    const auto gt_rois = extract_rois(gt, spec);
    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < seg_rois.size(); ++i) {
        const std::string label(to_string(seg_rois[i].first));
        try {
            rows.push_back({name + ":" + label, evaluate(seg_rois[i].second, gt_rois[i].second), {}});
        } catch (const std::exception& e) {
            rows.push_back({name + ":" + label, std::nullopt, e.what()});
        }
    }
    return rows;
}

int cmd_segment(const Common& c, const std::vector<std::string>& inputs, const std::string& gt_dir) {
    if (c.out.empty()) throw CLI::ValidationError("--out", "segment needs an output directory");
    const PipelineConfig cfg = config_from(c);
    const Segmenter seg(cfg);
    const auto files = expand_inputs(inputs);
    if (files.empty()) {
        std::cerr << "no input images\n";
        return kInvalid;
    }
    const fs::path out(c.out);
    fs::create_directories(out / "masks");

    RunManifest manifest{config_digest(cfg), canonical_config(cfg), std::vector<SegmentEntry>(files.size())};
    parallel_for(files.size(), c.jobs, [&](std::size_t i) {
        SegmentEntry& e = manifest.entries[i];
        e.input = files[i].string();
        try {
            const GrayImage img = load_gray(files[i]);
            const BinaryMask mask = seg.segment(img);
            // relative to the manifest
            const fs::path rel = fs::path("masks") / files[i].filename().replace_extension(".png");
            save_mask(mask, out / rel);
            e.mask = rel.string();
            if (!gt_dir.empty()) {
                const fs::path gt_path = fs::path(gt_dir) / files[i].filename();
                e.ground_truth = gt_path.string();
                e.report = evaluate(mask, load_mask(gt_path));
            }
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
    });

    write_text(out / "manifest.json", manifest_to_json(manifest));
    int failures = 0;
    std::vector<ReportRow> rows;
    for (const auto& e : manifest.entries) {
        if (!e.error.empty()) {
            ++failures;
            std::cerr << e.input << ": " << e.error << "\n";
        }
        if (e.ground_truth) rows.push_back({fs::path(e.input).filename().string(), e.report, e.error});
    }
    if (!gt_dir.empty()) {
        const auto agg = aggregate_rows(rows);
        write_text(out / (c.format == "json" ? "report.json" : "report.csv"),
                   c.format == "json" ? rows_to_json(rows, agg) : rows_to_csv(rows, agg));
    }
    std::cerr << "segmented " << files.size() - failures << "/" << files.size() << " images, config "
              << manifest.config_digest.substr(0, 12) << "\n";
    return failures == 0 ? kOk : kPartial;
}

int cmd_evaluate(const Common& c, const std::string& seg_dir, const std::string& gt_dir, bool per_roi) {
    const std::optional<RoiSpec> roi = c.config_path.empty() ? std::nullopt : load_config(c.config_path).roi;
    const auto pairs = match_files(seg_dir, gt_dir);
    std::vector<std::vector<ReportRow>> per_pair(pairs.size());
    parallel_for(pairs.size(), c.jobs, [&](std::size_t i) {
        const FilePair& p = pairs[i];
        if (!p.a || !p.b) {
            per_pair[i] = {{p.name, std::nullopt, p.a ? "no ground truth" : "no segmentation"}};
            return;
        }
        try {
            per_pair[i] = rows_for_pair(p.name, load_mask(*p.a), load_mask(*p.b), roi, per_roi);
        } catch (const std::exception& e) {
            per_pair[i] = {{p.name, std::nullopt, e.what()}};
        }
    });
    std::vector<ReportRow> rows;
    for (auto& v : per_pair) rows.insert(rows.end(), v.begin(), v.end());
    int problems = 0;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            ++problems;
            std::cerr << "warning: " << r.file << ": " << r.error << "\n";
        }
    }
    const auto agg = aggregate_rows(rows);
    if (c.format == "json") emit(c, "report.json", rows_to_json(rows, agg));
    else emit(c, "report.csv", rows_to_csv(rows, agg));
    if (pairs.empty()) return kInvalid;
    return problems == 0 ? kOk : kPartial;
}

int cmd_agree(const Common& c, const std::string& dir_a, const std::string& dir_b) {
    const auto pairs = match_files(dir_a, dir_b);
    struct Row {
        std::string name;
        std::optional<double> kappa;
        std::string note;
    };
    std::vector<Row> rows(pairs.size());
    parallel_for(pairs.size(), c.jobs, [&](std::size_t i) {
        const FilePair& p = pairs[i];
        rows[i].name = p.name;
        if (!p.a || !p.b) {
            rows[i].note = "unmatched";
            return;
        }
        try {
            rows[i].kappa = cohens_kappa(load_mask(*p.a), load_mask(*p.b));
            if (!rows[i].kappa) rows[i].note = "degenerate";
        } catch (const std::exception& e) {
            rows[i].note = e.what();
        }
    });
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& r : rows) {
        if (r.kappa) {
            sum += *r.kappa;
            ++used;
        } else {
            std::cerr << "warning: " << r.name << ": " << r.note << "\n";
        }
    }
    const std::optional<double> mean = used ? std::optional(sum / static_cast<double>(used)) : std::nullopt;
    std::string text;
    if (c.format == "json") {
        nlohmann::json j;
        j["pairs"] = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json e = {{"file", r.name}, {"kappa", r.kappa ? nlohmann::json(*r.kappa) : nlohmann::json()}};
            if (!r.note.empty()) e["note"] = r.note;
            j["pairs"].push_back(e);
        }
        j["mean"] = mean ? nlohmann::json(*mean) : nlohmann::json();
        j["n"] = used;
        j["skipped"] = rows.size() - used;
        text = j.dump(2) + "\n";
    } else {
        text = "file,kappa\n";
        for (const auto& r : rows) text += r.name + "," + (r.kappa ? nlohmann::json(*r.kappa).dump() : "") + "\n";
        text += "mean," + (mean ? nlohmann::json(*mean).dump() : "") + "\n";
    }
    emit(c, c.format == "json" ? "agreement.json" : "agreement.csv", text);
    if (pairs.empty()) return kInvalid;
    return used == rows.size() ? kOk : kPartial;
}

int cmd_faz(const Common& c, const std::string& mask_path, const std::string& graph_path) {
    const BinaryMask mask = load_mask(mask_path);
    const BinaryMask skeleton = skeletonize(mask);
    if (!graph_path.empty()) {
        std::ofstream g(graph_path);
        if (!(g << graph_to_json(skeleton_to_graph(skeleton)))) {
            throw ImageIoError(IoErrorKind::WriteFailed, "cannot write " + graph_path);
        }
    }
    FazRegion faz;
    try {
        faz = detect_faz(skeleton);
    } catch (const NoLoopError& e) {
        std::cerr << mask_path << ": " << e.what() << "\n";
        return kPartial;
    }
    const double ai = acircularity(faz);
    if (c.format == "csv") {
        emit(c, "faz.csv",
             "area,perimeter,acircularity\n" + nlohmann::json(faz.area).dump() + "," + nlohmann::json(faz.perimeter).dump() +
                 "," + nlohmann::json(ai).dump() + "\n");
        return kOk;
    }
    nlohmann::json j = {{"file", mask_path}, {"area", faz.area}, {"perimeter", faz.perimeter}, {"acircularity", ai}};
    j["boundary"] = nlohmann::json::array();
    for (const Pixel& p : faz.boundary) j["boundary"].push_back({p.row, p.col});
    emit(c, "faz.json", j.dump() + "\n");
    return kOk;
}

struct PhantomOptions {
    std::string kind = "network";
    int size = 304;
    std::uint64_t seed = 1;
    int count = 1;
    double background = 0.1;
    double contrast = 0.8;
    double noise = 0.0;
    std::string profile = "flat";
};

int cmd_phantom(const Common& c, const PhantomOptions& o) {
    if (c.out.empty()) throw CLI::ValidationError("--out", "phantom needs an output directory");
    const PhantomKind kind = parse_phantom_kind(o.kind);
    const fs::path out(c.out);
    fs::create_directories(out / "images");
    fs::create_directories(out / "masks");
    parallel_for(static_cast<std::size_t>(o.count), c.jobs, [&](std::size_t i) {
        const std::uint64_t seed = o.seed + i;
        RenderStyle style;
        style.background = o.background;
        style.contrast = o.contrast;
        style.noise_sigma = o.noise;
        style.profile = o.profile == "gaussian" ? Profile::Gaussian : Profile::Flat;
        style.seed = seed;
        const Phantom p = make_phantom(kind, o.size, seed, style);
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04llu.png", o.kind.c_str(), static_cast<unsigned long long>(seed));
        save_gray(p.image, out / "images" / name);
        save_mask(p.mask, out / "masks" / name);
    });
    return kOk;
}

int cmd_roi(const Common& c, const std::string& image, bool as_mask) {
    if (c.out.empty()) throw CLI::ValidationError("--out", "roi needs an output directory");
    fs::create_directories(c.out);
    const std::optional<RoiSpec> cfg_roi = c.config_path.empty() ? std::nullopt : load_config(c.config_path).roi;
    const std::string stem = fs::path(image).stem().string();
    if (as_mask) {
        const BinaryMask m = load_mask(image);
        const RoiSpec spec = cfg_roi ? *cfg_roi : default_roi_spec(m.width(), m.height());
        for (const auto& [label, crop] : extract_rois(m, spec)) {
            save_mask(crop, fs::path(c.out) / (stem + "_" + std::string(to_string(label)) + ".png"));
        }
    } else {
        const GrayImage g = load_gray(image);
        const RoiSpec spec = cfg_roi ? *cfg_roi : default_roi_spec(g.width(), g.height());
        for (const auto& [label, crop] : extract_rois(g, spec)) {
            save_gray(crop, fs::path(c.out) / (stem + "_" + std::string(to_string(label)) + ".png"));
        }
    }
    return kOk;
}

int cmd_train(const std::string& image_dir, const std::string& mask_dir, std::size_t per_class, std::uint64_t seed,
              const std::string& out_csv) {
    std::vector<LabeledFeature> samples;
    int unmatched = 0;
    std::uint64_t s = seed;
    for (const FilePair& p : match_files(image_dir, mask_dir)) {
        if (!p.a || !p.b) {
            ++unmatched;
            continue;
        }
        auto part = sample_training_pixels(load_gray(*p.a), load_mask(*p.b), per_class, s++);
        samples.insert(samples.end(), part.begin(), part.end());
    }
    TrainingSet(std::move(samples)).save_csv(out_csv);
    return unmatched == 0 ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OCTA angiogram vessel segmentation and evaluation"};
    app.require_subcommand(1);

    Common common;
    std::vector<std::string> inputs;
    std::string gt_dir, seg_dir, dir_a, dir_b, mask_path, image_path;
    bool per_roi = false, as_mask = false;
    PhantomOptions ph;
    std::size_t per_class = 500;
    std::uint64_t train_seed = 0;
    std::string train_out;

    auto* segment = app.add_subcommand("segment", "enhance, binarise and clean scans");
    segment->add_option("inputs", inputs, "scan files or directories")->required();
    segment->add_option("--gt", gt_dir, "ground-truth directory; evaluates each mask when given")
        ->check(CLI::ExistingDirectory);
    add_common(segment, common, true, true, true, true);

    auto* eval = app.add_subcommand("evaluate", "score segmentations against ground truth");
    eval->add_option("seg_dir", seg_dir)->required()->check(CLI::ExistingDirectory);
    eval->add_option("gt_dir", gt_dir)->required()->check(CLI::ExistingDirectory);
    eval->add_flag("--rois", per_roi, "one row per clinical region instead of per image");
    add_common(eval, common, true, true, true, true);

    auto* agree = app.add_subcommand("agree", "Cohen's kappa between two sets of masks");
    agree->add_option("dir_a", dir_a)->required()->check(CLI::ExistingDirectory);
    agree->add_option("dir_b", dir_b)->required()->check(CLI::ExistingDirectory);
    add_common(agree, common, false, true, true, true);

    auto* faz = app.add_subcommand("faz", "foveal avascular zone area, perimeter and acircularity");
    faz->add_option("mask", mask_path)->required()->check(CLI::ExistingFile);
    Common faz_common;
    faz_common.format = "json";
    add_common(faz, faz_common, false, true, false, true);
    std::string graph_path;
    faz->add_option("--graph", graph_path, "also write the skeleton's vessel graph as JSON");

    auto* phantom = app.add_subcommand("phantom", "synthetic scans with analytic masks");
    phantom->add_option("--kind", ph.kind)->check(CLI::IsMember({"tube", "ring", "grid", "tree", "network"}));
    phantom->add_option("--size", ph.size)->check(CLI::Range(16, 4096));
    phantom->add_option("--seed", ph.seed);
    phantom->add_option("--count", ph.count)->check(CLI::Range(1, 100000));
    phantom->add_option("--background", ph.background)->check(CLI::Range(0.0, 1.0));
    phantom->add_option("--contrast", ph.contrast)->check(CLI::Range(0.0, 1.0));
    phantom->add_option("--noise", ph.noise)->check(CLI::NonNegativeNumber);
    phantom->add_option("--profile", ph.profile)->check(CLI::IsMember({"flat", "gaussian"}));
    add_common(phantom, common, false, true, true, false);

    auto* roi = app.add_subcommand("roi", "crop the five parafoveal regions");
    roi->add_option("image", image_path)->required()->check(CLI::ExistingFile);
    roi->add_flag("--mask", as_mask, "treat the input as a binary mask");
    add_common(roi, common, true, true, false, false);

    auto* train = app.add_subcommand("train", "sample a k-NN training set from labelled scans");
    train->add_option("image_dir", image_path)->required()->check(CLI::ExistingDirectory);
    train->add_option("mask_dir", mask_path)->required()->check(CLI::ExistingDirectory);
    train->add_option("--per-class", per_class, "pixels per class drawn from each image");
    train->add_option("--seed", train_seed);
    train->add_option("--out", train_out, "training CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*segment) return cmd_segment(common, inputs, gt_dir);
        if (*eval) return cmd_evaluate(common, seg_dir, gt_dir, per_roi);
        if (*agree) return cmd_agree(common, dir_a, dir_b);
        if (*faz) return cmd_faz(faz_common, mask_path, graph_path);
        if (*phantom) return cmd_phantom(common, ph);
        if (*roi) return cmd_roi(common, image_path, as_mask);
        if (*train) return cmd_train(image_path, mask_path, per_class, train_seed, train_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kInvalid;
    } catch (const ImageIoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}
