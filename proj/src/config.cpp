#include "octaseg/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace octaseg {

using nlohmann::json;

namespace {

const std::array<std::pair<Enhancement, const char*>, 5> kEnhancementNames{{
    {Enhancement::None, "none"},
    {Enhancement::Frangi, "frangi"},
    {Enhancement::Gabor, "gabor"},
    {Enhancement::ScirdTs, "scird_ts"},
    {Enhancement::Oof, "oof"},
}};

const std::array<std::pair<Binarisation, const char*>, 5> kBinarisationNames{{
    {Binarisation::Adaptive, "adaptive"},
    {Binarisation::Otsu, "otsu"},
    {Binarisation::Histogram, "histogram"},
    {Binarisation::TwoStep, "two_step"},
    {Binarisation::Knn, "knn"},
}};

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double get_number(const json& obj, const std::string& key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<int>();
}

std::array<double, 2> get_pair(const json& obj, const std::string& key, std::array<double, 2> fallback,
                               const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(where + "." + key + " must be a two-element numeric array");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

void read_frangi(const json& j, FrangiParams& p) {
    const std::string w = "Frangi";
    reject_unknown(j, {"FrangiScaleRange", "FrangiScaleRatio", "FrangiBetaOne", "FrangiBetaTwo"}, w);
    p.scale_range = get_pair(j, "FrangiScaleRange", p.scale_range, w);
    p.scale_ratio = get_number(j, "FrangiScaleRatio", p.scale_ratio, w);
    p.beta_one = get_number(j, "FrangiBetaOne", p.beta_one, w);
    p.beta_two = get_number(j, "FrangiBetaTwo", p.beta_two, w);
}

void read_gabor(const json& j, GaborParams& p) {
    const std::string w = "Gabor";
    reject_unknown(j, {"scales", "epsilon", "k0", "n_orientations"}, w);
    if (j.contains("scales")) {
        const json& s = j.at("scales");
        if (!s.is_array()) throw ConfigError("Gabor.scales must be an array");
        p.scales.clear();
        for (const json& v : s) {
            if (!v.is_number()) throw ConfigError("Gabor.scales must hold numbers");
            p.scales.push_back(v.get<double>());
        }
    }
    p.epsilon = get_number(j, "epsilon", p.epsilon, w);
    p.k0 = get_pair(j, "k0", p.k0, w);
    p.n_orientations = get_int(j, "n_orientations", p.n_orientations, w);
}

void read_scird(const json& j, ScirdParams& p) {
    const std::string w = "SCIRD-TS";
    reject_unknown(j,
                   {"fb_parameters.sigma_1", "fb_parameters.sigma_1_step", "fb_parameters.sigma_2",
                    "fb_parameters.sigma_2_step", "fb_parameters.k", "fb_parameters.k_step",
                    "fb_parameters.angle_step", "fb_parameters.filter_size", "alpha"},
                   w);
    p.sigma_1 = get_pair(j, "fb_parameters.sigma_1", p.sigma_1, w);
    p.sigma_1_step = get_number(j, "fb_parameters.sigma_1_step", p.sigma_1_step, w);
    p.sigma_2 = get_pair(j, "fb_parameters.sigma_2", p.sigma_2, w);
    p.sigma_2_step = get_number(j, "fb_parameters.sigma_2_step", p.sigma_2_step, w);
    p.k = get_pair(j, "fb_parameters.k", p.k, w);
    p.k_step = get_number(j, "fb_parameters.k_step", p.k_step, w);
    p.angle_step = get_number(j, "fb_parameters.angle_step", p.angle_step, w);
    p.filter_size = get_int(j, "fb_parameters.filter_size", p.filter_size, w);
    p.alpha = get_number(j, "alpha", p.alpha, w);
}

void read_oof(const json& j, OofParams& p) {
    const std::string w = "OOF";
    reject_unknown(j, {"range", "sigma", "upthreshold"}, w);
    p.radius_range = get_pair(j, "range", p.radius_range, w);
    p.sigma = get_number(j, "sigma", p.sigma, w);
    p.upthreshold = get_number(j, "upthreshold", p.upthreshold, w);
}

RoiSpec read_roi(const json& j) {
    reject_unknown(j, {"roi_size", "offsets"}, "roi");
    if (!j.contains("roi_size") || !j.contains("offsets")) throw ConfigError("roi needs roi_size and offsets");
    RoiSpec spec;
    spec.roi_size = get_int(j, "roi_size", 0, "roi");
    const json& offs = j.at("offsets");
    if (!offs.is_object()) throw ConfigError("roi.offsets must be an object");
    std::set<std::string> seen;
    for (const auto& [key, v] : offs.items()) {
        const auto label = parse_roi_label(key);
        if (!label) throw ConfigError("unknown ROI label '" + key + "'");
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
            throw ConfigError("roi.offsets." + key + " must be [row, col]");
        }
        spec.set_offset(*label, {v[0].get<int>(), v[1].get<int>()});
        seen.insert(key);
    }
    if (seen.size() != kAllRoiLabels.size()) throw ConfigError("roi.offsets must list all five regions");
    return spec;
}

template <class Params>
void check(const Params& p, const std::string& what) {
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

json pair_json(const std::array<double, 2>& p) { return json::array({p[0], p[1]}); }

}  // namespace

std::string to_string(Enhancement e) {
    for (const auto& [v, n] : kEnhancementNames) {
        if (v == e) return n;
    }
    return "unknown";
}

std::string to_string(Binarisation b) {
    for (const auto& [v, n] : kBinarisationNames) {
        if (v == b) return n;
    }
    return "unknown";
}

Enhancement parse_enhancement(const std::string& name) {
    for (const auto& [v, n] : kEnhancementNames) {
        if (name == n) return v;
    }
    throw ConfigError("unknown enhancement '" + name + "'");
}

Binarisation parse_binarisation(const std::string& name) {
    for (const auto& [v, n] : kBinarisationNames) {
        if (name == n) return v;
    }
    throw ConfigError("unknown binarisation '" + name + "'");
}

void PipelineConfig::validate() const {
    check(frangi, "Frangi");
    check(gabor, "Gabor");
    check(scird, "SCIRD-TS");
    check(oof, "OOF");
    if (oof.upthreshold < 0.0 || oof.upthreshold > 255.0) throw ConfigError("OOF.upthreshold must lie in [0,255]");
    if (binarisation == Binarisation::TwoStep && enhancement != Enhancement::Oof) {
        throw ConfigError("two_step binarisation requires oof enhancement");
    }
    if (window < 3 || window % 2 == 0) throw ConfigError("adaptive.window must be odd and >= 3");
    if (!(ratio >= 0.0 && ratio < 1.0)) throw ConfigError("adaptive.ratio must lie in [0,1)");
    if (binarisation == Binarisation::Knn) {
        if (knn_k < 1 || knn_k % 2 == 0) throw ConfigError("knn.k must be odd and positive");
        if (knn_training.empty()) throw ConfigError("knn binarisation needs knn.training");
    }
    if (min_area < 0) throw ConfigError("cleanup.min_area must be >= 0");
    if (opening_radius < 0.0) throw ConfigError("cleanup.opening_radius must be >= 0");
    if (roi) {
        if (roi->roi_size < 1) throw ConfigError("roi.roi_size must be positive");
        for (const Pixel& p : roi->offsets) {
            if (p.row < 0 || p.col < 0) throw ConfigError("roi offsets must be non-negative");
        }
    }
}

PipelineConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    reject_unknown(root,
                   {"enhancement", "binarisation", "Frangi", "Gabor", "SCIRD-TS", "OOF", "adaptive", "knn", "cleanup",
                    "roi"},
                   "config");
    PipelineConfig cfg;
    try {
        if (root.contains("enhancement")) cfg.enhancement = parse_enhancement(root.at("enhancement").get<std::string>());
        if (root.contains("binarisation")) {
            cfg.binarisation = parse_binarisation(root.at("binarisation").get<std::string>());
        }
    } catch (const json::type_error&) {
        throw ConfigError("enhancement and binarisation must be strings");
    }
    if (root.contains("Frangi")) read_frangi(root.at("Frangi"), cfg.frangi);
    if (root.contains("Gabor")) read_gabor(root.at("Gabor"), cfg.gabor);
    if (root.contains("SCIRD-TS")) read_scird(root.at("SCIRD-TS"), cfg.scird);
    if (root.contains("OOF")) read_oof(root.at("OOF"), cfg.oof);
    if (root.contains("adaptive")) {
        const json& a = root.at("adaptive");
        reject_unknown(a, {"window", "ratio"}, "adaptive");
        cfg.window = get_int(a, "window", cfg.window, "adaptive");
        cfg.ratio = get_number(a, "ratio", cfg.ratio, "adaptive");
    }
    if (root.contains("knn")) {
        const json& k = root.at("knn");
        reject_unknown(k, {"k", "training"}, "knn");
        cfg.knn_k = get_int(k, "k", cfg.knn_k, "knn");
        if (k.contains("training")) {
            if (!k.at("training").is_string()) throw ConfigError("knn.training must be a path string");
            cfg.knn_training = k.at("training").get<std::string>();
        }
    }
    if (root.contains("cleanup")) {
        const json& c = root.at("cleanup");
        reject_unknown(c, {"min_area", "opening_radius"}, "cleanup");
        cfg.min_area = get_int(c, "min_area", cfg.min_area, "cleanup");
        cfg.opening_radius = get_number(c, "opening_radius", cfg.opening_radius, "cleanup");
    }
    if (root.contains("roi")) cfg.roi = read_roi(root.at("roi"));
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const PipelineConfig& cfg) {
    json j;
    j["enhancement"] = to_string(cfg.enhancement);
    j["binarisation"] = to_string(cfg.binarisation);
    switch (cfg.enhancement) {
        case Enhancement::None: break;
        case Enhancement::Frangi:
            j["Frangi"] = {{"FrangiScaleRange", pair_json(cfg.frangi.scale_range)},
                           {"FrangiScaleRatio", cfg.frangi.scale_ratio},
                           {"FrangiBetaOne", cfg.frangi.beta_one},
                           {"FrangiBetaTwo", cfg.frangi.beta_two}};
            break;
        case Enhancement::Gabor:
            j["Gabor"] = {{"scales", cfg.gabor.scales},
                          {"epsilon", cfg.gabor.epsilon},
                          {"k0", pair_json(cfg.gabor.k0)},
                          {"n_orientations", cfg.gabor.n_orientations}};
            break;
        case Enhancement::ScirdTs:
            j["SCIRD-TS"] = {{"fb_parameters.sigma_1", pair_json(cfg.scird.sigma_1)},
                             {"fb_parameters.sigma_1_step", cfg.scird.sigma_1_step},
                             {"fb_parameters.sigma_2", pair_json(cfg.scird.sigma_2)},
                             {"fb_parameters.sigma_2_step", cfg.scird.sigma_2_step},
                             {"fb_parameters.k", pair_json(cfg.scird.k)},
                             {"fb_parameters.k_step", cfg.scird.k_step},
                             {"fb_parameters.angle_step", cfg.scird.angle_step},
                             {"fb_parameters.filter_size", cfg.scird.filter_size},
                             {"alpha", cfg.scird.alpha}};
            break;
        case Enhancement::Oof: break;
    }
    if (cfg.enhancement == Enhancement::Oof) {
        j["OOF"] = {{"range", pair_json(cfg.oof.radius_range)}, {"sigma", cfg.oof.sigma}};
        if (cfg.binarisation == Binarisation::TwoStep) j["OOF"]["upthreshold"] = cfg.oof.upthreshold;
    }
    if (cfg.binarisation == Binarisation::Adaptive || cfg.binarisation == Binarisation::TwoStep) {
        j["adaptive"] = {{"window", cfg.window}, {"ratio", cfg.ratio}};
    }
    if (cfg.binarisation == Binarisation::Knn) j["knn"] = {{"k", cfg.knn_k}, {"training", cfg.knn_training}};
    j["cleanup"] = {{"min_area", cfg.min_area}, {"opening_radius", cfg.opening_radius}};
    if (cfg.roi) {
        json offs = json::object();
        for (RoiLabel label : kAllRoiLabels) {
            const Pixel p = cfg.roi->offset(label);
            offs[std::string(to_string(label))] = {p.row, p.col};
        }
        j["roi"] = {{"roi_size", cfg.roi->roi_size}, {"offsets", offs}};
    }
    return j.dump();
}

std::string config_digest(const PipelineConfig& cfg) {
    const std::string text = canonical_config(cfg);
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

}  // namespace octaseg
