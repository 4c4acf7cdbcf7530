#include "octaseg/binarise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "detail/raster_util.hpp"
#include "octaseg/netstruct.hpp"

namespace octaseg {

BinaryMask adaptive_threshold(const GrayImage& img, int window, double ratio) {
    if (window < 3 || window % 2 == 0) throw ParamError("adaptive window must be odd and >= 3");
    if (!(ratio >= 0.0 && ratio < 1.0)) throw ParamError("adaptive ratio must lie in [0,1)");
    const int W = img.width(), H = img.height();
    const int half = window / 2;
    const auto rows = detail::reflected_indices(H, half);
    const auto cols = detail::reflected_indices(W, half);
    // Summed-area table over the mirror-padded image, one extra leading row/column of zeros.
    const int pw = W + 2 * half + 1;
    const int ph = H + 2 * half + 1;
    std::vector<double> sat(static_cast<std::size_t>(pw) * ph, 0.0);
    for (int r = 1; r < ph; ++r) {
        double row_sum = 0.0;
        for (int c = 1; c < pw; ++c) {
            row_sum += img.at(rows[r - 1], cols[c - 1]);
            sat[static_cast<std::size_t>(r) * pw + c] = sat[static_cast<std::size_t>(r - 1) * pw + c] + row_sum;
        }
    }
    auto at = [&](int r, int c) { return sat[static_cast<std::size_t>(r) * pw + c]; };
    const double area = static_cast<double>(window) * window;
    BinaryMask out(W, H);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            // Padded window rows r..r+window-1 map to SAT indices r..r+window.
            const double sum = at(r + window, c + window) - at(r, c + window) - at(r + window, c) + at(r, c);
            // cancellation in the table can leave a tiny negative sum over an all-zero window
            const double mean = std::max(0.0, sum / area);
            out.set(r, c, img.at(r, c) > mean * (1.0 - ratio));
        }
    }
    return out;
}

std::array<std::uint64_t, 256> histogram256(const GrayImage& img) {
    std::array<std::uint64_t, 256> h{};
    for (double v : img.data()) ++h[static_cast<std::size_t>(std::lround(v * 255.0))];
    return h;
}

namespace {

void require_two_levels(const std::array<std::uint64_t, 256>& hist) {
    const auto levels = std::count_if(hist.begin(), hist.end(), [](std::uint64_t n) { return n > 0; });
    if (levels < 2) throw ThresholdError("degenerate histogram: fewer than two intensity levels");
}

BinaryMask above_level(const GrayImage& img, int level) {
    BinaryMask out(img.width(), img.height());
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) out.set_index(i, std::lround(data[i] * 255.0) > level);
    return out;
}

}  // namespace

int otsu_level(const std::array<std::uint64_t, 256>& hist) {
    require_two_levels(hist);
    double total = 0.0, total_mass = 0.0;
    for (int i = 0; i < 256; ++i) {
        total += static_cast<double>(hist[static_cast<std::size_t>(i)]);
        total_mass += i * static_cast<double>(hist[static_cast<std::size_t>(i)]);
    }
    double w0 = 0.0, mass0 = 0.0, best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += static_cast<double>(hist[static_cast<std::size_t>(t)]);
        mass0 += t * static_cast<double>(hist[static_cast<std::size_t>(t)]);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = mass0 / w0;
        const double mu1 = (total_mass - mass0) / w1;
        const double between = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask otsu_threshold(const GrayImage& img) { return above_level(img, otsu_level(histogram256(img))); }

// Zack's triangle method. The line runs from the peak to one bin past the
// far end of the longer tail; the level is the bin whose count lies furthest
// below that line.
int triangle_level(const std::array<std::uint64_t, 256>& hist) {
    require_two_levels(hist);
    int lo = 0, hi = 255;
    while (hist[static_cast<std::size_t>(lo)] == 0) ++lo;
    while (hist[static_cast<std::size_t>(hi)] == 0) --hi;
    const int peak = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    const bool bright_tail = (hi - peak) >= (peak - lo);
    const int end = bright_tail ? std::min(hi + 1, 255) : std::max(lo - 1, 0);
    const double hp = static_cast<double>(hist[static_cast<std::size_t>(peak)]);
    const double he = static_cast<double>(hist[static_cast<std::size_t>(end)]);
    const int step = bright_tail ? 1 : -1;
    int best_t = peak;
    double best_d = -1.0;
    for (int t = peak + step; t != end; t += step) {
        const double frac = static_cast<double>(t - peak) / (end - peak);
        const double line = hp + frac * (he - hp);
        const double d = line - static_cast<double>(hist[static_cast<std::size_t>(t)]);
        if (d > best_d) {
            best_d = d;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask histogram_shape_threshold(const GrayImage& img) {
    return above_level(img, triangle_level(histogram256(img)));
}

BinaryMask global_threshold(const GrayImage& img, double level_0_255) {
    BinaryMask out(img.width(), img.height());
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) out.set_index(i, data[i] * 255.0 > level_0_255);
    return out;
}

BinaryMask two_step_binarise(const GrayImage& img, const OofParams& params, int window, double ratio) {
    params.validate();
    return mask_union(global_threshold(img, params.upthreshold), adaptive_threshold(img, window, ratio));
}

// --- features --------------------------------------------------------------------

FeatureField pixel_features(const GrayImage& img) {
    const int W = img.width(), H = img.height();
    if (W < 3 || H < 3) throw RasterError("pixel features need an image of at least 3x3");
    const HessianField hess = gaussian_hessian(img, 1.0);
    const auto rows = detail::reflected_indices(H, 1);
    const auto cols = detail::reflected_indices(W, 1);
    FeatureField out{W, H, std::vector<FeatureVector>(img.size())};
    std::array<double, 9> patch{};
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            int n = 0;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) patch[static_cast<std::size_t>(n++)] = img.at(rows[r + dr + 1], cols[c + dc + 1]);
            }
            const auto [mn, mx] = std::minmax_element(patch.begin(), patch.end());
            const double mean = std::accumulate(patch.begin(), patch.end(), 0.0) / 9.0;
            double var = 0.0;
            for (double v : patch) var += (v - mean) * (v - mean);
            var /= 9.0;
            std::array<int, 8> bins{};
            for (double v : patch) ++bins[static_cast<std::size_t>(std::min(7, static_cast<int>(v * 8.0)))];
            double entropy = 0.0;
            for (int b : bins) {
                if (b == 0) continue;
                const double p = b / 9.0;
                entropy -= p * std::log2(p);
            }
            const auto i = static_cast<std::size_t>(r) * W + c;
            const Eigen2 e = eigen_by_magnitude(hess.xx[i], hess.xy[i], hess.yy[i]);
            out.values[i] = {img.at(r, c), *mx - *mn, mean, std::sqrt(var), entropy + 0.0, e.first, e.second};
        }
    }
    return out;
}

// --- training data ---------------------------------------------------------------

TrainingSet::TrainingSet(std::vector<LabeledFeature> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("training set is empty");
    const bool has_vessel = std::any_of(samples_.begin(), samples_.end(), [](const auto& s) { return s.vessel; });
    const bool has_background = std::any_of(samples_.begin(), samples_.end(), [](const auto& s) { return !s.vessel; });
    if (!has_vessel || !has_background) throw std::invalid_argument("training set must contain both classes");
}

void TrainingSet::write_csv(std::ostream& out) const {
    for (const char* name : kFeatureNames) out << name << ',';
    out << "label\n";
    std::ostringstream line;
    line.precision(17);
    for (const auto& s : samples_) {
        line.str({});
        for (double v : s.features) line << v << ',';
        line << (s.vessel ? 1 : 0) << '\n';
        out << line.str();
    }
}

TrainingSet TrainingSet::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("training CSV is empty");
    std::vector<LabeledFeature> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, kFeatureCount + 1> cells{};
        std::size_t pos = 0;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const std::size_t end = std::min(line.find(',', pos), line.size());
            const char* first = line.data() + pos;
            const char* last = line.data() + end;
            const auto res = std::from_chars(first, last, cells[k]);
            if (res.ec != std::errc() || res.ptr != last || (k + 1 < cells.size() && end == line.size())) {
                throw std::invalid_argument("malformed training CSV at line " + std::to_string(line_no));
            }
            pos = end + 1;
        }
        LabeledFeature f{};
        std::copy_n(cells.begin(), kFeatureCount, f.features.begin());
        f.vessel = cells.back() != 0.0;
        samples.push_back(f);
    }
    return TrainingSet(std::move(samples));
}

TrainingSet TrainingSet::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open training CSV " + path.string());
    return read_csv(in);
}

void TrainingSet::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write training CSV " + path.string());
    write_csv(out);
}

std::vector<LabeledFeature> sample_training_pixels(const GrayImage& img, const BinaryMask& truth, std::size_t per_class,
                                                   std::uint64_t seed) {
    if (img.width() != truth.width() || img.height() != truth.height()) {
        throw RasterError("training image and mask differ in size");
    }
    const FeatureField features = pixel_features(img);
    std::vector<std::size_t> vessel, background;
    for (std::size_t i = 0; i < truth.size(); ++i) (truth[i] ? vessel : background).push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<LabeledFeature> out;
    for (auto* pool : {&vessel, &background}) {
        std::shuffle(pool->begin(), pool->end(), rng);
        const std::size_t take = std::min(per_class, pool->size());
        for (std::size_t j = 0; j < take; ++j) out.push_back({features.values[(*pool)[j]], pool == &vessel});
    }
    return out;
}

// --- k-NN ------------------------------------------------------------------------

KnnClassifier::KnnClassifier(const TrainingSet& train, int k) : k_(k) {
    if (k < 1 || k % 2 == 0) throw ParamError("k must be a positive odd number");
    if (static_cast<std::size_t>(k) > train.size()) throw ParamError("k exceeds the training set size");
    const auto n = static_cast<double>(train.size());
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        double mean = 0.0;
        for (const auto& s : train.samples()) mean += s.features[j];
        mean /= n;
        double var = 0.0;
        for (const auto& s : train.samples()) var += (s.features[j] - mean) * (s.features[j] - mean);
        const double sd = std::sqrt(var / n);
        mean_[j] = mean;
        scale_[j] = sd > 0.0 ? sd : 1.0;
    }
    points_.reserve(train.size());
    labels_.reserve(train.size());
    for (const auto& s : train.samples()) {
        points_.push_back(standardize(s.features));
        labels_.push_back(s.vessel ? 1 : 0);
    }
}

FeatureVector KnnClassifier::standardize(const FeatureVector& f) const {
    FeatureVector z{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) z[j] = (f[j] - mean_[j]) / scale_[j];
    return z;
}

bool KnnClassifier::is_vessel(const FeatureVector& f) const {
    const FeatureVector z = standardize(f);
    std::vector<std::pair<double, std::size_t>> dist(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < kFeatureCount; ++j) d += (z[j] - points_[i][j]) * (z[j] - points_[i][j]);
        dist[i] = {d, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
    int votes = 0;
    for (int i = 0; i < k_; ++i) votes += labels_[dist[static_cast<std::size_t>(i)].second];
    return 2 * votes > k_;
}

BinaryMask classify_pixels(const GrayImage& img, const PixelClassifier& classifier) {
    const FeatureField features = pixel_features(img);
    BinaryMask out(img.width(), img.height());
    for (std::size_t i = 0; i < features.values.size(); ++i) out.set_index(i, classifier.is_vessel(features.values[i]));
    return out;
}

BinaryMask knn_binarise(const TrainingSet& train, const GrayImage& img, int k) {
    return classify_pixels(img, KnnClassifier(train, k));
}

// --- cleanup ---------------------------------------------------------------------

BinaryMask clean_small_structures(const BinaryMask& mask, int min_area) {
    if (min_area < 0) throw ParamError("min_area must be non-negative");
    const auto cc = connected_components(mask, Connectivity::Eight);
    const auto sizes = cc.sizes();
    BinaryMask out(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const int l = cc.labels[i];
        out.set_index(i, l > 0 && sizes[static_cast<std::size_t>(l)] >= static_cast<std::size_t>(min_area));
    }
    return out;
}

BinaryMask erode_disc(const BinaryMask& mask, double radius) {
    return mask_complement(dilate_disc(mask_complement(mask), radius));
}

BinaryMask open_disc(const BinaryMask& mask, double radius) { return dilate_disc(erode_disc(mask, radius), radius); }

}  // namespace octaseg
