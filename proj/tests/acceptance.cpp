// Acceptance checks, one PASS/FAIL/SKIP line per criterion.
// Exit status is non-zero iff some criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "octaseg/enhance.hpp"
#include "octaseg/imgio.hpp"
#include "octaseg/metrics.hpp"
#include "octaseg/netstruct.hpp"
#include "octaseg/phantom.hpp"
#include "octaseg/pipeline.hpp"
#include "support.hpp"

using namespace octaseg;
namespace fs = std::filesystem;

namespace {

// tolerances and budgets
constexpr double kHandTol = 1e-9;
constexpr double kIdentitySeconds = 5.0;
constexpr double kBettiSeconds = 30.0;
constexpr double kPipelineSecondsPerImage = 10.0;
constexpr double kPhantomDice = 0.85;
constexpr double kPhantomLcc = 0.9;
constexpr double kDatasetTol = 0.05;

struct Outcome {
    enum Kind { Pass, Fail, Skip } kind;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome identity_suite() {
    const auto t0 = Clock::now();
    int bad = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BinaryMask gt = make_phantom(PhantomKind::Network, 304, seed).mask;
        const EvalReport r = evaluate(gt, gt);
        const bool ones = r.dice == 1.0 && r.accuracy == 1.0 && r.precision == 1.0 && r.recall == 1.0 &&
                          r.kappa == 1.0 && r.c == 1.0 && r.a == 1.0 && r.l == 1.0 && r.cal == 1.0 &&
                          r.lcc == 1.0 && r.tops == 1.0;
        const bool zeros = r.vd_rel_error == 0.0 && r.faz_area_rel_error == 0.0 && r.acircularity_rel_error == 0.0;
        if (!ones || !zeros) {
            ++bad;
            std::printf("  identity: phantom seed %llu differs\n", static_cast<unsigned long long>(seed));
        }
    }
    const double s = seconds_since(t0);
    const std::string detail = std::to_string(20 - bad) + "/20 exact, " + fmt("%.2f s", s);
    return {bad == 0 && s < kIdentitySeconds ? Outcome::Pass : Outcome::Fail, detail};
}

Outcome hand_oracles() {
    int bad = 0;
    auto near = [&](std::optional<double> got, double want, const char* what) {
        if (!got || std::abs(*got - want) > kHandTol) {
            ++bad;
            std::printf("  hand: %s = %s, want %.12g\n", what, got ? fmt("%.12g", *got).c_str() : "absent", want);
        }
    };
    {
        const auto [seg, gt] = fixtures::dice_pair();
        near(pixel_metrics(confusion(seg, gt)).dice, 4.0 / 7.0, "dice");
    }
    {
        const auto a = fixtures::row4(true, true, false, false);
        near(cohens_kappa(a, fixtures::row4(true, false, false, false)), 0.5, "kappa");
        near(cohens_kappa(a, mask_complement(a)), -1.0, "kappa complement");
    }
    {
        const auto [seg, gt] = fixtures::connectivity_pair();
        near(cal_metric(seg, gt).connectivity, 0.95, "C");
    }
    {
        const auto gt = fixtures::line(260, 100);
        near(lcc_ratio(fixtures::line(260, 80), gt), 0.8, "lcc 80/100");
        near(lcc_ratio(fixtures::line(260, 250), gt), 0.0, "lcc 250/100");
    }
    near(tops(fixtures::rings(2), fixtures::rings(4)), 0.5, "TopS 2/4");
    near(tops(fixtures::rings(9), fixtures::rings(4)), 0.0, "TopS 9/4");
    near(acircularity(28.0, 49.0), 2.0 / std::sqrt(std::numbers::pi), "acircularity of a square");
    return {bad == 0 ? Outcome::Pass : Outcome::Fail, std::to_string(10 - bad) + "/10 within 1e-9"};
}

// Holes = bounded 4-connected background components, found by flood fill.
int bounded_background(const BinaryMask& m) {
    std::vector<int> lab;
    const int n = testing::flood_count(m, false, 4, &lab);
    std::vector<bool> touches(static_cast<std::size_t>(n) + 1, false);
    const int w = m.width(), h = m.height();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (r == 0 || c == 0 || r == h - 1 || c == w - 1) touches[static_cast<std::size_t>(lab[static_cast<std::size_t>(r) * w + c])] = true;
        }
    }
    int holes = 0;
    for (int l = 1; l <= n; ++l) holes += touches[static_cast<std::size_t>(l)] ? 0 : 1;
    return holes;
}

Outcome betti_dual() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dens(0.1, 0.9);
    int bad_holes = 0, bad_skel = 0;
    const int masks = 1000, blobs = 500;
    for (int i = 0; i < masks; ++i) {
        const BinaryMask m = testing::random_mask(32, 32, dens(rng), rng);
        const int b0 = testing::flood_count(m, true, 8);
        const long euler_b1 = b0 - testing::euler_closed_squares(m);
        const int holes = bounded_background(m);
        const BettiPair lib = betti_numbers(m);
        if (holes != euler_b1 || lib.b0 != b0 || lib.b1 != holes) ++bad_holes;
    }
    for (int i = 0; i < blobs; ++i) {
        const BinaryMask m = testing::random_blobs(48, 48, rng);
        const BinaryMask sk = skeletonize(m);
        const bool same = testing::flood_count(sk, true, 8) == testing::flood_count(m, true, 8) &&
                          bounded_background(sk) == bounded_background(m);
        if (!same) ++bad_skel;
    }
    const double s = seconds_since(t0);
    const std::string detail = std::to_string(masks - bad_holes) + "/" + std::to_string(masks) + " masks, " +
                               std::to_string(blobs - bad_skel) + "/" + std::to_string(blobs) + " skeletons, " +
                               fmt("%.2f s", s);
    return {bad_holes == 0 && bad_skel == 0 && s < kBettiSeconds ? Outcome::Pass : Outcome::Fail, detail};
}

Outcome filter_sanity() {
    int bad = 0;
    auto fail = [&](const std::string& what) {
        ++bad;
        std::printf("  filters: %s\n", what.c_str());
    };
    const std::vector<std::pair<const char*, std::function<GrayImage(const GrayImage&)>>> filters = {
        {"frangi", [](const GrayImage& g) { return frangi(g); }},
        {"gabor", [](const GrayImage& g) { return gabor(g); }},
        {"scird_ts", [](const GrayImage& g) { return scird_ts(g); }},
        {"oof", [](const GrayImage& g) { return oof(g); }},
    };

    for (double v : {0.0, 0.5, 1.0}) {
        const GrayImage flat(33, 29, v);
        for (const auto& [name, f] : filters) {
            const GrayImage out = f(flat);
            for (double x : out.data()) {
                if (x != 0.0) {
                    fail(std::string(name) + " non-zero on a constant image");
                    break;
                }
            }
        }
    }

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> d(41 * 34);
    for (auto& x : d) x = u(rng);
    const GrayImage img(41, 34, d);
    for (int k : {0, 3}) {
        const auto& [name, f] = filters[static_cast<std::size_t>(k)];
        const GrayImage out = f(img);
        GrayImage r = img, ro = out;
        for (int turn = 1; turn <= 3; ++turn) {
            r = rotate90(r);
            ro = rotate90(ro);
            if (!(f(r) == ro)) fail(std::string(name) + " rotation " + std::to_string(90 * turn));
        }
        if (!(f(flip_horizontal(img)) == flip_horizontal(out))) fail(std::string(name) + " horizontal flip");
        if (!(f(flip_vertical(img)) == flip_vertical(out))) fail(std::string(name) + " vertical flip");
    }

    // Gaussian ridge of sigma 1.5 down the middle column
    RenderStyle st;
    st.profile = Profile::Gaussian;
    const Phantom ridge = tube_phantom(33, 1.5, st);
    for (const auto& [name, f] : filters) {
        const GrayImage out = f(ridge.image);
        for (int r = 0; r < 33; ++r) {
            int best = 0;
            for (int c = 1; c < 33; ++c) {
                if (out.at(r, c) > out.at(r, best)) best = c;
            }
            if (best != 16) {
                fail(std::string(name) + " ridge argmax off centre at row " + std::to_string(r));
                break;
            }
        }
    }
    return {bad == 0 ? Outcome::Pass : Outcome::Fail, bad == 0 ? "zero, equivariance, argmax" : std::to_string(bad) + " problems"};
}

Outcome phantom_pipeline() {
    const Segmenter seg(PipelineConfig{});  // oof + two_step + cleanup
    double worst_dice = 1.0, worst_lcc = 1.0, worst_s = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Phantom p = make_phantom(PhantomKind::Tree, 304, seed);
        const auto t0 = Clock::now();
        const BinaryMask m = seg.segment(p.image);
        const EvalReport r = evaluate(m, p.mask);
        const double s = seconds_since(t0);
        std::printf("  phantom tree %llu: dice %.4f lcc %.4f (%.2f s)\n", static_cast<unsigned long long>(seed), r.dice,
                    r.lcc.value_or(-1.0), s);
        worst_dice = std::min(worst_dice, r.dice);
        worst_lcc = std::min(worst_lcc, r.lcc.value_or(0.0));
        worst_s = std::max(worst_s, s);
    }
    const bool ok = worst_dice >= kPhantomDice && worst_lcc >= kPhantomLcc && worst_s < kPipelineSecondsPerImage;
    char buf[160];
    std::snprintf(buf, sizeof buf, "min dice %.4f, min lcc %.4f, max %.2f s/image", worst_dice, worst_lcc, worst_s);
    return {ok ? Outcome::Pass : Outcome::Fail, buf};
}

Outcome sensitivity() {
    const auto sc = fixtures::sensitivity_case();
    std::size_t diff = 0;
    for (std::size_t i = 0; i < sc.gt.size(); ++i) diff += sc.gt[i] != sc.seg[i];
    const EvalReport base = evaluate(sc.gt, sc.gt);
    const EvalReport edit = evaluate(sc.seg, sc.gt);
    const double dd = base.dice - edit.dice;
    const double dl = *base.lcc - *edit.lcc;
    const double dt = *base.tops - *edit.tops;
    const bool ok = diff <= 3 && dd < 0.01 && dl > 0.5 && dt >= 0.25;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu px edited: d(dice) %.4f, d(lcc) %.4f, d(tops) %.4f", diff, dd, dl, dt);
    return {ok ? Outcome::Pass : Outcome::Fail, buf};
}

// Expects $OCTASEG_DATASET/images and $OCTASEG_DATASET/gt with matching file names.
Outcome dataset_reproduction() {
    const char* root = std::getenv("OCTASEG_DATASET");
    if (!root || !fs::is_directory(fs::path(root) / "images") || !fs::is_directory(fs::path(root) / "gt")) {
        return {Outcome::Skip, "set OCTASEG_DATASET to a directory with images/ and gt/"};
    }
    std::vector<FilePair> pairs;
    for (auto& p : match_files(fs::path(root) / "images", fs::path(root) / "gt")) {
        if (p.a && p.b) pairs.push_back(p);
    }
    if (pairs.empty()) return {Outcome::Fail, "no matching image/gt pairs"};

    auto run = [&](const PipelineConfig& cfg) {
        const Segmenter seg(cfg);
        std::vector<ReportRow> rows(pairs.size());
        const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        parallel_for(pairs.size(), jobs, [&](std::size_t i) {
            rows[i].file = pairs[i].name;
            rows[i].report = evaluate(seg.segment(load_gray(*pairs[i].a)), load_mask(*pairs[i].b));
        });
        return aggregate_rows(rows);
    };
    PipelineConfig at;
    at.enhancement = Enhancement::None;
    at.binarisation = Binarisation::Adaptive;
    const Aggregate o = run(PipelineConfig{});
    const Aggregate a = run(at);

    struct Target {
        const char* label;
        std::optional<double> got;
        double want;
    };
    const Target targets[] = {{"OOF dice", o.at("dice").mean, 0.86},
                              {"OOF lcc", o.at("lcc").mean, 0.94},
                              {"OOF tops", o.at("tops").mean, 0.80},
                              {"AT dice", a.at("dice").mean, 0.86}};
    bool ok = true;
    std::string detail = std::to_string(pairs.size()) + " images:";
    for (const auto& t : targets) {
        const bool hit = t.got && std::abs(*t.got - t.want) <= kDatasetTol;
        ok = ok && hit;
        detail += " " + std::string(t.label) + " " + (t.got ? fmt("%.3f", *t.got) : "n/a") + fmt(" (%.2f)", t.want);
    }
    return {ok ? Outcome::Pass : Outcome::Fail, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"identity suite", identity_suite},
        {"hand oracles", hand_oracles},
        {"betti dual oracle", betti_dual},
        {"filter sanity", filter_sanity},
        {"phantom segmentation", phantom_pipeline},
        {"sensitivity", sensitivity},
        {"dataset reproduction", dataset_reproduction},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Skip ? "SKIP" : "FAIL";
        if (o.kind == Outcome::Fail) ++failed;
        std::printf("%s %d %s: %s\n", tag, n, name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
