#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "octaseg/enhance.hpp"
#include "octaseg/phantom.hpp"
#include "support.hpp"

using namespace octaseg;

namespace {

GrayImage random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (auto& x : v) x = u(rng);
    return {w, h, std::move(v)};
}

bool all_zero(const GrayImage& img) {
    return std::all_of(img.data().begin(), img.data().end(), [](double v) { return v == 0.0; });
}

bool in_unit(const GrayImage& img) {
    return std::all_of(img.data().begin(), img.data().end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

// Gaussian cross-section ridge along the centre column
Phantom ridge(int size, double sigma) {
    RenderStyle st;
    st.background = 0.1;
    st.contrast = 0.8;
    st.profile = Profile::Gaussian;
    return tube_phantom(size, sigma, st);
}

int row_argmax(const GrayImage& img, int row) {
    int best = 0;
    for (int c = 1; c < img.width(); ++c) {
        if (img.at(row, c) > img.at(row, best)) best = c;
    }
    return best;
}

ScirdParams small_scird() {
    ScirdParams p;
    p.sigma_1 = {1.0, 3.0};
    p.sigma_1_step = 1.0;
    p.sigma_2 = {1.0, 2.0};
    p.sigma_2_step = 0.5;
    p.angle_step = 30.0;
    return p;
}

}  // namespace

TEST_CASE("hessian of a quadratic ramp") {
    const int W = 40, H = 30;
    const double a = 1.0 / (40.0 * 40.0);
    RealField img(W, H);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) img.at(r, c) = a * c * c;
    }
    for (double sigma : {1.0, 1.5, 2.0}) {
        const HessianField h = gaussian_hessian(img, sigma);
        const int rad = static_cast<int>(std::ceil(3 * sigma)) + 1;
        for (int r = rad; r < H - rad; ++r) {
            for (int c = rad; c < W - rad; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * W + c;
                CHECK(h.xx[i] == doctest::Approx(2.0 * a * sigma * sigma).epsilon(1e-6));
                CHECK(std::abs(h.yy[i]) < 1e-9);
                CHECK(std::abs(h.xy[i]) < 1e-9);
            }
        }
    }
    CHECK_THROWS_AS(gaussian_hessian(GrayImage(5, 5), 0.0), ParamError);
}

TEST_CASE("hessian transposes with the image") {
    const GrayImage img = random_image(23, 17, 2);
    const HessianField h = gaussian_hessian(img, 1.2);
    const HessianField t = gaussian_hessian(transpose(img), 1.2);
    for (int r = 0; r < 17; ++r) {
        for (int c = 0; c < 23; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * 23 + c;
            const std::size_t j = static_cast<std::size_t>(c) * 17 + r;
            CHECK(t.yy[j] == h.xx[i]);
            CHECK(t.xx[j] == h.yy[i]);
            CHECK(t.xy[j] == h.xy[i]);
        }
    }
}

TEST_CASE("constant images give identically zero output") {
    for (double v : {0.0, 0.37, 1.0}) {
        const GrayImage flat(24, 20, v);
        CHECK(all_zero(frangi(flat)));
        CHECK(all_zero(oof(flat)));
        CHECK(all_zero(gabor(flat)));
        CHECK(all_zero(scird_ts(flat, small_scird())));
    }
}

TEST_CASE("Frangi and OOF are exactly equivariant under rotations and flips") {
    const GrayImage img = random_image(31, 26, 7);
    const GrayImage f = frangi(img);
    const GrayImage o = oof(img);
    CHECK(frangi(rotate90(img)) == rotate90(f));
    CHECK(frangi(rotate90(rotate90(img))) == rotate90(rotate90(f)));
    CHECK(frangi(flip_horizontal(img)) == flip_horizontal(f));
    CHECK(frangi(flip_vertical(img)) == flip_vertical(f));
    CHECK(frangi(transpose(img)) == transpose(f));
    CHECK(oof(rotate90(img)) == rotate90(o));
    CHECK(oof(rotate90(rotate90(rotate90(img)))) == rotate90(rotate90(rotate90(o))));
    CHECK(oof(flip_horizontal(img)) == flip_horizontal(o));
    CHECK(oof(flip_vertical(img)) == flip_vertical(o));
    CHECK(oof(transpose(img)) == transpose(o));
}

TEST_CASE("Gabor and SCIRD-TS are equivariant to rounding") {
    const GrayImage img = random_image(28, 28, 9);
    auto close = [](const GrayImage& a, const GrayImage& b) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
        return worst;
    };
    GaborParams gp;
    CHECK(close(gabor(rotate90(img), gp), rotate90(gabor(img, gp))) < 1e-9);
    CHECK(close(gabor(flip_horizontal(img), gp), flip_horizontal(gabor(img, gp))) < 1e-9);
    ScirdParams sp = small_scird();
    CHECK(close(scird_ts(rotate90(img), sp), rotate90(scird_ts(img, sp))) < 1e-9);
}

TEST_CASE("outputs are in the unit range with source dimensions") {
    const GrayImage img = random_image(19, 23, 3);
    for (const GrayImage& out : {frangi(img), oof(img), gabor(img), scird_ts(img, small_scird())}) {
        CHECK(out.width() == 19);
        CHECK(out.height() == 23);
        CHECK(in_unit(out));
    }
}

TEST_CASE("Frangi ignores a constant offset") {
    const GrayImage img = random_image(20, 20, 5);
    std::vector<double> shifted(img.data().begin(), img.data().end());
    for (auto& v : shifted) v = v * 0.5 + 0.25;
    std::vector<double> halved(img.data().begin(), img.data().end());
    for (auto& v : halved) v = v * 0.5;
    const GrayImage a(20, 20, shifted), b(20, 20, halved);
    const GrayImage fa = frangi(a), fb = frangi(b);
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa.data()[i] == doctest::Approx(fb.data()[i]).epsilon(1e-9));
}

TEST_CASE("ridge centerline is the per-row argmax for every filter") {
    const Phantom p = ridge(33, 1.5);
    const int mid = 33 / 2;
    const GrayImage outs[] = {frangi(p.image), gabor(p.image), oof(p.image), scird_ts(p.image, small_scird())};
    const char* names[] = {"frangi", "gabor", "oof", "scird"};
    for (int k = 0; k < 4; ++k) {
        CAPTURE(names[k]);
        for (int r = 0; r < 33; ++r) CHECK(row_argmax(outs[k], r) == mid);
    }
}

TEST_CASE("OOF prefers the radius nearest the tube radius") {
    RenderStyle st;
    st.background = 0.1;
    st.contrast = 0.8;
    const Phantom p = tube_phantom(33, 1.5, st);
    const OofParams params;
    double best = -1.0, best_r = 0.0;
    for (double r : params.radii()) {
        const double v = oof_radius_response(p.image, r, params.sigma).at(16, 16);
        if (v > best) {
            best = v;
            best_r = r;
        }
    }
    CHECK(best_r == 1.5);
}

TEST_CASE("Gabor favours a grating aligned with the bank") {
    const int n = 48;
    const double wavelength = 2.0 * std::numbers::pi * 2.0 / 3.0;  // scale 2, |k0| = 3
    auto grating = [&](double angle) {
        std::vector<double> v(static_cast<std::size_t>(n) * n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const double s = c * std::cos(angle) + r * std::sin(angle);
                v[static_cast<std::size_t>(r) * n + c] = 0.5 + 0.4 * std::cos(2.0 * std::numbers::pi * s / wavelength);
            }
        }
        return GrayImage(n, n, std::move(v));
    };
    const RealField aligned = gabor_raw(grating(0.0));
    const RealField skew = gabor_raw(grating(std::numbers::pi / 4.0));
    double max_aligned = 0.0;
    for (double v : aligned.data) max_aligned = std::max(max_aligned, v);
    for (int r = 12; r < n - 12; ++r) {
        for (int c = 12; c < n - 12; ++c) CHECK(max_aligned > skew.at(r, c));
    }
}

TEST_CASE("Gabor raw response is linear in contrast") {
    const GrayImage img = random_image(24, 24, 4);
    std::vector<double> half(img.data().begin(), img.data().end());
    for (auto& v : half) v *= 0.5;
    const RealField a = gabor_raw(img), b = gabor_raw(GrayImage(24, 24, half));
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == doctest::Approx(2.0 * b.data[i]).epsilon(1e-9));
}

TEST_CASE("SCIRD bank matches the table defaults") {
    const auto bank = scird_bank(ScirdParams{});
    CHECK(bank.size() == 9u * 3u * 9u * 18u);
    for (const auto& k : {bank.front(), bank[1234], bank.back()}) {
        double sum = 0.0, sq = 0.0;
        for (double w : k.weights) {
            sum += w;
            sq += w * w;
        }
        CHECK(std::abs(sum) < 1e-12);
        CHECK(sq == doctest::Approx(1.0));
        CHECK(k.size == 9);
    }
    ScirdParams even;
    even.filter_size = 8;
    CHECK_THROWS_AS(scird_bank(even), ParamError);
}

TEST_CASE("SCIRD curvature selection") {
    ScirdParams p;
    p.angle_step = 10.0;
    const auto bank = scird_bank(p);

    auto best_member = [&](const GrayImage& img, int r, int c) {
        const ScirdKernel* best = nullptr;
        double best_v = -1e300;
        for (const auto& k : bank) {
            const double v = scird_member_response(img, k, p.alpha).at(r, c);
            if (v > best_v) {
                best_v = v;
                best = &k;
            }
        }
        return std::pair{best, best_v};
    };

    const Phantom straight = ridge(21, 1.5);
    CHECK(best_member(straight.image, 10, 10).first->curvature == 0.0);

    // parabolic ridge col = 10 + 0.1 (row - 10)^2, apex at the centre
    std::vector<Capsule> caps;
    for (int r = -2; r < 23; ++r) {
        auto col = [](double y) { return 10.0 + 0.1 * (y - 10.0) * (y - 10.0); };
        caps.push_back({double(r), col(r), r + 1.0, col(r + 1.0), 1.5});
    }
    RenderStyle st;
    st.profile = Profile::Gaussian;
    const Phantom bent = render_capsules(21, 21, caps, st);
    double best_flat = -1e300, best_curved = -1e300;
    for (const auto& k : bank) {
        const double v = scird_member_response(bent.image, k, p.alpha).at(10, 10);
        if (k.curvature == 0.0) best_flat = std::max(best_flat, v);
        else best_curved = std::max(best_curved, v);
    }
    CHECK(best_curved > best_flat);
}

TEST_CASE("parameter validation") {
    FrangiParams f;
    f.scale_range = {2.0, 1.0};
    CHECK_THROWS_AS(f.validate(), ParamError);
    GaborParams g;
    g.scales.clear();
    CHECK_THROWS_AS(g.validate(), ParamError);
    g = {};
    g.n_orientations = 0;
    CHECK_THROWS_AS(g.validate(), ParamError);
    OofParams o;
    o.sigma = 0.0;
    CHECK_THROWS_AS(o.validate(), ParamError);
    o = {};
    o.radius_range = {2.0, 0.5};
    CHECK_THROWS_AS(o.validate(), ParamError);
    CHECK(OofParams{}.radii() == std::vector<double>{0.5, 1.0, 1.5, 2.0});
    CHECK(FrangiParams{}.scales() == std::vector<double>{0.5, 1.0, 1.5, 2.0});
}
