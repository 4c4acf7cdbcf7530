#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "detail/raster_util.hpp"
#include "octaseg/enhance.hpp"

namespace octaseg {

void ScirdParams::validate() const {
    auto range_ok = [](const std::array<double, 2>& r, double step) { return r[0] <= r[1] && step > 0.0; };
    if (!range_ok(sigma_1, sigma_1_step) || !(sigma_1[0] > 0.0)) throw ParamError("invalid fb_parameters.sigma_1");
    if (!range_ok(sigma_2, sigma_2_step) || !(sigma_2[0] > 0.0)) throw ParamError("invalid fb_parameters.sigma_2");
    if (!range_ok(k, k_step)) throw ParamError("invalid fb_parameters.k");
    if (!(angle_step > 0.0 && angle_step <= 180.0)) throw ParamError("invalid fb_parameters.angle_step");
    if (filter_size < 3 || filter_size % 2 == 0) throw ParamError("fb_parameters.filter_size must be odd and >= 3");
    if (!(alpha > 0.0)) throw ParamError("alpha must be positive");
}

/*
 * Each member models a locally curved bright ridge. In the rotated frame
 * (u along the ridge, v across it) the support follows the parabola
 * v = -k u^2; with w = v + k u^2,
 *
 *   G(u, w) = exp(-u^2 / (2 s1^2)) exp(-w^2 / (2 s2^2))
 *   F       = -d^2 G / dw^2 = (1 / s2^2 - w^2 / s2^4) G
 *
 * F is made zero-mean over the window and scaled to unit L2 norm.
 * Angles cover [0, 180) since a half turn is the same as negating k.
 */
std::vector<ScirdKernel> scird_bank(const ScirdParams& p) {
    p.validate();
    const int half = p.filter_size / 2;
    const int side = p.filter_size;
    std::vector<ScirdKernel> bank;
    for (double s1 : detail::inclusive_range(p.sigma_1[0], p.sigma_1[1], p.sigma_1_step)) {
        for (double s2 : detail::inclusive_range(p.sigma_2[0], p.sigma_2[1], p.sigma_2_step)) {
            for (double kc : detail::inclusive_range(p.k[0], p.k[1], p.k_step)) {
                for (double deg = 0.0; deg < 180.0 - 1e-9; deg += p.angle_step) {
                    const double t = deg * std::numbers::pi / 180.0;
                    const double ct = std::cos(t), st = std::sin(t);
                    ScirdKernel k{s1, s2, kc, deg, side, {}, {}};
                    k.weights.resize(static_cast<std::size_t>(side) * side);
                    for (int dy = -half; dy <= half; ++dy) {
                        for (int dx = -half; dx <= half; ++dx) {
                            const double u = dx * ct + dy * st;
                            const double v = -dx * st + dy * ct;
                            const double w = v + kc * u * u;
                            const double g = std::exp(-u * u / (2 * s1 * s1) - w * w / (2 * s2 * s2));
                            k.weights[static_cast<std::size_t>(dy + half) * side + (dx + half)] =
                                (1.0 / (s2 * s2) - w * w / (s2 * s2 * s2 * s2)) * g;
                        }
                    }
                    double mean = 0.0;
                    for (double v : k.weights) mean += v;
                    mean /= static_cast<double>(k.weights.size());
                    double l2 = 0.0;
                    for (double& v : k.weights) {
                        v -= mean;
                        l2 += v * v;
                    }
                    l2 = std::sqrt(l2);
                    k.abs_weights.resize(k.weights.size());
                    for (std::size_t i = 0; i < k.weights.size(); ++i) {
                        k.weights[i] /= l2;
                        k.abs_weights[i] = std::abs(k.weights[i]);
                    }
                    bank.push_back(std::move(k));
                }
            }
        }
    }
    return bank;
}

namespace {

struct Padded {
    int width;
    int pad;
    std::vector<double> data;
};

Padded mirror_pad(const GrayImage& img, int pad) {
    const int W = img.width(), H = img.height();
    const auto rows = detail::reflected_indices(H, pad);
    const auto cols = detail::reflected_indices(W, pad);
    Padded p{W + 2 * pad, pad, {}};
    p.data.resize(static_cast<std::size_t>(H + 2 * pad) * p.width);
    for (int r = 0; r < H + 2 * pad; ++r) {
        for (int c = 0; c < p.width; ++c) p.data[static_cast<std::size_t>(r) * p.width + c] = img.at(rows[r], cols[c]);
    }
    return p;
}

void member_response(const Padded& src, int W, int H, const ScirdKernel& k, double alpha, std::vector<double>& num,
                     std::vector<double>& den, std::vector<double>& out) {
    const int half = k.size / 2;
    std::fill(num.begin(), num.end(), 0.0);
    std::fill(den.begin(), den.end(), 0.0);
    for (int r = 0; r < H; ++r) {
        double* nrow = num.data() + static_cast<std::size_t>(r) * W;
        double* drow = den.data() + static_cast<std::size_t>(r) * W;
        const double* centre = src.data.data() + static_cast<std::size_t>(r + src.pad) * src.width + src.pad;
        for (int dy = -half; dy <= half; ++dy) {
            const double* srow = src.data.data() + static_cast<std::size_t>(r + src.pad + dy) * src.width + src.pad;
            for (int dx = -half; dx <= half; ++dx) {
                const auto ki = static_cast<std::size_t>(dy + half) * k.size + (dx + half);
                const double w = k.weights[ki];
                const double aw = k.abs_weights[ki];
                const double* s = srow + dx;
                for (int c = 0; c < W; ++c) {
                    nrow[c] += w * (s[c] - centre[c]);
                    drow[c] += aw * s[c];
                }
            }
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = num[i] / (alpha + den[i]);
}

}  // namespace

RealField scird_member_response(const GrayImage& img, const ScirdKernel& kernel, double alpha) {
    const int W = img.width(), H = img.height();
    const Padded src = mirror_pad(img, kernel.size / 2);
    std::vector<double> num(static_cast<std::size_t>(W) * H), den(num.size());
    RealField out(W, H);
    member_response(src, W, H, kernel, alpha, num, den, out.data);
    return out;
}

GrayImage scird_ts(const GrayImage& img, const ScirdParams& params) {
    const auto bank = scird_bank(params);
    const int W = img.width(), H = img.height();
    const Padded src = mirror_pad(img, params.filter_size / 2);
    std::vector<double> num(static_cast<std::size_t>(W) * H), den(num.size()), resp(num.size());
    RealField best(W, H, -std::numeric_limits<double>::infinity());
    for (const auto& k : bank) {
        member_response(src, W, H, k, params.alpha, num, den, resp);
        for (std::size_t i = 0; i < resp.size(); ++i) best.data[i] = std::max(best.data[i], resp[i]);
    }
    return rescale_to_unit(best);
}

}  // namespace octaseg
