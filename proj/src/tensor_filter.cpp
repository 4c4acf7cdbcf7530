#include <algorithm>
#include <cmath>
#include <numbers>

#include "detail/raster_util.hpp"
#include "octaseg/enhance.hpp"

namespace octaseg {

TensorField::TensorField(int w, int h) : width(w), height(h) {
    const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    xx.assign(n, 0.0);
    xy.assign(n, 0.0);
    yy.assign(n, 0.0);
}

namespace {

// Sum in ascending order so the result does not depend on which symmetric
// position each value came from.
double sorted_sum(double* v, int n) {
    std::sort(v, v + n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[i];
    return s;
}

}  // namespace

// Offsets are grouped into orbits {(+-a, +-b)} of the reflection group. Every
// orbit contributes through sums that are invariant (or exactly negated) under
// the flips and transposition that permute it, so rotating the input by a
// multiple of 90 degrees permutes the output bit for bit.
TensorField apply_tensor_kernel(const RealField& img, const TensorKernel& kernel) {
    const int R = kernel.radius;
    const int W = img.width;
    const int H = img.height;
    const auto rows = detail::reflected_indices(H, R);
    const auto cols = detail::reflected_indices(W, R);
    TensorField out(W, H);

    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double f0 = img.data[static_cast<std::size_t>(r) * W + c];
            auto g = [&](int dx, int dy) {
                return img.data[static_cast<std::size_t>(rows[r + dy + R]) * W + cols[c + dx + R]];
            };
            // Differences against the centre make constant inputs map to exact zeros.
            auto orbit = [&](int a, int b) {
                double v[4];
                int n = 0;
                if (b == 0) {
                    v[n++] = g(a, 0) - f0;
                    v[n++] = g(-a, 0) - f0;
                } else if (a == 0) {
                    v[n++] = g(0, b) - f0;
                    v[n++] = g(0, -b) - f0;
                } else {
                    v[n++] = g(a, b) - f0;
                    v[n++] = g(-a, b) - f0;
                    v[n++] = g(a, -b) - f0;
                    v[n++] = g(-a, -b) - f0;
                }
                return sorted_sum(v, n);
            };
            auto cross = [&](int a, int b) { return (g(a, b) + g(-a, -b)) - (g(a, -b) + g(-a, b)); };

            double sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int a = 1; a <= R; ++a) {
                for (int b = 0; b <= a; ++b) {
                    const double s_ab = orbit(a, b);
                    if (a != b) {
                        const double s_ba = orbit(b, a);
                        sxx += kernel.kxx(a, b) * s_ab + kernel.kxx(b, a) * s_ba;
                        syy += kernel.kxx(b, a) * s_ab + kernel.kxx(a, b) * s_ba;
                    } else {
                        const double t = kernel.kxx(a, a) * s_ab;
                        sxx += t;
                        syy += t;
                    }
                    if (b >= 1) {
                        if (a != b) {
                            sxy += kernel.kxy(a, b) * (cross(a, b) + cross(b, a));
                        } else {
                            sxy += kernel.kxy(a, a) * cross(a, a);
                        }
                    }
                }
            }
            const auto i = static_cast<std::size_t>(r) * W + c;
            out.xx[i] = sxx;
            out.xy[i] = sxy;
            out.yy[i] = syy;
        }
    }
    return out;
}

TensorKernel gaussian_hessian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw ParamError("Gaussian scale must be positive");
    const int R = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> g(R + 1), w1(R + 1), w2(R + 1);
    for (int k = 0; k <= R; ++k) {
        g[k] = std::exp(-0.5 * k * k / (sigma * sigma));
        w1[k] = k * g[k];
        w2[k] = (k * k - sigma * sigma) * g[k];
    }
    // Normalize the sampled kernels to the moments of their continuous
    // counterparts: sum g = 1, sum k w1 = 1, sum w2 = 0, sum k^2 w2 = 2.
    // With these, quadratics are differentiated exactly.
    auto full_sum = [&](const std::vector<double>& v, auto weight) {
        double s = weight(0) * v[0];
        for (int k = 1; k <= R; ++k) s += 2.0 * weight(k) * v[k];
        return s;
    };
    const double g_sum = full_sum(g, [](int) { return 1.0; });
    for (auto& v : g) v /= g_sum;
    const double w1_moment = 2.0 * [&] {
        double s = 0.0;
        for (int k = 1; k <= R; ++k) s += k * w1[k];
        return s;
    }();
    for (auto& v : w1) v /= w1_moment;
    const double w2_sum = full_sum(w2, [](int) { return 1.0; });
    for (int k = 0; k <= R; ++k) w2[k] -= w2_sum * g[k];
    const double w2_moment = full_sum(w2, [](int k) { return double(k) * k; });
    for (auto& v : w2) v *= 2.0 / w2_moment;

    TensorKernel kernel;
    kernel.radius = R;
    kernel.xx.resize(static_cast<std::size_t>(R + 1) * (R + 1));
    kernel.xy.resize(kernel.xx.size());
    const double s2 = sigma * sigma;
    for (int a = 0; a <= R; ++a) {
        for (int b = 0; b <= R; ++b) {
            const auto i = static_cast<std::size_t>(a) * (R + 1) + b;
            kernel.xx[i] = s2 * (w2[a] * g[b]);
            kernel.xy[i] = s2 * (w1[a] * w1[b]);
        }
    }
    return kernel;
}

HessianField gaussian_hessian(const RealField& img, double sigma) {
    HessianField h;
    static_cast<TensorField&>(h) = apply_tensor_kernel(img, gaussian_hessian_kernel(sigma));
    h.sigma = sigma;
    return h;
}

HessianField gaussian_hessian(const GrayImage& img, double sigma) { return gaussian_hessian(to_field(img), sigma); }

Eigen2 eigen_by_value(double xx, double xy, double yy) {
    const double mean = (xx + yy) / 2.0;
    const double half_diff = (xx - yy) / 2.0;
    const double root = std::sqrt(half_diff * half_diff + xy * xy);
    return {mean - root, mean + root};
}

Eigen2 eigen_by_magnitude(double xx, double xy, double yy) {
    const Eigen2 e = eigen_by_value(xx, xy, yy);
    if (std::abs(e.first) <= std::abs(e.second)) return e;
    return {e.second, e.first};
}

TensorKernel oriented_flux_kernel(double radius, double sigma) {
    if (!(radius > 0.0) || !(sigma > 0.0)) throw ParamError("oriented flux needs positive radius and sigma");
    const int R = static_cast<int>(std::ceil(radius + 3.0 * sigma));
    constexpr int kSamples = 720;
    const double two_pi = 2.0 * std::numbers::pi;
    const double s2 = sigma * sigma;
    const double norm = 1.0 / (two_pi * s2);

    // K_ij(d) = r * integral over the circle of d_i G(r n - d) n_j, with G the
    // smoothing Gaussian; this is the flux of the smoothed gradient through
    // the circle, projected on axis j.
    auto integrate = [&](int dx, int dy, bool project_on_y) {
        double s = 0.0;
        for (int m = 0; m < kSamples; ++m) {
            const double t = two_pi * m / kSamples;
            const double nx = std::cos(t), ny = std::sin(t);
            const double px = radius * nx - dx;
            const double py = radius * ny - dy;
            const double gauss = norm * std::exp(-(px * px + py * py) / (2.0 * s2));
            const double dgx = -px / s2 * gauss;
            s += dgx * (project_on_y ? ny : nx);
        }
        return radius * s * (two_pi / kSamples);
    };

    TensorKernel kernel;
    kernel.radius = R;
    kernel.xx.resize(static_cast<std::size_t>(R + 1) * (R + 1));
    kernel.xy.resize(kernel.xx.size());
    for (int a = 0; a <= R; ++a) {
        for (int b = 0; b <= R; ++b) {
            kernel.xx[static_cast<std::size_t>(a) * (R + 1) + b] = integrate(a, b, false);
        }
    }
    for (int a = 0; a <= R; ++a) {
        for (int b = 0; b <= a; ++b) {
            const double v = 0.5 * (integrate(a, b, true) + integrate(b, a, true));
            kernel.xy[static_cast<std::size_t>(a) * (R + 1) + b] = v;
            kernel.xy[static_cast<std::size_t>(b) * (R + 1) + a] = v;
        }
    }
    return kernel;
}

}  // namespace octaseg
