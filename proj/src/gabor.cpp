#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include "detail/raster_util.hpp"
#include "octaseg/enhance.hpp"

namespace octaseg {

void GaborParams::validate() const {
    if (scales.empty()) throw ParamError("Gabor scales must be non-empty");
    for (double s : scales) {
        if (!(s > 0.0)) throw ParamError("Gabor scales must be positive");
    }
    if (!(epsilon > 0.0)) throw ParamError("Gabor epsilon must be positive");
    if (n_orientations < 1) throw ParamError("Gabor needs at least one orientation");
}

namespace {

using Complex = std::complex<double>;

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer make_buffer(std::size_t n) {
    return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct Plan {
    fftw_plan handle{};
    Plan(int h, int w, fftw_complex* in, fftw_complex* out, int sign) {
        std::lock_guard lock(planner_mutex());
        handle = fftw_plan_dft_2d(h, w, in, out, sign, FFTW_ESTIMATE);
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(handle);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
};

int fft_friendly(int n) {
    for (;; ++n) {
        int m = n;
        for (int p : {2, 3, 5}) {
            while (m % p == 0) m /= p;
        }
        if (m == 1) return n;
    }
}

struct GaborKernel {
    int radius;
    std::vector<Complex> taps;  // (2r+1)^2, row-major over (dy, dx)
};

/*
 * Sampled 2D Gabor (Morlet) wavelet at scale a and orientation theta:
 *
 *   u = ( dx cos t + dy sin t) / a      (along the vessel)
 *   v = (-dx sin t + dy cos t) / a      (across the vessel)
 *   psi = exp(i (k0x u + k0y v)) exp(-(u^2 / epsilon + v^2) / 2)
 *
 * The DC term is removed by subtracting a multiple of the envelope so the
 * taps sum to zero, and the whole kernel is divided by the envelope sum so
 * that responses are comparable across scales.
 */
GaborKernel make_gabor(double scale, double theta, const GaborParams& p) {
    const int R = static_cast<int>(std::ceil(3.0 * scale * std::max(1.0, std::sqrt(p.epsilon))));
    const int side = 2 * R + 1;
    std::vector<double> env(static_cast<std::size_t>(side) * side);
    std::vector<Complex> taps(env.size());
    const double ct = std::cos(theta), st = std::sin(theta);
    double env_sum = 0.0;
    Complex raw_sum{};
    for (int dy = -R; dy <= R; ++dy) {
        for (int dx = -R; dx <= R; ++dx) {
            const double u = (dx * ct + dy * st) / scale;
            const double v = (-dx * st + dy * ct) / scale;
            const double e = std::exp(-0.5 * (u * u / p.epsilon + v * v));
            const double phase = p.k0[0] * u + p.k0[1] * v;
            const auto i = static_cast<std::size_t>(dy + R) * side + (dx + R);
            env[i] = e;
            taps[i] = e * Complex(std::cos(phase), std::sin(phase));
            env_sum += e;
            raw_sum += taps[i];
        }
    }
    const Complex dc = raw_sum / env_sum;
    for (std::size_t i = 0; i < taps.size(); ++i) taps[i] = (taps[i] - dc * env[i]) / env_sum;
    return {R, std::move(taps)};
}

}  // namespace

RealField gabor_raw(const GrayImage& img, const GaborParams& params) {
    params.validate();
    std::vector<GaborKernel> bank;
    for (double a : params.scales) {
        for (int o = 0; o < params.n_orientations; ++o) {
            bank.push_back(make_gabor(a, std::numbers::pi * o / params.n_orientations, params));
        }
    }
    int R = 0;
    for (const auto& k : bank) R = std::max(R, k.radius);

    const int W = img.width(), H = img.height();
    const int fh = fft_friendly(H + 2 * R);
    const int fw = fft_friendly(W + 2 * R);
    const auto n = static_cast<std::size_t>(fh) * fw;

    auto image_buf = make_buffer(n);
    auto image_hat = make_buffer(n);
    auto work = make_buffer(n);
    auto work_hat = make_buffer(n);
    Plan forward_image(fh, fw, image_buf.get(), image_hat.get(), FFTW_FORWARD);
    Plan forward_kernel(fh, fw, work.get(), work_hat.get(), FFTW_FORWARD);
    Plan inverse(fh, fw, work_hat.get(), work.get(), FFTW_BACKWARD);

    // Mirror-padded input shifted by a reference sample: zero-DC kernels
    // ignore the shift, and a constant image becomes an exact zero array.
    const auto rows = detail::reflected_indices(H, R);
    const auto cols = detail::reflected_indices(W, R);
    const double ref = img.at(0, 0);
    for (int r = 0; r < fh; ++r) {
        for (int c = 0; c < fw; ++c) {
            const auto i = static_cast<std::size_t>(r) * fw + c;
            double v = 0.0;
            if (r < H + 2 * R && c < W + 2 * R) v = img.at(rows[r], cols[c]) - ref;
            image_buf[i][0] = v;
            image_buf[i][1] = 0.0;
        }
    }
    fftw_execute(forward_image.handle);

    RealField best(W, H);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (const auto& k : bank) {
        std::fill_n(&work[0][0], 2 * n, 0.0);
        const int side = 2 * k.radius + 1;
        // out(x) = sum_d psi(d) f(x + d): store psi(d) at -d for a circular convolution.
        for (int dy = -k.radius; dy <= k.radius; ++dy) {
            for (int dx = -k.radius; dx <= k.radius; ++dx) {
                const Complex t = k.taps[static_cast<std::size_t>(dy + k.radius) * side + (dx + k.radius)];
                const int rr = ((-dy) % fh + fh) % fh;
                const int cc = ((-dx) % fw + fw) % fw;
                auto& cell = work[static_cast<std::size_t>(rr) * fw + cc];
                cell[0] = t.real();
                cell[1] = t.imag();
            }
        }
        fftw_execute(forward_kernel.handle);
        for (std::size_t i = 0; i < n; ++i) {
            const Complex prod = Complex(image_hat[i][0], image_hat[i][1]) * Complex(work_hat[i][0], work_hat[i][1]);
            work_hat[i][0] = prod.real();
            work_hat[i][1] = prod.imag();
        }
        fftw_execute(inverse.handle);
        for (int r = 0; r < H; ++r) {
            for (int c = 0; c < W; ++c) {
                const auto& cell = work[static_cast<std::size_t>(r + R) * fw + (c + R)];
                const double re = cell[0] * inv_n, im = cell[1] * inv_n;
                double& b = best.at(r, c);
                b = std::max(b, std::sqrt(re * re + im * im));
            }
        }
    }
    return best;
}

GrayImage gabor(const GrayImage& img, const GaborParams& params) { return rescale_to_unit(gabor_raw(img, params)); }

}  // namespace octaseg
