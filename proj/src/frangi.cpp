#include <algorithm>
#include <cmath>

#include "detail/raster_util.hpp"
#include "octaseg/enhance.hpp"

namespace octaseg {

namespace {
// Structureness is evaluated on the 8-bit intensity scale so that
// FrangiBetaTwo keeps the meaning it has for 0..255 images.
constexpr double kByteScale = 255.0;
}  // namespace

void FrangiParams::validate() const {
    if (!(scale_range[0] > 0.0) || !(scale_range[0] <= scale_range[1])) {
        throw ParamError("FrangiScaleRange must satisfy 0 < min <= max");
    }
    if (!(scale_ratio > 0.0)) throw ParamError("FrangiScaleRatio must be positive");
    if (!(beta_one > 0.0) || !(beta_two > 0.0)) throw ParamError("Frangi betas must be positive");
}

std::vector<double> FrangiParams::scales() const {
    return detail::inclusive_range(scale_range[0], scale_range[1], scale_ratio);
}

RealField frangi_scale_response(const GrayImage& img, double sigma, const FrangiParams& params) {
    params.validate();
    const HessianField h = gaussian_hessian(img, sigma);
    RealField out(img.width(), img.height());
    const double b1 = 2.0 * params.beta_one * params.beta_one;
    const double b2 = 2.0 * params.beta_two * params.beta_two;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const Eigen2 e = eigen_by_magnitude(h.xx[i], h.xy[i], h.yy[i]);
        const double l1 = e.first;
        const double l2 = e.second;
        // Bright tubular structures have a strongly negative cross-section eigenvalue.
        if (!(l2 < 0.0)) continue;
        const double rb = l1 / l2;
        const double s = kByteScale * std::sqrt(l1 * l1 + l2 * l2);
        out.data[i] = std::exp(-rb * rb / b1) * (1.0 - std::exp(-s * s / b2));
    }
    return out;
}

GrayImage frangi(const GrayImage& img, const FrangiParams& params) {
    params.validate();
    RealField best(img.width(), img.height());
    for (double sigma : params.scales()) {
        const RealField r = frangi_scale_response(img, sigma, params);
        for (std::size_t i = 0; i < best.data.size(); ++i) best.data[i] = std::max(best.data[i], r.data[i]);
    }
    return rescale_to_unit(best);
}

}  // namespace octaseg
