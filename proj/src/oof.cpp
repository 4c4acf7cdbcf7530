#include <algorithm>
#include <cmath>
#include <numbers>

#include "detail/raster_util.hpp"
#include "octaseg/enhance.hpp"

namespace octaseg {

void OofParams::validate() const {
    if (!(radius_range[0] > 0.0) || !(radius_range[0] <= radius_range[1])) {
        throw ParamError("OOF range must satisfy 0 < min <= max");
    }
    if (!(sigma > 0.0)) throw ParamError("OOF sigma must be positive");
    if (!(upthreshold >= 0.0 && upthreshold <= 255.0)) throw ParamError("OOF upthreshold must lie in [0,255]");
}

// Radii are stepped by the smoothing scale.
std::vector<double> OofParams::radii() const { return detail::inclusive_range(radius_range[0], radius_range[1], sigma); }

RealField oof_radius_response(const GrayImage& img, double radius, double sigma) {
    const TensorField q = apply_tensor_kernel(to_field(img), oriented_flux_kernel(radius, sigma));
    RealField out(img.width(), img.height());
    const double circumference = 2.0 * std::numbers::pi * radius;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const Eigen2 e = eigen_by_value(q.xx[i], q.xy[i], q.yy[i]);
        out.data[i] = std::max(0.0, -e.first - e.second) / circumference;
    }
    return out;
}

GrayImage oof(const GrayImage& img, const OofParams& params) {
    params.validate();
    RealField best(img.width(), img.height());
    for (double r : params.radii()) {
        const RealField resp = oof_radius_response(img, r, params.sigma);
        for (std::size_t i = 0; i < best.data.size(); ++i) best.data[i] = std::max(best.data[i], resp.data[i]);
    }
    return rescale_to_unit(best);
}

}  // namespace octaseg
