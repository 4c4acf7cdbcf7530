#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "octaseg/image.hpp"

namespace octaseg {

class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-pixel symmetric 2x2 tensor; x runs along columns, y along rows.
struct TensorField {
    int width{};
    int height{};
    std::vector<double> xx;
    std::vector<double> xy;
    std::vector<double> yy;

    TensorField() = default;
    TensorField(int w, int h);
};

struct HessianField : TensorField {
    double sigma{};
};

/**
 * Kernel triple (Kxx, Kxy, Kyy) with the symmetries of a second-order
 * tensor operator: Kxx is even in both axes, Kyy is Kxx transposed, and
 * Kxy is odd in each axis and symmetric under transposition. Only the
 * first quadrant is stored.
 */
struct TensorKernel {
    int radius{};
    /// Kxx(|dx| = a, |dy| = b) at index a * (radius + 1) + b.
    std::vector<double> xx;
    /// Kxy(a, b) for a, b >= 0 at the same indexing; symmetric in (a, b).
    std::vector<double> xy;

    double kxx(int a, int b) const { return xx[static_cast<std::size_t>(a) * (radius + 1) + b]; }
    double kxy(int a, int b) const { return xy[static_cast<std::size_t>(a) * (radius + 1) + b]; }
};

/// Correlates a field with a tensor kernel under mirror-reflected borders.
/// The result is exactly equivariant under transposes and axis flips.
TensorField apply_tensor_kernel(const RealField& img, const TensorKernel& kernel);

/// Scale-normalized Gaussian second-derivative kernels (sigma^2 factor).
TensorKernel gaussian_hessian_kernel(double sigma);

HessianField gaussian_hessian(const GrayImage& img, double sigma);
HessianField gaussian_hessian(const RealField& img, double sigma);

struct Eigen2 {
    double first;   // smaller by the chosen ordering
    double second;
};

/// Closed-form eigenvalues of [[xx, xy], [xy, yy]], ordered by |value|.
Eigen2 eigen_by_magnitude(double xx, double xy, double yy);
/// Closed-form eigenvalues ordered by signed value.
Eigen2 eigen_by_value(double xx, double xy, double yy);

// --- Frangi ------------------------------------------------------------------

struct FrangiParams {
    std::array<double, 2> scale_range{0.5, 2.0};  // FrangiScaleRange
    double scale_ratio{0.5};                      // FrangiScaleRatio
    double beta_one{1.0};                         // FrangiBetaOne
    double beta_two{15.0};                        // FrangiBetaTwo

    void validate() const;
    std::vector<double> scales() const;
};

/// Bright-vessel Frangi vesselness, max over scales, rescaled to [0,1].
GrayImage frangi(const GrayImage& img, const FrangiParams& params = {});
/// Pre-rescale response for a single scale.
RealField frangi_scale_response(const GrayImage& img, double sigma, const FrangiParams& params);

// --- Gabor -------------------------------------------------------------------

struct GaborParams {
    std::vector<double> scales{1.0, 2.0, 3.0, 4.0};  // scales
    double epsilon{4.0};                            // epsilon
    std::array<double, 2> k0{0.0, 3.0};             // k0
    int n_orientations{18};

    void validate() const;
};

/// Max modulus over the zero-DC Gabor bank before rescaling.
RealField gabor_raw(const GrayImage& img, const GaborParams& params = {});
GrayImage gabor(const GrayImage& img, const GaborParams& params = {});

// --- SCIRD-TS ----------------------------------------------------------------

struct ScirdParams {
    std::array<double, 2> sigma_1{1.0, 5.0};  // fb_parameters.sigma_1
    double sigma_1_step{0.5};                 // fb_parameters.sigma_1_step
    std::array<double, 2> sigma_2{1.0, 2.0};  // fb_parameters.sigma_2
    double sigma_2_step{0.5};                 // fb_parameters.sigma_2_step
    std::array<double, 2> k{-0.1, 0.1};       // fb_parameters.k
    double k_step{0.025};                     // fb_parameters.k_step
    double angle_step{10.0};                  // fb_parameters.angle_step (degrees)
    int filter_size{9};                       // fb_parameters.filter_size
    double alpha{0.05};                       // alpha

    void validate() const;
};

struct ScirdKernel {
    double sigma1{};
    double sigma2{};
    double curvature{};
    double angle_deg{};
    int size{};
    std::vector<double> weights;      // zero-mean, unit L2 norm
    std::vector<double> abs_weights;  // |weights|, sums to 1
};

std::vector<ScirdKernel> scird_bank(const ScirdParams& params);
/// Contrast-normalized response of one bank member: (F*I) / (alpha + |F|*I).
RealField scird_member_response(const GrayImage& img, const ScirdKernel& kernel, double alpha);
GrayImage scird_ts(const GrayImage& img, const ScirdParams& params = {});

// --- Optimally oriented flux -------------------------------------------------

struct OofParams {
    std::array<double, 2> radius_range{0.5, 2.0};  // range
    double sigma{0.5};                             // sigma
    double upthreshold{70.0};                      // upthreshold, on the 0..255 scale

    void validate() const;
    std::vector<double> radii() const;
};

/// Oriented-flux kernel for one circle radius and smoothing scale.
TensorKernel oriented_flux_kernel(double radius, double sigma);
/// max(0, -(l1 + l2)) / (2 pi r) for one radius, before rescaling.
RealField oof_radius_response(const GrayImage& img, double radius, double sigma);
GrayImage oof(const GrayImage& img, const OofParams& params = {});

}  // namespace octaseg
