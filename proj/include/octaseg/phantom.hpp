#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "octaseg/image.hpp"

namespace octaseg {

/// Straight vessel piece: all points within radius of the segment (r0,c0)-(r1,c1).
struct Capsule {
    double r0{}, c0{};
    double r1{}, c1{};
    double radius{};
};

enum class Profile {
    Flat,      // antialiased box cross-section, coverage clamp(radius + 0.5 - d, 0, 1)
    Gaussian,  // exp(-d^2 / 2 radius^2)
};

struct RenderStyle {
    double background{0.1};
    double contrast{0.8};
    double noise_sigma{0.0};
    Profile profile{Profile::Flat};
    std::uint64_t seed{0};
};

/// Rendered scan plus its analytic mask (pixel centre within some capsule).
struct Phantom {
    GrayImage image;
    BinaryMask mask;
};

Phantom render_capsules(int width, int height, const std::vector<Capsule>& capsules, const RenderStyle& style);

/// Vertical tube through the centre column.
Phantom tube_phantom(int size, double radius, const RenderStyle& style = {});
/// Closed circular vessel centred in the image.
Phantom ring_phantom(int size, double ring_radius, double tube_radius, const RenderStyle& style = {});
/// Square vessel grid; the four cells around the centre are merged into one larger cell.
Phantom grid_phantom(int size, int spacing, double tube_radius, const RenderStyle& style = {});
/// Randomly bifurcating trees grown inward from the image border.
Phantom tree_phantom(int size, std::uint64_t seed, const RenderStyle& style = {});
/// Concentric capillary rings joined by spokes around a central avascular zone.
Phantom network_phantom(int size, std::uint64_t seed, const RenderStyle& style = {});

enum class PhantomKind { Tube, Ring, Grid, Tree, Network };

PhantomKind parse_phantom_kind(const std::string& name);
std::string to_string(PhantomKind kind);

/// Kind-dispatching generator with per-kind default geometry scaled to size.
Phantom make_phantom(PhantomKind kind, int size, std::uint64_t seed, const RenderStyle& style = {});

}  // namespace octaseg
