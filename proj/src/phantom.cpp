#include "octaseg/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace octaseg {
namespace {

double segment_distance(double r, double c, const Capsule& k) {
    const double dr = k.r1 - k.r0, dc = k.c1 - k.c0;
    const double len2 = dr * dr + dc * dc;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((r - k.r0) * dr + (c - k.c0) * dc) / len2, 0.0, 1.0);
    const double pr = k.r0 + t * dr - r, pc = k.c0 + t * dc - c;
    return std::sqrt(pr * pr + pc * pc);
}

void add_circle(std::vector<Capsule>& out, double cr, double cc, double radius, double tube) {
    const int n = std::max(12, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / 3.0)));
    for (int i = 0; i < n; ++i) {
        const double a0 = 2.0 * std::numbers::pi * i / n;
        const double a1 = 2.0 * std::numbers::pi * (i + 1) / n;
        out.push_back({cr + radius * std::sin(a0), cc + radius * std::cos(a0),
                       cr + radius * std::sin(a1), cc + radius * std::cos(a1), tube});
    }
}

void require_size(int size) {
    if (size < 16) throw std::invalid_argument("phantom size must be at least 16");
}

}  // namespace

Phantom render_capsules(int width, int height, const std::vector<Capsule>& capsules, const RenderStyle& style) {
    if (style.noise_sigma < 0.0) throw std::invalid_argument("noise sigma must be non-negative");
    std::vector<double> pix(static_cast<std::size_t>(width) * height);
    BinaryMask mask(width, height);
    std::mt19937_64 rng(style.seed);
    std::normal_distribution<double> noise(0.0, style.noise_sigma > 0.0 ? style.noise_sigma : 1.0);

    std::vector<double> level(pix.size(), 0.0);
    for (const Capsule& k : capsules) {
        // the Gaussian tail past 8 radii is below 1e-13
        const double reach = style.profile == Profile::Flat ? k.radius + 0.5 : 8.0 * k.radius;
        const int r_lo = std::max(0, static_cast<int>(std::floor(std::min(k.r0, k.r1) - reach)));
        const int r_hi = std::min(height - 1, static_cast<int>(std::ceil(std::max(k.r0, k.r1) + reach)));
        const int c_lo = std::max(0, static_cast<int>(std::floor(std::min(k.c0, k.c1) - reach)));
        const int c_hi = std::min(width - 1, static_cast<int>(std::ceil(std::max(k.c0, k.c1) + reach)));
        for (int r = r_lo; r <= r_hi; ++r) {
            for (int c = c_lo; c <= c_hi; ++c) {
                const double d = segment_distance(r, c, k);
                const auto i = static_cast<std::size_t>(r) * width + c;
                if (d <= k.radius) mask.set_index(i, true);
                const double v = style.profile == Profile::Flat ? std::clamp(k.radius + 0.5 - d, 0.0, 1.0)
                                                                : std::exp(-d * d / (2.0 * k.radius * k.radius));
                level[i] = std::max(level[i], v);
            }
        }
    }
    for (std::size_t i = 0; i < pix.size(); ++i) {
        double v = style.background + style.contrast * level[i];
        if (style.noise_sigma > 0.0) v += noise(rng);
        pix[i] = std::clamp(v, 0.0, 1.0);
    }
    return {GrayImage(width, height, std::move(pix)), std::move(mask)};
}

Phantom tube_phantom(int size, double radius, const RenderStyle& style) {
    require_size(size);
    const double mid = size / 2;
    return render_capsules(size, size, {{-4.0, mid, size + 3.0, mid, radius}}, style);
}

Phantom ring_phantom(int size, double ring_radius, double tube_radius, const RenderStyle& style) {
    require_size(size);
    if (ring_radius + tube_radius >= size / 2.0 - 1.0) throw std::invalid_argument("ring does not fit the image");
    std::vector<Capsule> caps;
    const double mid = (size - 1) / 2.0;
    add_circle(caps, mid, mid, ring_radius, tube_radius);
    return render_capsules(size, size, caps, style);
}

Phantom grid_phantom(int size, int spacing, double tube_radius, const RenderStyle& style) {
    require_size(size);
    if (spacing < 4) throw std::invalid_argument("grid spacing must be at least 4");
    const int mid = size / 2;
    const double inner_lo = mid - spacing, inner_hi = mid + spacing;
    std::vector<Capsule> caps;
    const double lo = -2.0, hi = size + 1.0;
    for (int p = mid % spacing; p < size; p += spacing) {
        const double q = p;
        if (p == mid) {
            // broken inside the central 2x2 block
            caps.push_back({lo, q, inner_lo, q, tube_radius});
            caps.push_back({inner_hi, q, hi, q, tube_radius});
            caps.push_back({q, lo, q, inner_lo, tube_radius});
            caps.push_back({q, inner_hi, q, hi, tube_radius});
        } else {
            caps.push_back({lo, q, hi, q, tube_radius});
            caps.push_back({q, lo, q, hi, tube_radius});
        }
    }
    return render_capsules(size, size, caps, style);
}

Phantom tree_phantom(int size, std::uint64_t seed, const RenderStyle& style) {
    require_size(size);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double scale = size / 304.0;

    struct Tip {
        double r, c, angle, radius, budget;
    };
    std::vector<Tip> tips;
    const double pi = std::numbers::pi;
    const double mid = (size - 1) / 2.0;
    // one trunk entering from each side, aimed roughly at the centre
    const std::array<std::array<double, 3>, 4> roots{{{0.0, mid, pi / 2}, {size - 1.0, mid, -pi / 2},
                                                       {mid, 0.0, 0.0}, {mid, size - 1.0, pi}}};
    for (const auto& rt : roots) {
        const double shift = (unit(rng) - 0.5) * 0.4 * size;
        const bool vertical = rt[2] != 0.0 && rt[2] != pi;
        tips.push_back({vertical ? rt[0] : rt[0] + shift, vertical ? rt[1] + shift : rt[1],
                        rt[2] + (unit(rng) - 0.5) * 0.4, 2.2, (30.0 + 20.0 * unit(rng)) * scale});
    }

    std::vector<Capsule> caps;
    const double step = std::max(3.0, 6.0 * scale);
    std::size_t guard = 0;
    while (!tips.empty() && guard++ < 20000) {
        Tip t = tips.back();
        tips.pop_back();
        while (true) {
            // angle is measured with sin on rows and cos on columns
            const double nr = t.r + step * std::sin(t.angle);
            const double nc = t.c + step * std::cos(t.angle);
            caps.push_back({t.r, t.c, nr, nc, t.radius});
            t.r = nr;
            t.c = nc;
            t.angle += (unit(rng) - 0.5) * 0.5;
            t.budget -= step;
            if (t.r < -2.0 || t.c < -2.0 || t.r > size + 1.0 || t.c > size + 1.0) break;
            if (t.budget <= 0.0) {
                const double child = t.radius * 0.8;
                if (child < 1.0) break;
                for (double side : {-1.0, 1.0}) {
                    tips.push_back({t.r, t.c, t.angle + side * (0.35 + 0.25 * unit(rng)), child,
                                    (25.0 + 25.0 * unit(rng)) * scale});
                }
                break;
            }
        }
    }
    return render_capsules(size, size, caps, style);
}

Phantom network_phantom(int size, std::uint64_t seed, const RenderStyle& style) {
    require_size(size);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double pi = std::numbers::pi;
    const double mid = (size - 1) / 2.0;
    const double tube = size >= 128 ? 1.2 : 0.8;

    const double jitter = 1.0 + 0.1 * (unit(rng) - 0.5);
    const std::array<double, 3> rings{0.10 * size * jitter, 0.23 * size * jitter, 0.40 * size * jitter};
    const std::array<int, 2> spokes{6, 14};

    std::vector<Capsule> caps;
    for (double rr : rings) add_circle(caps, mid, mid, rr, tube);
    for (std::size_t k = 0; k < spokes.size(); ++k) {
        const double phase = unit(rng) * 2.0 * pi;
        for (int i = 0; i < spokes[k]; ++i) {
            const double a = phase + 2.0 * pi * i / spokes[k];
            const double inner = rings[k], outer = rings[k + 1];
            caps.push_back({mid + inner * std::sin(a), mid + inner * std::cos(a), mid + outer * std::sin(a),
                            mid + outer * std::cos(a), tube});
        }
    }
    // radial feeders from the outer ring to the border
    const double phase = unit(rng) * 2.0 * pi;
    for (int i = 0; i < 8; ++i) {
        const double a = phase + 2.0 * pi * i / 8;
        const double reach = size;
        caps.push_back({mid + rings[2] * std::sin(a), mid + rings[2] * std::cos(a), mid + reach * std::sin(a),
                        mid + reach * std::cos(a), tube * 1.5});
    }
    return render_capsules(size, size, caps, style);
}

PhantomKind parse_phantom_kind(const std::string& name) {
    if (name == "tube") return PhantomKind::Tube;
    if (name == "ring") return PhantomKind::Ring;
    if (name == "grid") return PhantomKind::Grid;
    if (name == "tree") return PhantomKind::Tree;
    if (name == "network") return PhantomKind::Network;
    throw std::invalid_argument("unknown phantom kind: " + name);
}

std::string to_string(PhantomKind kind) {
    switch (kind) {
        case PhantomKind::Tube: return "tube";
        case PhantomKind::Ring: return "ring";
        case PhantomKind::Grid: return "grid";
        case PhantomKind::Tree: return "tree";
        case PhantomKind::Network: return "network";
    }
    return "unknown";
}

Phantom make_phantom(PhantomKind kind, int size, std::uint64_t seed, const RenderStyle& style) {
    switch (kind) {
        case PhantomKind::Tube: return tube_phantom(size, 1.5, style);
        case PhantomKind::Ring: return ring_phantom(size, size / 4.0, 1.5, style);
        case PhantomKind::Grid: return grid_phantom(size, std::max(4, size / 8), 1.0, style);
        case PhantomKind::Tree: return tree_phantom(size, seed, style);
        case PhantomKind::Network: return network_phantom(size, seed, style);
    }
    throw std::invalid_argument("unknown phantom kind");
}

}  // namespace octaseg
