#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "octaseg/image.hpp"

namespace testing {

using octaseg::BinaryMask;
using octaseg::GrayImage;

// '#' or '1' is foreground, anything else background
inline BinaryMask mask_from(const std::vector<std::string>& rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.at(0).size());
    BinaryMask m(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) m.set(r, c, rows[r][c] == '#' || rows[r][c] == '1');
    }
    return m;
}

inline BinaryMask random_mask(int w, int h, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    BinaryMask m(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) m.set(r, c, coin(rng));
    }
    return m;
}

// Union of a few random filled discs and rectangles.
inline BinaryMask random_blobs(int w, int h, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nblob(1, 6);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    BinaryMask m(w, h);
    const int n = nblob(rng);
    for (int k = 0; k < n; ++k) {
        const double cr = ur(rng) * h, cc = ur(rng) * w;
        const double rad = 2.0 + ur(rng) * w / 4.0;
        const bool disc = ur(rng) < 0.5;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const double dr = r - cr, dc = c - cc;
                const bool in = disc ? dr * dr + dc * dc <= rad * rad : std::abs(dr) <= rad && std::abs(dc) <= rad / 2;
                if (in) m.set(r, c, true);
            }
        }
    }
    // punch a few holes
    std::uniform_int_distribution<int> nh(0, 4);
    const int holes = nh(rng);
    for (int k = 0; k < holes; ++k) {
        const int r = static_cast<int>(ur(rng) * h), c = static_cast<int>(ur(rng) * w);
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (r + dr >= 0 && r + dr < h && c + dc >= 0 && c + dc < w && ur(rng) < 0.7) m.set(r + dr, c + dc, false);
            }
        }
    }
    return m;
}

// Recursive flood fill; fine for test-sized rasters.
inline int flood_count(const BinaryMask& m, bool value, int connectivity, std::vector<int>* labels = nullptr) {
    const int w = m.width(), h = m.height();
    std::vector<int> lab(static_cast<std::size_t>(w) * h, 0);
    int count = 0;
    std::function<void(int, int)> fill = [&](int r, int c) {
        if (r < 0 || c < 0 || r >= h || c >= w) return;
        auto& l = lab[static_cast<std::size_t>(r) * w + c];
        if (l != 0 || m.at(r, c) != value) return;
        l = count;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if ((dr == 0 && dc == 0) || (connectivity == 4 && dr != 0 && dc != 0)) continue;
                fill(r + dr, c + dc);
            }
        }
    };
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (m.at(r, c) == value && lab[static_cast<std::size_t>(r) * w + c] == 0) {
                ++count;
                fill(r, c);
            }
        }
    }
    if (labels) *labels = std::move(lab);
    return count;
}

// Euler characteristic of the union of closed unit squares, one per foreground pixel.
inline long euler_closed_squares(const BinaryMask& m) {
    std::set<std::pair<int, int>> verts;
    std::set<std::tuple<int, int, int>> edges;  // (row, col, 0 = horizontal / 1 = vertical)
    long faces = 0;
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            if (!m.at(r, c)) continue;
            ++faces;
            verts.insert({r, c});
            verts.insert({r + 1, c});
            verts.insert({r, c + 1});
            verts.insert({r + 1, c + 1});
            edges.insert({r, c, 0});
            edges.insert({r + 1, c, 0});
            edges.insert({r, c, 1});
            edges.insert({r, c + 1, 1});
        }
    }
    return static_cast<long>(verts.size()) - static_cast<long>(edges.size()) + faces;
}

inline GrayImage constant_image(int w, int h, double v) { return GrayImage(w, h, v); }

}  // namespace testing
