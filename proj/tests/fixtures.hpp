#pragma once

#include <utility>
#include <vector>

#include "octaseg/image.hpp"
#include "support.hpp"

namespace fixtures {

using octaseg::BinaryMask;

// 1x4 rasters for the confusion / kappa hand cases
inline BinaryMask row4(bool a, bool b, bool c, bool d) {
    return BinaryMask(4, 1, std::vector<std::uint8_t>{a, b, c, d});
}

// tp = 2, |seg| = 3, |gt| = 4  ->  dice 4/7
inline std::pair<BinaryMask, BinaryMask> dice_pair() {
    return {testing::mask_from({"###....."}), testing::mask_from({"##.##..."})};
}

// gt: two 10x10 blocks (200 px, 2 components); seg: 12 isolated pixels
inline std::pair<BinaryMask, BinaryMask> connectivity_pair() {
    BinaryMask gt(40, 40), seg(40, 40);
    for (int r = 2; r < 12; ++r) {
        for (int c = 2; c < 12; ++c) {
            gt.set(r, c, true);
            gt.set(r + 20, c + 20, true);
        }
    }
    for (int k = 0; k < 12; ++k) seg.set(2 + 2 * (k / 6), 2 + 2 * (k % 6), true);
    return {seg, gt};
}

// one-pixel horizontal segment; a 1-px chain is its own skeleton
inline BinaryMask line(int width, int length) {
    BinaryMask m(width, 3);
    for (int c = 0; c < length; ++c) m.set(1, c, true);
    return m;
}

// n closed 1-px square loops side by side
inline BinaryMask rings(int n, int width = 60) {
    BinaryMask m(width, 8);
    for (int k = 0; k < n; ++k) {
        const int c0 = 1 + 6 * k;
        for (int d = 0; d < 5; ++d) {
            m.set(1, c0 + d, true);
            m.set(5, c0 + d, true);
            m.set(1 + d, c0, true);
            m.set(1 + d, c0 + 4, true);
        }
    }
    return m;
}

// 1-px vessel along row 5 with four loops; the edit removes three pixels:
// two split the vessel into thirds and one opens a loop.
struct SensitivityCase {
    BinaryMask gt;
    BinaryMask seg;
    int edited{};
};

inline SensitivityCase sensitivity_case() {
    const int W = 300;
    BinaryMask gt(W, 9);
    for (int c = 0; c < W; ++c) gt.set(5, c, true);
    for (int c0 : {20, 60, 140, 230}) {
        for (int c = c0; c <= c0 + 10; ++c) gt.set(2, c, true);
        for (int r = 2; r <= 5; ++r) {
            gt.set(r, c0, true);
            gt.set(r, c0 + 10, true);
        }
    }
    BinaryMask seg = gt;
    seg.set(5, 100, false);
    seg.set(5, 200, false);
    seg.set(5, 145, false);
    return {gt, seg, 3};
}

}  // namespace fixtures
