#pragma once

#include <cmath>
#include <vector>

namespace octaseg::detail {

// Mirror reflection that repeats the edge sample: -1 -> 0, n -> n-1, period 2n.
// Commutes with flips i -> n-1-i, which the equivariance guarantees rely on.
inline int reflect_index(int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

// reflect_index for every i in [-pad, n + pad), stored at i + pad.
inline std::vector<int> reflected_indices(int n, int pad) {
    std::vector<int> idx(static_cast<std::size_t>(n + 2 * pad));
    for (int i = -pad; i < n + pad; ++i) idx[static_cast<std::size_t>(i + pad)] = reflect_index(i, n);
    return idx;
}

// lo, lo+step, ... up to hi inclusive (with a small tolerance for accumulated rounding).
inline std::vector<double> inclusive_range(double lo, double hi, double step) {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) {
        double v = lo + static_cast<double>(i) * step;
        if (std::abs(v) < 1e-12 * step) v = 0.0;
        out.push_back(v);
    }
    return out;
}

}  // namespace octaseg::detail
