#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "memepop/error.hpp"

namespace memepop {

inline double sigmoid(double x) noexcept {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + e^x) without overflow.
inline double softplus(double x) noexcept {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline std::int64_t round_half_even(double x) { return static_cast<std::int64_t>(std::nearbyint(x)); }

// Centered moving average; the window shrinks near the ends. window <= 1 copies.
template <class T>
std::vector<double> moving_average(const std::vector<T>& x, std::size_t window) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (window <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(x[i]);
        return out;
    }
    const std::size_t half = window / 2;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + static_cast<double>(x[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= half ? i - half : 0;
        const std::size_t b = std::min(n, i + half + 1);
        out[i] = (prefix[b] - prefix[a]) / static_cast<double>(b - a);
    }
    return out;
}

// Piecewise-linear interpolation of (xs, ys) at x; xs strictly increasing. Clamps outside.
inline double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + w * (ys[j] - ys[j - 1]);
}

inline std::vector<double> uniform_grid(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

inline std::vector<double> resample(const std::vector<double>& xs, const std::vector<double>& ys,
                                    const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = interpolate(xs, ys, grid[i]);
    return out;
}

// Rescales to [0, 1]; a constant series maps to all zeros.
inline std::vector<double> min_max_normalize(std::vector<double> y) {
    if (y.empty()) return y;
    auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double a = *lo, span = *hi - *lo;
    for (auto& v : y) v = span > 0 ? (v - a) / span : 0.0;
    return y;
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    double rms = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        sse += r * r;
    }
    f.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
    f.rms = std::sqrt(sse / n);
    return f;
}

// Classical two-sample KS distance between empirical CDFs.
template <class T>
double ks_two_sample(std::vector<T> a, std::vector<T> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const T v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return std::min(1.0, d);
}

struct MeanStd {
    double mean = 0;
    double std = 0;
};

// Sample standard deviation (n - 1); 0 for a single value.
inline MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    if (v.empty()) return r;
    for (double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

} // namespace memepop
