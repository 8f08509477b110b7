#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "memepop/rng.hpp"

namespace memepop {

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
struct Box {
    Point<D> lo, hi;

    Point<D> clamp(Point<D> x) const {
        for (std::size_t i = 0; i < D; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
        return x;
    }
};

template <std::size_t D>
struct Minimum {
    Point<D> x{};
    double f = std::numeric_limits<double>::infinity();
    std::size_t start = 0;  // index of the start point that produced it
};

struct SimplexOptions {
    std::size_t max_evals = 4000;
    double x_tol = 1e-11;
    double f_tol = 1e-15;
    double initial_step = 0.1;  // fraction of the box width
};

// Nelder-Mead with every trial point projected onto the box.
template <std::size_t D, class F>
Minimum<D> nelder_mead(F&& f, Point<D> start, const Box<D>& box, const SimplexOptions& opt = {}) {
    constexpr std::size_t K = D + 1;
    std::array<Point<D>, K> s;
    std::array<double, K> fs;
    s[0] = box.clamp(start);
    for (std::size_t i = 0; i < D; ++i) {
        s[i + 1] = s[0];
        const double step = opt.initial_step * (box.hi[i] - box.lo[i]);
        s[i + 1][i] = s[0][i] + step <= box.hi[i] ? s[0][i] + step : s[0][i] - step;
    }
    std::size_t evals = 0;
    auto eval = [&](const Point<D>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    for (std::size_t i = 0; i < K; ++i) fs[i] = eval(s[i]);

    std::array<std::size_t, K> order;
    while (evals < opt.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
        auto s2 = s;
        auto f2 = fs;
        for (std::size_t i = 0; i < K; ++i) {
            s[i] = s2[order[i]];
            fs[i] = f2[order[i]];
        }
        double size = 0;
        for (std::size_t i = 1; i < K; ++i)
            for (std::size_t j = 0; j < D; ++j) size = std::max(size, std::abs(s[i][j] - s[0][j]));
        if (size < opt.x_tol && fs[K - 1] - fs[0] <= opt.f_tol * (1 + std::abs(fs[0]))) break;
        if (size < opt.x_tol * 1e-3) break;

        Point<D> centroid{};
        for (std::size_t i = 0; i < D; ++i)
            for (std::size_t j = 0; j < D; ++j) centroid[j] += s[i][j] / static_cast<double>(D);
        auto along = [&](double t) {
            Point<D> p;
            for (std::size_t j = 0; j < D; ++j) p[j] = centroid[j] + t * (s[K - 1][j] - centroid[j]);
            return box.clamp(p);
        };
        const auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < fs[0]) {
            const auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) s[K - 1] = xe, fs[K - 1] = fe;
            else s[K - 1] = xr, fs[K - 1] = fr;
        } else if (fr < fs[K - 2]) {
            s[K - 1] = xr, fs[K - 1] = fr;
        } else {
            const bool outside = fr < fs[K - 1];
            const auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : fs[K - 1])) {
                s[K - 1] = xc, fs[K - 1] = fc;
            } else {
                for (std::size_t i = 1; i < K; ++i) {
                    for (std::size_t j = 0; j < D; ++j) s[i][j] = s[0][j] + 0.5 * (s[i][j] - s[0][j]);
                    fs[i] = eval(s[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < K; ++i)
        if (fs[i] < fs[best]) best = i;
    return {s[best], fs[best], 0};
}

// n stratified points in the box, one per stratum along every axis.
template <std::size_t D>
std::vector<Point<D>> latin_hypercube(const Box<D>& box, std::size_t n, Rng& rng) {
    std::vector<Point<D>> pts(n);
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < D; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
            pts[i][j] = box.lo[j] + u * (box.hi[j] - box.lo[j]);
        }
    }
    return pts;
}

// Local search from every start, then re-polish the winner. Ties keep the lowest start index.
template <std::size_t D, class F>
Minimum<D> multi_start(F&& f, const std::vector<Point<D>>& starts, const Box<D>& box,
                       const SimplexOptions& opt = {}) {
    Minimum<D> best;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        auto m = nelder_mead<D>(f, starts[i], box, opt);
        m.start = i;
        if (m.f < best.f) best = m;
    }
    for (int polish = 0; polish < 3; ++polish) {
        SimplexOptions fine = opt;
        fine.initial_step = opt.initial_step * 0.01;
        auto m = nelder_mead<D>(f, best.x, box, fine);
        if (m.f < best.f) {
            m.start = best.start;
            best = m;
        } else {
            break;
        }
    }
    return best;
}

} // namespace memepop
