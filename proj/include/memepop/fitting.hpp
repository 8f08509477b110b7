#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "memepop/analytic.hpp"
#include "memepop/error.hpp"
#include "memepop/eventlog.hpp"
#include "memepop/metrics.hpp"
#include "memepop/optimize.hpp"
#include "memepop/powerlaw.hpp"
#include "memepop/rng.hpp"
#include "memepop/stats.hpp"

namespace memepop {

inline constexpr std::size_t kSigmoidRestarts = 20;
inline constexpr std::uint64_t kFitSeed = 0x5eed5eedULL;

struct SigmoidFit {
    double B = std::numeric_limits<double>::quiet_NaN();
    double C = std::numeric_limits<double>::quiet_NaN();
    // P_A ~ amplitude * sigmoid(...); 1 for a curve that saturates inside the window.
    double amplitude = 1.0;
    double residual = 0;  // RMS
    bool degenerate = false;
    std::vector<std::string> warnings;
};

// Least squares on t_hat = L * log(T), T = curve horizon (number of points when unset).
inline SigmoidFit fit_sigmoid(const ActivationCurve& curve) {
    const std::size_t n = curve.L.size();
    if (n < 5 || curve.P_A.size() != n) throw DomainError("fit_sigmoid needs at least 5 points");
    SigmoidFit out;
    double drop = 0, peak = curve.P_A.front();
    for (double v : curve.P_A) {
        drop = std::max(drop, peak - v);
        peak = std::max(peak, v);
    }
    auto [lo, hi] = std::minmax_element(curve.P_A.begin(), curve.P_A.end());
    if (drop > 0.01 * std::max(1e-12, *hi - *lo))
        out.warnings.push_back("activation curve is non-monotone (largest drop " + std::to_string(drop) + ")");
    if (*hi - *lo < 1e-12) {
        out.degenerate = true;
        out.warnings.push_back("activation curve is constant; sigmoid midpoint undefined");
        return out;
    }

    const double horizon = curve.horizon > 0 ? static_cast<double>(curve.horizon) : static_cast<double>(n);
    const double log_t = std::log(std::max(horizon, 2.0));
    std::vector<double> t_hat(n);
    for (std::size_t i = 0; i < n; ++i) t_hat[i] = curve.L[i] * log_t;

    auto sse = [&](const Point<3>& p) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = p[2] * sigmoid(p[0] * (t_hat[i] - p[1])) - curve.P_A[i];
            s += r * r;
        }
        return s;
    };
    const Box<3> box{{1e-3, -log_t, 0.5}, {50.0, 2.0 * log_t, 20.0}};
    Rng rng(kFitSeed);
    auto starts = latin_hypercube<3>(Box<3>{{box.lo[0], box.lo[1], 1.0}, {box.hi[0], box.hi[1], 1.0}},
                                     kSigmoidRestarts, rng);
    SimplexOptions opt;
    opt.max_evals = 3000;
    const auto best = multi_start<3>(sse, starts, box, opt);
    out.B = best.x[0] / log_t;
    out.C = best.x[1] / log_t;
    out.amplitude = best.x[2];
    out.residual = std::sqrt(best.f / static_cast<double>(n));
    return out;
}

struct TwoSigmoidFit {
    bool plateau_found = false;
    SigmoidFit first, second;  // second is unused without a plateau
    double split = 0;          // center of the plateau in L
    double plateau_start = 0, plateau_end = 0;
    std::vector<std::string> notes;
};

namespace detail {

inline ActivationCurve segment(const ActivationCurve& c, std::size_t i0, std::size_t i1) {
    ActivationCurve s;
    const std::size_t m = i1 - i0 + 1;
    s.horizon = static_cast<std::int64_t>(m);
    std::vector<double> v(c.P_A.begin() + static_cast<std::ptrdiff_t>(i0), c.P_A.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    s.P_A = min_max_normalize(std::move(v));
    s.L.resize(m);
    for (std::size_t i = 0; i < m; ++i) s.L[i] = static_cast<double>(i) / static_cast<double>(m);
    return s;
}

} // namespace detail

inline constexpr double kPlateauSlopeFraction = 0.1;
inline constexpr double kPlateauMinWidth = 0.05;

// Plateau = interior run of points whose slope is below 10% of the mean slope and
// that spans at least 5% of the L range. The first segment ends where the plateau
// starts; the second segment begins there and carries the plateau as its lag phase.
inline TwoSigmoidFit fit_two_sigmoids(const ActivationCurve& curve) {
    const std::size_t n = curve.L.size();
    if (n < 5) throw DomainError("fit_two_sigmoids needs at least 5 points");
    TwoSigmoidFit out;
    const double range_l = curve.L.back() - curve.L.front();
    const double mean_slope = (curve.P_A.back() - curve.P_A.front()) / range_l;
    std::vector<bool> low(n, false);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double slope = (curve.P_A[i + 1] - curve.P_A[i - 1]) / (curve.L[i + 1] - curve.L[i - 1]);
        low[i] = std::abs(slope) < kPlateauSlopeFraction * std::abs(mean_slope);
    }
    std::size_t best_a = 0, best_b = 0;
    double best_w = -1;
    for (std::size_t i = 1; i + 1 < n;) {
        if (!low[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && low[j + 1]) ++j;
        // Interior runs only: a rise on both sides.
        if (i > 1 && j + 2 < n) {
            const double w = curve.L[j] - curve.L[i];
            if (w >= kPlateauMinWidth * range_l && w > best_w) {
                best_w = w;
                best_a = i;
                best_b = j;
            }
        }
        i = j + 1;
    }
    if (best_w < 0 || best_a < 4 || n - best_a < 5) {
        out.notes.push_back("no plateau found; single sigmoid fitted");
        out.first = fit_sigmoid(curve);
        return out;
    }
    out.plateau_found = true;
    out.plateau_start = curve.L[best_a];
    out.plateau_end = curve.L[best_b];
    out.split = 0.5 * (out.plateau_start + out.plateau_end);
    out.first = fit_sigmoid(detail::segment(curve, 0, best_a));
    out.second = fit_sigmoid(detail::segment(curve, best_a, n - 1));
    return out;
}

// Curves are compared as in analytic compare; samples by their empirical CDFs.
inline double ks_two_sample(const GrowthCurve& a, const GrowthCurve& b) {
    if (a.size() == 0 || b.size() == 0) throw DomainError("ks_two_sample: empty input");
    return compare(a, b);
}

struct RhoEstimate {
    double mean = 0;
    std::vector<double> distribution;
};

inline RhoEstimate estimate_rho(const EventLog& log) {
    auto s = rho_per_user(log);
    return {s.event_weighted_mean, std::move(s.distribution)};
}

enum class Regime { Linear, SShape, Exponential, Unclassified };

inline std::string to_string(Regime r) {
    switch (r) {
    case Regime::Linear: return "linear";
    case Regime::SShape: return "s_shape";
    case Regime::Exponential: return "exponential";
    default: return "unclassified";
    }
}

// Classification thresholds on the curve rescaled to [0, 1].
inline constexpr double kLinearR2 = 0.98;
// y(L = 0.5) of a normalized e^{cL} - 1 with c = 3.
inline const double kExponentialHalfValue = 1.0 / (1.0 + std::exp(1.5));
inline constexpr double kRegimeMargin = 0.05;
inline constexpr std::size_t kClassifyGridPoints = 200;

struct RegimeResult {
    Regime regime = Regime::Unclassified;
    double rms_linear = 0, rms_sigmoid = 0, rms_exponential = 0;
    double linear_r2 = 0;
    double half_value = 0;   // normalized curve at L = 0.5
    double exp_rate = 0;     // fitted c of a (e^{cL} - 1)
};

namespace detail {

// Best a for fixed basis g: minimizes sum (a g - y)^2; returns SSE.
inline double scale_fit(const std::vector<double>& g, const std::vector<double>& y) {
    double gg = 0, gy = 0, yy = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        gg += g[i] * g[i];
        gy += g[i] * y[i];
        yy += y[i] * y[i];
    }
    return gg > 0 ? std::max(0.0, yy - gy * gy / gg) : yy;
}

// Best (a, b) for a g + b; returns SSE.
inline double affine_fit(const std::vector<double>& g, const std::vector<double>& y) {
    const auto f = linear_fit(g, y);
    return f.rms * f.rms * static_cast<double>(g.size());
}

} // namespace detail

inline RegimeResult classify_growth(const GrowthCurve& curve) {
    if (curve.size() < 10) throw DomainError("classify_growth needs at least 10 points");
    const auto grid = uniform_grid(kClassifyGridPoints);
    const auto y = min_max_normalize(resample(curve.L, curve.value, grid));
    const double n = static_cast<double>(grid.size());
    RegimeResult r;

    const auto lin = linear_fit(grid, y);
    r.linear_r2 = lin.r_squared;
    r.rms_linear = lin.rms;

    // a (e^{cL} - 1): a is linear given c; scan c, then refine.
    std::vector<double> g(grid.size());
    auto exp_sse = [&](double c) {
        for (std::size_t i = 0; i < grid.size(); ++i) g[i] = std::abs(c) < 1e-9 ? grid[i] : std::expm1(c * grid[i]);
        return detail::scale_fit(g, y);
    };
    double best_c = 0, best_sse = std::numeric_limits<double>::infinity();
    for (double c = -30; c <= 30; c += 0.25) {
        const double s = exp_sse(c);
        if (s < best_sse) best_sse = s, best_c = c;
    }
    {
        double a = best_c - 0.25, b = best_c + 0.25;
        const double phi = 0.5 * (std::sqrt(5.0) - 1);
        for (int it = 0; it < 100; ++it) {
            const double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
            if (exp_sse(c1) < exp_sse(c2)) b = c2;
            else a = c1;
        }
        const double c = 0.5 * (a + b);
        if (exp_sse(c) < best_sse) best_sse = exp_sse(c), best_c = c;
    }
    r.exp_rate = best_c;
    r.rms_exponential = std::sqrt(best_sse / n);

    // a sigmoid(k (L - m)) + b; (a, b) linear given (k, m).
    auto sig_sse = [&](const Point<2>& p) {
        for (std::size_t i = 0; i < grid.size(); ++i) g[i] = sigmoid(p[0] * (grid[i] - p[1]));
        return detail::affine_fit(g, y);
    };
    const Box<2> box{{0.1, -0.5}, {100.0, 1.5}};
    Rng rng(kFitSeed);
    const auto best = multi_start<2>(sig_sse, latin_hypercube<2>(box, kSigmoidRestarts, rng), box);
    r.rms_sigmoid = std::sqrt(best.f / n);

    r.half_value = interpolate(grid, y, 0.5);
    auto near = [](double stat, double threshold) { return std::abs(stat - threshold) < kRegimeMargin * threshold; };
    const double nonlinearity = 1.0 - r.linear_r2;
    if (near(nonlinearity, 1.0 - kLinearR2)) {
        r.regime = Regime::Unclassified;
    } else if (r.linear_r2 >= kLinearR2) {
        r.regime = Regime::Linear;
    } else if (near(r.half_value, kExponentialHalfValue)) {
        r.regime = Regime::Unclassified;
    } else if (r.half_value <= kExponentialHalfValue) {
        r.regime = Regime::Exponential;
    } else {
        r.regime = Regime::SShape;
    }
    return r;
}

struct FitOptions {
    CurveOptions curves;
    // Observation length for metrics; 0 uses max timestamp + 1.
    std::int64_t horizon = 0;
    bool two_sigmoids = true;
};

struct FitReport {
    double B = std::numeric_limits<double>::quiet_NaN();
    double C = std::numeric_limits<double>::quiet_NaN();
    bool two_sigmoids = false;
    double B2 = std::numeric_limits<double>::quiet_NaN();
    double C2 = std::numeric_limits<double>::quiet_NaN();
    double split = std::numeric_limits<double>::quiet_NaN();
    double sigmoid_residual = 0;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double ks_D = 1.0;
    bool alpha_rejected = true;
    double rho_mean = 0;
    std::vector<double> rho_distribution;
    RegimeResult growth;
    std::vector<std::string> warnings;
};

inline FitReport fit_log(const EventLog& log, const FitOptions& opt = {}) {
    FitReport rep;
    const auto act = activation_curve(log, opt.horizon);
    auto add = [&](const std::vector<std::string>& w) { rep.warnings.insert(rep.warnings.end(), w.begin(), w.end()); };
    if (opt.two_sigmoids) {
        const auto two = fit_two_sigmoids(act);
        rep.two_sigmoids = two.plateau_found;
        rep.B = two.first.B;
        rep.C = two.first.C;
        rep.sigmoid_residual = two.first.residual;
        add(two.first.warnings);
        if (two.plateau_found) {
            rep.B2 = two.second.B;
            rep.C2 = two.second.C;
            rep.split = two.split;
            rep.sigmoid_residual = std::max(rep.sigmoid_residual, two.second.residual);
            add(two.second.warnings);
        }
    } else {
        const auto one = fit_sigmoid(act);
        rep.B = one.B;
        rep.C = one.C;
        rep.sigmoid_residual = one.residual;
        add(one.warnings);
    }

    const auto gaps = interevent_times(log);
    try {
        const auto pl = fit_powerlaw(gaps.positive);
        rep.alpha = pl.exponent;
        rep.ks_D = pl.ks_D;
        rep.alpha_rejected = pl.rejected;
        if (pl.rejected) rep.warnings.push_back("power-law fit rejected: KS D = " + std::to_string(pl.ks_D));
        if (pl.exponent <= 1 || pl.exponent > 3)
            rep.warnings.push_back("alpha = " + std::to_string(pl.exponent) + " is outside the typical range (1, 3]");
    } catch (const Error& e) {
        rep.warnings.push_back(std::string("interevent exponent not fitted: ") + e.what());
    }

    const auto rho = estimate_rho(log);
    rep.rho_mean = rho.mean;
    rep.rho_distribution = rho.distribution;

    auto curve_opt = opt.curves;
    if (opt.horizon > 0) curve_opt.observed_length = opt.horizon;
    const auto rc = rate_curves(log, curve_opt);
    const GrowthCurve growth{rc.L, rc.popularity};
    if (growth.size() >= 10) rep.growth = classify_growth(growth);
    else rep.warnings.push_back("growth curve has fewer than 10 points; regime unclassified");
    return rep;
}

} // namespace memepop
