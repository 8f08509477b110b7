#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "memepop/error.hpp"
#include "memepop/stats.hpp"

namespace memepop {

struct AnalyticParams {
    double rho = 0.5;
    double N_i = 1000;
    double B_tilde = 0;
    double C_tilde = 0;
    double alpha = 1.5;
    double T = 1000;
    double dt = 0.01;

    static AnalyticParams from_normalized(double B, double C, double alpha, double rho, double T = 1000,
                                          double N_i = 1000, double dt = 0.01) {
        const double lt = std::log(T);
        return {rho, N_i, B * lt, C * lt, alpha, T, dt};
    }

    double T_hat() const { return std::log(T); }

    void validate() const {
        if (!(T > 1)) throw DomainError("T: must be > 1");
        if (!(dt > 0)) throw DomainError("dt: must be > 0");
        if (!(B_tilde > 0)) throw DomainError("B: must be > 0");
        if (!(rho >= 0 && rho <= 1)) throw DomainError("rho: must be in [0, 1]");
        if (!(N_i > 0)) throw DomainError("N_i: must be > 0");
        if (!std::isfinite(alpha)) throw DomainError("alpha: must be finite");
    }
};

struct GrowthCurve {
    std::vector<double> L;
    std::vector<double> value;

    std::size_t size() const noexcept { return L.size(); }
};

// Sigmoid user inflow scaled by the new-meme probability.
inline double inflow(double t_hat, const AnalyticParams& p) {
    return p.rho * p.N_i * sigmoid(p.B_tilde * (t_hat - p.C_tilde));
}

// Integral of the sigmoid over [0, t_hat] times B_tilde:
//   B t - log(1 + e^{B C}) + log(1 + e^{B (C - t)})  ==  log1p(sigmoid(-B C) * expm1(B t)).
inline double sigmoid_integral_bracket(double t_hat, const AnalyticParams& p) {
    const double bt = p.B_tilde * t_hat;
    if (bt < 700) return std::log1p(sigmoid(-p.B_tilde * p.C_tilde) * std::expm1(bt));
    return softplus(p.B_tilde * (t_hat - p.C_tilde)) - softplus(-p.B_tilde * p.C_tilde);
}

inline void check_death_domain(double t_hat, const AnalyticParams& p) {
    if (!(t_hat >= 0)) throw DomainError("death_term: t_hat must be >= 0");
    if (!(t_hat < p.T_hat())) throw DomainError("death_term: t_hat must be < log(T) (singular at log(T))");
}

inline double death_term(double t_hat, const AnalyticParams& p) {
    check_death_domain(t_hat, p);
    return p.rho * p.N_i / p.B_tilde * sigmoid_integral_bracket(t_hat, p) * std::pow(p.T_hat() - t_hat, -p.alpha);
}

namespace detail {

// 15-point Gauss-Kronrod rule on [a, b]; returns (K15 estimate, |K15 - G7|).
template <class F>
std::pair<double, double> gauss_kronrod15(F&& f, double a, double b) {
    static constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.0};
    static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double k = wk[7] * fc, g = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double s = f(c - h * xk[i]) + f(c + h * xk[i]);
        k += wk[i] * s;
        if (i % 2 == 1) g += wg[i / 2] * s;
    }
    return {k * h, std::abs((k - g) * h)};
}

template <class F>
double adaptive_gk(F&& f, double a, double b, double rel_tol, int depth = 0) {
    auto [est, err] = gauss_kronrod15(f, a, b);
    if (err <= rel_tol * std::abs(est) || err < 1e-300 || depth >= 40) return est;
    const double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, rel_tol, depth + 1) + adaptive_gk(f, m, b, rel_tol, depth + 1);
}

} // namespace detail

// Same quantity as death_term, with the inflow integral done by adaptive quadrature.
inline double death_term_quadrature(double t_hat, const AnalyticParams& p, double rel_tol = 1e-12) {
    check_death_domain(t_hat, p);
    if (t_hat == 0) return 0.0;
    const double integral = detail::adaptive_gk([&](double s) { return inflow(s, p); }, 0.0, t_hat, rel_tol);
    return integral * std::pow(p.T_hat() - t_hat, -p.alpha);
}

inline double growth_rate(double t_hat, const AnalyticParams& p) { return inflow(t_hat, p) - death_term(t_hat, p); }

struct AnalyticSolution {
    GrowthCurve curve;                 // normalized, L in [0, 1]
    std::vector<double> t_hat;         // integration grid actually used
    std::vector<double> N;             // unnormalized population
    bool stopped_at_decrease = false;  // false: stopped at the singularity guard
    std::vector<std::string> warnings;
};

// Forward Euler on the t_hat grid from N(0) = 0. Stops before the first negative
// growth rate or at the guard log(T) - 10 dt.
inline AnalyticSolution integrate(const AnalyticParams& p) {
    p.validate();
    AnalyticSolution s;
    const double t_end = p.T_hat() * (1.0 - 10.0 * p.dt / p.T_hat());
    double n = 0;
    s.t_hat.push_back(0.0);
    s.N.push_back(0.0);
    for (std::int64_t k = 0;; ++k) {
        const double th = static_cast<double>(k) * p.dt;
        if (th >= t_end) break;
        const double rate = growth_rate(th, p);
        if (!std::isfinite(rate)) throw Error("integration: non-finite growth rate at t_hat = " + std::to_string(th));
        if (rate < 0) {
            s.stopped_at_decrease = true;
            break;
        }
        n += rate * p.dt;
        if (!std::isfinite(n)) throw Error("integration: non-finite N at t_hat = " + std::to_string(th + p.dt));
        s.t_hat.push_back(static_cast<double>(k + 1) * p.dt);
        s.N.push_back(n);
    }
    const double last = s.t_hat.back();
    const double peak = *std::max_element(s.N.begin(), s.N.end());
    if (s.t_hat.size() < 2) throw Error("integration: no step taken (t_hat range empty)");
    if (peak <= 0) s.warnings.push_back("analytic curve is identically zero (rho = 0)");
    s.curve.L.reserve(s.N.size());
    s.curve.value.reserve(s.N.size());
    for (std::size_t i = 0; i < s.N.size(); ++i) {
        s.curve.L.push_back(s.t_hat[i] / last);
        s.curve.value.push_back(peak > 0 ? s.N[i] / peak : 0.0);
    }
    return s;
}

inline constexpr std::size_t kCompareGridPoints = 200;

// Sup distance between two growth curves after resampling on a uniform grid and
// rescaling each to [0, 1].
inline double compare(const GrowthCurve& a, const GrowthCurve& b, std::size_t grid_points = kCompareGridPoints) {
    if (a.size() < 2 || b.size() < 2) throw DomainError("compare: curves need at least 2 points");
    const auto grid = uniform_grid(grid_points);
    auto ya = min_max_normalize(resample(a.L, a.value, grid));
    auto yb = min_max_normalize(resample(b.L, b.value, grid));
    double d = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) d = std::max(d, std::abs(ya[i] - yb[i]));
    return d;
}

} // namespace memepop
