#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "memepop/error.hpp"
#include "memepop/rng.hpp"

namespace memepop {

// Discrete power law p(k) ~ k^-alpha on {1..tau_max}.
class BoundedPowerLaw {
public:
    BoundedPowerLaw(double alpha, std::int64_t tau_max) : alpha_(alpha) {
        if (tau_max < 1) throw DomainError("tau_max must be >= 1");
        if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
        pmf_.resize(static_cast<std::size_t>(tau_max));
        double z = 0;
        for (std::int64_t k = 1; k <= tau_max; ++k) z += std::pow(static_cast<double>(k), -alpha);
        cdf_.resize(pmf_.size());
        double acc = 0;
        for (std::size_t i = 0; i < pmf_.size(); ++i) {
            pmf_[i] = std::pow(static_cast<double>(i + 1), -alpha) / z;
            acc += pmf_[i];
            cdf_[i] = acc;
        }
        cdf_.back() = 1.0;
    }

    double alpha() const noexcept { return alpha_; }
    std::int64_t tau_max() const noexcept { return static_cast<std::int64_t>(pmf_.size()); }
    double pmf(std::int64_t k) const { return k < 1 || k > tau_max() ? 0.0 : pmf_[static_cast<std::size_t>(k - 1)]; }
    double cdf(std::int64_t k) const {
        if (k < 1) return 0.0;
        if (k >= tau_max()) return 1.0;
        return cdf_[static_cast<std::size_t>(k - 1)];
    }
    const std::vector<double>& cdf_table() const noexcept { return cdf_; }

    // Inverse CDF: smallest k with cdf(k) > u.
    std::int64_t sample(Rng& rng) const {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::int64_t>(it - cdf_.begin()) + 1;
    }

    double mean() const {
        double m = 0;
        for (std::size_t i = 0; i < pmf_.size(); ++i) m += static_cast<double>(i + 1) * pmf_[i];
        return m;
    }

private:
    double alpha_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

// Delay until the next renewal seen from a random time in a stationary stream:
// P(d = k) ~ P(tau >= k), k = 1..tau_max.
class ForwardRecurrence {
public:
    explicit ForwardRecurrence(const BoundedPowerLaw& law) {
        const auto n = static_cast<std::size_t>(law.tau_max());
        cdf_.resize(n);
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += 1.0 - law.cdf(static_cast<std::int64_t>(i));
            cdf_[i] = acc;
        }
        for (auto& c : cdf_) c /= acc;
        cdf_.back() = 1.0;
    }

    std::int64_t sample(Rng& rng) const {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::int64_t>(it - cdf_.begin()) + 1;
    }

private:
    std::vector<double> cdf_;
};

inline std::int64_t sample_interevent(double alpha, std::int64_t tau_max, Rng& rng) {
    if (!(alpha > 1)) throw DomainError("alpha must be > 1");
    return BoundedPowerLaw(alpha, tau_max).sample(rng);
}

} // namespace memepop

namespace memepop {

struct PowerLawFit {
    double exponent = 0;
    double ks_D = 0;
    bool rejected = false;
    std::int64_t x_max = 0;
    std::size_t n = 0;
};

inline constexpr double kPowerLawKsThreshold = 0.1;

// Discrete MLE with x_min = 1 and support bounded by the observed maximum.
inline PowerLawFit fit_powerlaw(const std::vector<std::int64_t>& samples) {
    if (samples.size() < 50) throw DomainError("fit_powerlaw needs at least 50 samples");
    std::int64_t lo = samples.front(), hi = samples.front();
    double sum_log = 0;
    for (auto x : samples) {
        if (x < 1) throw DomainError("fit_powerlaw samples must be >= 1");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum_log += std::log(static_cast<double>(x));
    }
    if (lo == hi) throw DegenerateError("all samples are equal");
    const double n = static_cast<double>(samples.size());
    const double target = sum_log / n;

    std::vector<double> logk(static_cast<std::size_t>(hi));
    for (std::size_t i = 0; i < logk.size(); ++i) logk[i] = std::log(static_cast<double>(i + 1));
    // Mean of ln k under the fitted law; strictly decreasing in the exponent.
    auto mean_log = [&](double a) {
        double z = 0, m = 0;
        for (double lk : logk) {
            const double w = std::exp(-a * lk);
            z += w;
            m += w * lk;
        }
        return m / z;
    };
    double a_lo = -10, a_hi = 20;
    for (int it = 0; it < 200 && a_hi - a_lo > 1e-13; ++it) {
        const double mid = 0.5 * (a_lo + a_hi);
        if (mean_log(mid) > target) a_lo = mid;
        else a_hi = mid;
    }
    PowerLawFit fit;
    fit.exponent = 0.5 * (a_lo + a_hi);
    fit.x_max = hi;
    fit.n = samples.size();

    std::vector<std::size_t> counts(static_cast<std::size_t>(hi) + 1, 0);
    for (auto x : samples) ++counts[static_cast<std::size_t>(x)];
    BoundedPowerLaw law(fit.exponent, hi);
    double emp = 0, d = 0;
    for (std::int64_t k = 1; k <= hi; ++k) {
        emp += static_cast<double>(counts[static_cast<std::size_t>(k)]) / n;
        d = std::max(d, std::abs(emp - law.cdf(k)));
    }
    fit.ks_D = std::min(1.0, d);
    fit.rejected = fit.ks_D > kPowerLawKsThreshold;
    return fit;
}

} // namespace memepop
