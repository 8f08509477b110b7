#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "memepop/error.hpp"
#include "memepop/eventlog.hpp"
#include "memepop/powerlaw.hpp"
#include "memepop/stats.hpp"

namespace memepop {

struct MemeTimeline {
    std::string meme_id;
    std::vector<std::int64_t> action_times;

    std::int64_t birth() const { return action_times.front(); }
    std::int64_t last_forward() const { return action_times.back(); }
};

// One timeline per meme, ordered by first appearance in the log.
inline std::vector<MemeTimeline> meme_timelines(const EventLog& log) {
    std::vector<MemeTimeline> out;
    std::unordered_map<std::string_view, std::size_t> index;
    for (const auto& r : log.records()) {
        auto [it, fresh] = index.try_emplace(r.meme_id, out.size());
        if (fresh) out.push_back({r.meme_id, {}});
        out[it->second].action_times.push_back(r.timestamp);
    }
    for (auto& m : out) std::sort(m.action_times.begin(), m.action_times.end());
    return out;
}

// Per-step counts over t = 0..horizon-1.
struct RawSeries {
    std::vector<std::int64_t> F, W, S, N;

    std::size_t length() const noexcept { return F.size(); }
};

inline RawSeries count_events(const std::vector<MemeTimeline>& memes, std::int64_t horizon) {
    std::int64_t latest = -1;
    for (const auto& m : memes) latest = std::max(latest, m.last_forward());
    if (horizon < latest + 2)
        throw DomainError("horizon " + std::to_string(horizon) + " too small; need at least " +
                          std::to_string(latest + 2));
    const auto n = static_cast<std::size_t>(horizon);
    RawSeries s;
    s.F.assign(n, 0);
    s.W.assign(n, 0);
    std::vector<std::int64_t> alive_delta(n + 1, 0);
    // Distinct steps with an action, per meme; alive-and-idle = alive - active.
    std::vector<std::int64_t> active(n, 0);
    for (const auto& m : memes) {
        for (auto t : m.action_times) ++s.F[static_cast<std::size_t>(t)];
        ++s.W[static_cast<std::size_t>(m.last_forward() + 1)];
        ++alive_delta[static_cast<std::size_t>(m.birth())];
        --alive_delta[static_cast<std::size_t>(m.last_forward() + 1)];
        std::int64_t prev = -1;
        for (auto t : m.action_times) {
            if (t != prev) ++active[static_cast<std::size_t>(t)];
            prev = t;
        }
    }
    s.S.assign(n, 0);
    s.N.assign(n, 0);
    std::int64_t alive = 0;
    for (std::size_t t = 0; t < n; ++t) {
        alive += alive_delta[t];
        s.S[t] = alive - active[t];
        s.N[t] = s.S[t] + s.F[t];
    }
    return s;
}

enum class PeakSignal { Popularity, Ratio };

struct CurveOptions {
    // 0 selects max(3, T_data / 50) rounded up to odd; 1 disables smoothing.
    std::size_t smoothing_window = 0;
    double peak_cap = 0.8;
    PeakSignal peak_signal = PeakSignal::Popularity;
    // Observed length T_data; 0 means raw length - 1 (the last step only holds terminal exclusions).
    std::int64_t observed_length = 0;
};

inline std::size_t resolve_window(std::size_t requested, std::int64_t observed_length) {
    if (requested != 0) return requested;
    std::size_t w = std::max<std::size_t>(3, static_cast<std::size_t>(observed_length / 50));
    return w % 2 == 0 ? w + 1 : w;
}

struct RateCurves {
    std::vector<std::int64_t> F, W, S, N;
    std::int64_t t_peak = 0;
    std::vector<double> L, P_F, P_W, P_N;
    // Smoothed N(t) on [0, t_peak] divided by its maximum there.
    std::vector<double> popularity;
    std::size_t window = 1;
};

inline RateCurves normalize_curves(const RawSeries& raw, const CurveOptions& opt = {}) {
    if (raw.length() == 0) throw DomainError("normalize_curves: empty series");
    const std::int64_t observed =
        opt.observed_length > 0 ? std::min<std::int64_t>(opt.observed_length, static_cast<std::int64_t>(raw.length()))
                                : std::max<std::int64_t>(1, static_cast<std::int64_t>(raw.length()) - 1);
    const auto n = static_cast<std::size_t>(observed);

    std::vector<double> pF(n), pW(n), pN(n), pop(n);
    bool any = false;
    for (std::size_t t = 0; t < n; ++t) {
        const double den = static_cast<double>(raw.F[t] + raw.S[t] + raw.W[t]);
        if (den > 0) {
            any = true;
            pF[t] = static_cast<double>(raw.F[t]) / den;
            pW[t] = static_cast<double>(raw.W[t]) / den;
            pN[t] = static_cast<double>(raw.S[t] + raw.W[t]) / den;
        }
        pop[t] = static_cast<double>(raw.N[t]);
    }
    if (!any) throw DegenerateError("degenerate log: F + S + W is zero at every step");

    RateCurves c;
    c.F = raw.F;
    c.W = raw.W;
    c.S = raw.S;
    c.N = raw.N;
    c.window = resolve_window(opt.smoothing_window, observed);
    const auto smooth_pop = moving_average(pop, c.window);
    const auto& signal = opt.peak_signal == PeakSignal::Popularity ? smooth_pop : moving_average(pN, c.window);

    // L must run from 0 to 1, so the peak is searched from t = 1.
    const auto cap = static_cast<std::size_t>(std::max(1.0, std::floor(opt.peak_cap * static_cast<double>(observed))));
    const std::size_t last = std::min(cap, n > 1 ? n - 1 : std::size_t{1});
    std::size_t peak = 1;
    for (std::size_t t = 1; t <= last && t < signal.size(); ++t)
        if (signal[t] > signal[peak]) peak = t;
    c.t_peak = static_cast<std::int64_t>(peak);

    const std::size_t m = peak + 1;
    auto take = [&](const std::vector<double>& v) {
        std::vector<double> out(m, 0.0);
        for (std::size_t i = 0; i < m && i < v.size(); ++i) out[i] = v[i];
        double mx = *std::max_element(out.begin(), out.end());
        if (mx > 0)
            for (auto& x : out) x /= mx;
        return out;
    };
    c.P_F = take(pF);
    c.P_W = take(pW);
    c.P_N = take(pN);
    c.popularity = take(smooth_pop);
    c.L.resize(m);
    for (std::size_t t = 0; t < m; ++t) c.L[t] = static_cast<double>(t) / static_cast<double>(peak);
    return c;
}

// Observation window length for metrics: t runs over [0, max timestamp].
inline std::int64_t observed_length(const EventLog& log) { return log.max_timestamp() + 1; }

inline RateCurves rate_curves(const EventLog& log, CurveOptions opt = {}) {
    if (log.empty()) throw DomainError("rate_curves: empty log");
    const auto len = opt.observed_length > 0 ? std::max(opt.observed_length, observed_length(log)) : observed_length(log);
    opt.observed_length = len;
    return normalize_curves(count_events(meme_timelines(log), len + 1), opt);
}

struct ActivationCurve {
    std::vector<double> L;
    std::vector<double> P_A;
    // Observation length T_data; L = t / T_data.
    std::int64_t horizon = 0;
};

inline ActivationCurve activation_curve(const EventLog& log, std::int64_t horizon = 0) {
    if (log.empty()) throw DomainError("activation_curve: empty log");
    const auto len = std::max(horizon, observed_length(log));
    std::vector<std::int64_t> first_count(static_cast<std::size_t>(len), 0);
    std::unordered_set<std::string_view> seen;
    for (const auto& r : log.records())
        if (seen.insert(r.user_id).second) ++first_count[static_cast<std::size_t>(r.timestamp)];
    ActivationCurve a;
    a.horizon = len;
    a.L.resize(first_count.size());
    a.P_A.resize(first_count.size());
    std::int64_t acc = 0;
    const double users = static_cast<double>(log.user_count());
    for (std::size_t t = 0; t < first_count.size(); ++t) {
        acc += first_count[t];
        a.L[t] = static_cast<double>(t) / static_cast<double>(len);
        a.P_A[t] = static_cast<double>(acc) / users;
    }
    return a;
}

struct IntereventSample {
    std::vector<std::int64_t> positive;
    std::size_t zero_count = 0;
};

// Gaps between consecutive actions of each user, pooled in log order.
inline IntereventSample interevent_times(const EventLog& log) {
    IntereventSample s;
    std::unordered_map<std::string_view, std::int64_t> last;
    for (const auto& r : log.records()) {
        auto it = last.find(r.user_id);
        if (it != last.end()) {
            const auto gap = r.timestamp - it->second;
            if (gap == 0) ++s.zero_count;
            else s.positive.push_back(gap);
            it->second = r.timestamp;
        } else {
            last.emplace(r.user_id, r.timestamp);
        }
    }
    return s;
}

using Histogram = std::map<std::int64_t, std::int64_t>;

template <class Range>
Histogram histogram(const Range& values) {
    Histogram h;
    for (auto v : values) ++h[v];
    return h;
}

inline Histogram meme_age_distribution(const EventLog& log) {
    Histogram h;
    for (const auto& m : meme_timelines(log)) ++h[m.last_forward() - m.birth()];
    return h;
}

struct IntervalDistribution {
    std::vector<std::int64_t> gaps;
    std::size_t zero_count = 0;
    // Absent when the sample is too small or degenerate; see note.
    std::optional<PowerLawFit> gamma;
    std::string note;
};

inline IntervalDistribution meme_interval_distribution(const EventLog& log) {
    IntervalDistribution d;
    for (const auto& m : meme_timelines(log))
        for (std::size_t i = 1; i < m.action_times.size(); ++i) {
            const auto gap = m.action_times[i] - m.action_times[i - 1];
            if (gap == 0) ++d.zero_count;
            else d.gaps.push_back(gap);
        }
    try {
        d.gamma = fit_powerlaw(d.gaps);
    } catch (const DegenerateError& e) {
        d.note = std::string("degenerate: ") + e.what();
    } catch (const DomainError& e) {
        d.note = std::string("not fitted: ") + e.what();
    }
    return d;
}

struct RhoStats {
    std::map<std::string, double> per_user;
    // Per-user values in user-id order.
    std::vector<double> distribution;
    // Total first touches over total events.
    double event_weighted_mean = 0;
};

inline RhoStats rho_per_user(const EventLog& log) {
    struct Tally {
        std::int64_t novel = 0, total = 0;
    };
    std::map<std::string, Tally> tallies;
    std::unordered_set<std::string> touched;
    std::int64_t novel = 0;
    for (const auto& r : log.records()) {
        auto& t = tallies[r.user_id];
        ++t.total;
        if (touched.insert(r.user_id + '\x1f' + r.meme_id).second) {
            ++t.novel;
            ++novel;
        }
    }
    RhoStats s;
    for (const auto& [user, t] : tallies) {
        const double v = static_cast<double>(t.novel) / static_cast<double>(t.total);
        s.per_user.emplace(user, v);
        s.distribution.push_back(v);
    }
    if (!log.empty()) s.event_weighted_mean = static_cast<double>(novel) / static_cast<double>(log.size());
    return s;
}

} // namespace memepop
