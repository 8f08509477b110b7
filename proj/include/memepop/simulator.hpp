#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iterator>
#include <string>
#include <thread>
#include <vector>

#include "memepop/error.hpp"
#include "memepop/eventlog.hpp"
#include "memepop/metrics.hpp"
#include "memepop/powerlaw.hpp"
#include "memepop/rng.hpp"
#include "memepop/stats.hpp"

namespace memepop {

struct ModelParams {
    double B = 0.5;
    double C = 0.5;
    double alpha = 1.5;
    double rho = 0.5;
    double beta = 0.0;
    std::int64_t N_f = 1000;
    std::int64_t T = 1000;
    std::uint64_t seed = 0;
    // Users active at t = 0 start mid-stream: their first delay follows the
    // forward-recurrence law of the interevent distribution instead of a fresh gap.
    bool warm_start = true;

    double log_T() const { return std::log(static_cast<double>(T)); }
    double B_tilde() const { return B * log_T(); }
    double C_tilde() const { return C * log_T(); }

    // Throws DomainError naming the offending field; returns soft warnings.
    std::vector<std::string> validate() const {
        auto bad = [](const std::string& field, const std::string& why) { throw DomainError(field + ": " + why); };
        if (!(B > 0) || !std::isfinite(B)) bad("B", "must be > 0");
        if (!(C > 0 && C < 1)) bad("C", "must be in (0, 1)");
        if (!(alpha > 1) || !std::isfinite(alpha)) bad("alpha", "must be > 1");
        if (!(rho >= 0 && rho <= 1)) bad("rho", "must be in [0, 1]");
        if (!(beta >= 0) || !std::isfinite(beta)) bad("beta", "must be >= 0");
        if (N_f < 1) bad("N_f", "must be >= 1");
        if (T < 2) bad("T", "must be >= 2");
        std::vector<std::string> warnings;
        if (alpha > 3) warnings.push_back("alpha = " + std::to_string(alpha) + " is outside the typical range (1, 3]");
        return warnings;
    }
};

// Cumulative number of users activated by step t.
inline std::int64_t activation_quota(std::int64_t t, const ModelParams& p) {
    const double t_hat = static_cast<double>(t) * p.log_T() / static_cast<double>(p.T);
    return round_half_even(static_cast<double>(p.N_f) * sigmoid(p.B_tilde() * (t_hat - p.C_tilde())));
}

struct UserState {
    std::uint32_t index = 0;
    std::int64_t activation_time = -1;  // -1 while inactive
    std::int64_t next_action_time = -1;
    std::vector<std::uint64_t> repertoire;
    std::int64_t old_hops = 0;

    bool active() const noexcept { return activation_time >= 0; }
};

inline std::string user_token(std::uint32_t i) { return "u" + std::to_string(i); }
inline std::string meme_token(std::uint64_t i) { return "m" + std::to_string(i); }

// Full mutable state of one replica.
class World {
public:
    explicit World(const ModelParams& p)
        : params_(p), rng_(p.seed), law_(p.alpha, p.T), recurrence_(law_),
          agenda_(static_cast<std::size_t>(p.T)) {
        params_.validate();
        users_.resize(static_cast<std::size_t>(p.N_f));
        inactive_.resize(users_.size());
        for (std::uint32_t i = 0; i < users_.size(); ++i) {
            users_[i].index = i;
            inactive_[i] = i;
        }
    }

    const ModelParams& params() const noexcept { return params_; }
    const std::vector<UserState>& users() const noexcept { return users_; }
    std::int64_t activated() const noexcept { return static_cast<std::int64_t>(users_.size() - inactive_.size()); }
    std::uint64_t memes_created() const noexcept { return next_meme_; }

    // Advances one step. Random draws, in order: per new user (pool index, delay);
    // per acting user in scheduling order (branch if the repertoire is non-empty,
    // repertoire index if old, delay).
    std::vector<EventRecord> step(std::int64_t t) {
        if (t < 0 || t >= params_.T) throw DomainError("step: t out of range");
        const auto quota = activation_quota(t, params_);
        const auto prev = t == 0 ? 0 : activation_quota(t - 1, params_);
        const auto fresh = std::max<std::int64_t>(0, quota - prev);
        for (std::int64_t k = 0; k < fresh && !inactive_.empty(); ++k) {
            const auto pick = rng_.index(inactive_.size());
            const auto u = inactive_[pick];
            inactive_[pick] = inactive_.back();
            inactive_.pop_back();
            auto& user = users_[u];
            user.activation_time = t;
            const auto delay = (t == 0 && params_.warm_start) ? recurrence_.sample(rng_) : law_.sample(rng_);
            schedule(user, t + delay);
        }

        std::vector<EventRecord> out;
        auto acting = std::move(agenda_[static_cast<std::size_t>(t)]);
        agenda_[static_cast<std::size_t>(t)].clear();
        out.reserve(acting.size());
        for (auto u : acting) {
            auto& user = users_[u];
            std::uint64_t meme;
            bool old = false;
            if (!user.repertoire.empty()) {
                const double p_old = (1.0 - params_.rho) *
                                     (params_.beta > 0 ? std::pow(static_cast<double>(user.old_hops + 1), -params_.beta) : 1.0);
                old = rng_.uniform() < p_old;
            }
            if (old) {
                meme = user.repertoire[rng_.index(user.repertoire.size())];
                ++user.old_hops;
            } else {
                meme = next_meme_++;
                user.repertoire.push_back(meme);
            }
            out.push_back({user_token(u), meme_token(meme), t});
            schedule(user, t + law_.sample(rng_));
        }
        return out;
    }

private:
    void schedule(UserState& user, std::int64_t when) {
        user.next_action_time = when;
        if (when < params_.T) agenda_[static_cast<std::size_t>(when)].push_back(user.index);
    }

    ModelParams params_;
    Rng rng_;
    BoundedPowerLaw law_;
    ForwardRecurrence recurrence_;
    std::vector<UserState> users_;
    std::vector<std::uint32_t> inactive_;
    std::vector<std::vector<std::uint32_t>> agenda_;
    std::uint64_t next_meme_ = 0;
};

// Simulated logs keep absolute step times.
inline EventLog run(const ModelParams& p) {
    World world(p);
    std::vector<EventRecord> records;
    for (std::int64_t t = 0; t < p.T; ++t) {
        auto batch = world.step(t);
        std::move(batch.begin(), batch.end(), std::back_inserter(records));
    }
    if (records.empty()) throw DegenerateError("simulation produced no events");
    return EventLog::from_records(std::move(records), false);
}

inline constexpr std::size_t kReplicaGridPoints = 201;

struct MeanStdSeries {
    std::vector<double> mean, std;
};

struct ReplicaSummary {
    std::vector<double> L;
    MeanStdSeries P_F, P_W, P_N, popularity;
    std::size_t replicas = 0;
    std::vector<std::int64_t> t_peaks;
    std::vector<std::string> warnings;
};

struct ReplicaOptions {
    CurveOptions curves;
    std::size_t grid_points = kReplicaGridPoints;
    // 0 uses the hardware concurrency.
    unsigned threads = 0;
};

namespace detail {

struct ReplicaCurves {
    std::vector<double> pf, pw, pn, pop;
    std::int64_t t_peak = 0;
};

inline ReplicaCurves replica_curves(const ModelParams& p, const ReplicaOptions& opt, const std::vector<double>& grid) {
    auto curve_opt = opt.curves;
    curve_opt.observed_length = p.T;
    const auto c = rate_curves(run(p), curve_opt);
    return {resample(c.L, c.P_F, grid), resample(c.L, c.P_W, grid), resample(c.L, c.P_N, grid),
            resample(c.L, c.popularity, grid), c.t_peak};
}

inline MeanStdSeries reduce(const std::vector<ReplicaCurves>& reps, std::vector<double> ReplicaCurves::*field) {
    const std::size_t m = (reps.front().*field).size();
    MeanStdSeries out;
    out.mean.resize(m);
    out.std.resize(m);
    std::vector<double> column(reps.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 0; r < reps.size(); ++r) column[r] = (reps[r].*field)[i];
        const auto ms = mean_std(column);
        out.mean[i] = ms.mean;
        out.std[i] = ms.std;
    }
    return out;
}

} // namespace detail

// Replica k runs with seed base_seed + k. Replicas may run concurrently; the
// reduction always walks them in seed order.
inline ReplicaSummary run_replicas(ModelParams p, std::size_t n_replicas, std::uint64_t base_seed,
                                   const ReplicaOptions& opt = {}) {
    if (n_replicas < 1) throw DomainError("replicas: must be >= 1");
    ReplicaSummary summary;
    summary.warnings = p.validate();
    summary.L = uniform_grid(opt.grid_points);
    std::vector<detail::ReplicaCurves> reps(n_replicas);
    auto work = [&](std::size_t k) {
        auto q = p;
        q.seed = base_seed + k;
        reps[k] = detail::replica_curves(q, opt, summary.L);
    };
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_replicas));
    if (threads <= 1) {
        for (std::size_t k = 0; k < n_replicas; ++k) work(k);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = w; k < n_replicas; k += threads) work(k);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    summary.replicas = n_replicas;
    summary.P_F = detail::reduce(reps, &detail::ReplicaCurves::pf);
    summary.P_W = detail::reduce(reps, &detail::ReplicaCurves::pw);
    summary.P_N = detail::reduce(reps, &detail::ReplicaCurves::pn);
    summary.popularity = detail::reduce(reps, &detail::ReplicaCurves::pop);
    for (const auto& r : reps) summary.t_peaks.push_back(r.t_peak);
    return summary;
}

} // namespace memepop
