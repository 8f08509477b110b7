// Command-line driver: analyze, simulate, solve, fit, compare, generate-fixture.
// Each command writes into its own run directory: outputs, manifest.json, warnings.txt.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "memepop/memepop.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace memepop;

namespace {

struct Run {
    std::string command;
    fs::path dir;
    std::vector<std::string> argv;
    json config = json::object();
    json seeds = json::array();
    json inputs = json::array();
    json outputs = json::array();
    json results = json::object();
    std::vector<std::string> warnings;

    template <class Writer>
    void emit(const std::string& name, Writer&& writer) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot open " + (dir / name).string() + " for writing");
        writer(out);
        if (!out) throw Error("write failed: " + (dir / name).string());
        outputs.push_back(name);
    }

    void warn(const std::vector<std::string>& ws) { warnings.insert(warnings.end(), ws.begin(), ws.end()); }

    void finish() {
        {
            std::ofstream out(dir / "warnings.txt", std::ios::binary);
            for (const auto& w : warnings) out << w << '\n';
        }
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        json m;
        m["command"] = command;
        m["argv"] = argv;
        m["config"] = config;
        m["seeds"] = seeds;
        m["inputs"] = inputs;
        m["outputs"] = outputs;
        m["results"] = results;
        m["tool_version"] = kVersion;
        m["rng"] = std::string(Rng::kAlgorithm);
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << m.dump(2) << '\n';
    }
};

Run start(const std::string& command, const std::string& dir, const std::vector<std::string>& argv) {
    Run r;
    r.command = command;
    r.dir = dir;
    r.argv = argv;
    fs::create_directories(r.dir);
    return r;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path + ": cannot open");
    return in;
}

template <class F>
auto with_context(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

EventLog load_log(const std::string& path, bool rebase) {
    auto in = open_input(path);
    return with_context(path, [&] { return parse_log(in, rebase); });
}

ConfigMap load_config(const std::string& path) {
    auto in = open_input(path);
    return with_context(path, [&] { return parse_config(in); });
}

GrowthCurve load_curve(const std::string& path) {
    auto in = open_input(path);
    return with_context(path, [&] { return read_growth(in); });
}

json params_json(const ModelParams& p, std::size_t replicas) {
    return {{"B", p.B},           {"C", p.C},   {"alpha", p.alpha}, {"rho", p.rho},
            {"beta", p.beta},     {"N_f", p.N_f}, {"T", p.T},       {"seed", p.seed},
            {"replicas", replicas}, {"warm_start", p.warm_start}};
}

json analytic_json(const AnalyticParams& a) {
    return {{"B", a.B_tilde / a.T_hat()}, {"C", a.C_tilde / a.T_hat()}, {"alpha", a.alpha}, {"rho", a.rho},
            {"N_i", a.N_i},               {"T", a.T},                   {"dt", a.dt},       {"time_axis", "t_hat"}};
}

struct CurveFlags {
    std::size_t window = 0;
    double peak_cap = 0.8;
    std::string peak_signal = "popularity";

    CurveOptions options() const {
        CurveOptions o;
        o.smoothing_window = window;
        o.peak_cap = peak_cap;
        o.peak_signal = peak_signal == "ratio" ? PeakSignal::Ratio : PeakSignal::Popularity;
        return o;
    }

    json to_json() const { return {{"smoothing_window", window}, {"peak_cap", peak_cap}, {"peak_signal", peak_signal}}; }
};

void add_curve_flags(CLI::App* cmd, CurveFlags& f) {
    cmd->add_option("--window", f.window, "Moving-average window for the peak search (0 = max(3, T/50) odd, 1 = off)");
    cmd->add_option("--peak-cap", f.peak_cap, "Search the peak in t <= cap * T_data")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--peak-signal", f.peak_signal, "Signal whose smoothed maximum defines L = 1")
        ->check(CLI::IsMember({"popularity", "ratio"}));
}

void write_report(Run& run, const FitReport& rep) {
    run.emit("fit_report.txt", [&](std::ostream& o) { write_fit_report_kv(rep, o); });
    run.emit("fit_report.csv", [&](std::ostream& o) { write_fit_report_csv(rep, o); });
    run.warn(rep.warnings);
    run.results["regime"] = to_string(rep.growth.regime);
}

int cmd_analyze(const std::string& log_path, const std::string& out_dir, bool fit, bool keep_origin,
                std::int64_t horizon, const CurveFlags& flags, const std::vector<std::string>& argv) {
    auto run = start("analyze", out_dir, argv);
    const auto log = load_log(log_path, !keep_origin);
    run.inputs.push_back(log_path);
    run.config = {{"fit", fit}, {"rebase", !keep_origin}, {"horizon", horizon}, {"curves", flags.to_json()}};

    auto opt = flags.options();
    opt.observed_length = horizon;
    const auto curves = rate_curves(log, opt);
    const auto act = activation_curve(log, horizon);
    const auto gaps = interevent_times(log);
    const auto intervals = meme_interval_distribution(log);
    const auto rho = rho_per_user(log);

    run.emit("counts.csv", [&](std::ostream& o) { write_counts(curves, o); });
    run.emit("curves.csv", [&](std::ostream& o) { write_rate_curves(curves, o); });
    run.emit("growth.csv", [&](std::ostream& o) { write_growth(GrowthCurve{curves.L, curves.popularity}, o); });
    run.emit("activation.csv", [&](std::ostream& o) { write_activation(act, o); });
    run.emit("interevent.csv", [&](std::ostream& o) { write_histogram(histogram(gaps.positive), o); });
    run.emit("meme_age.csv", [&](std::ostream& o) { write_histogram(meme_age_distribution(log), o); });
    run.emit("meme_interval.csv", [&](std::ostream& o) { write_histogram(histogram(intervals.gaps), o); });
    run.emit("rho.csv", [&](std::ostream& o) {
        o << "user_id,rho\n";
        for (const auto& [u, v] : rho.per_user) o << u << ',' << real(v) << '\n';
    });

    run.results = {{"records", log.size()},        {"users", log.user_count()},
                   {"memes", log.meme_count()},    {"span", log.span()},
                   {"t_peak", curves.t_peak},      {"smoothing_window", curves.window},
                   {"rho_mean", rho.event_weighted_mean}, {"zero_interevent_gaps", gaps.zero_count}};
    if (intervals.gamma) {
        run.results["gamma"] = intervals.gamma->exponent;
        run.results["gamma_ks_D"] = intervals.gamma->ks_D;
    } else {
        run.warn({"meme interval exponent unreported: " + intervals.note});
    }
    if (fit) {
        FitOptions fo;
        fo.curves = flags.options();
        fo.horizon = horizon;
        write_report(run, fit_log(log, fo));
    }
    run.finish();
    return 0;
}

int cmd_fit(const std::string& log_path, const std::string& out_dir, bool keep_origin, std::int64_t horizon,
            bool single, const CurveFlags& flags, const std::vector<std::string>& argv) {
    auto run = start("fit", out_dir, argv);
    const auto log = load_log(log_path, !keep_origin);
    run.inputs.push_back(log_path);
    run.config = {{"rebase", !keep_origin}, {"horizon", horizon}, {"two_sigmoids", !single}, {"curves", flags.to_json()}};
    FitOptions fo;
    fo.curves = flags.options();
    fo.horizon = horizon;
    fo.two_sigmoids = !single;
    write_report(run, fit_log(log, fo));
    run.finish();
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, unsigned threads,
                 const CurveFlags& flags, const std::vector<std::string>& argv) {
    const auto sc = simulation_config(load_config(config_path));
    auto run = start("simulate", out_dir, argv);
    run.inputs.push_back(config_path);
    run.config = params_json(sc.params, sc.replicas);
    run.config["curves"] = flags.to_json();
    for (std::size_t k = 0; k < sc.replicas; ++k) run.seeds.push_back(sc.params.seed + k);

    const auto log = memepop::run(sc.params);
    run.emit("events.csv", [&](std::ostream& o) { write_log(log, o); });
    ReplicaOptions ro;
    ro.curves = flags.options();
    ro.threads = threads;
    const auto summary = run_replicas(sc.params, sc.replicas, sc.params.seed, ro);
    run.warn(summary.warnings);
    run.emit("summary.csv", [&](std::ostream& o) { write_summary(summary, o); });
    const auto growth = summary_growth(summary);
    run.emit("growth.csv", [&](std::ostream& o) { write_growth(growth, o); });
    const auto regime = classify_growth(growth);
    run.results = {{"records", log.size()},
                   {"memes", log.meme_count()},
                   {"users", log.user_count()},
                   {"t_peaks", summary.t_peaks},
                   {"regime", to_string(regime.regime)},
                   {"linear_r2", regime.linear_r2},
                   {"half_value", regime.half_value}};
    run.finish();
    return 0;
}

int cmd_solve(const std::string& config_path, const std::string& out_dir, const std::vector<std::string>& argv) {
    const auto points = solve_configs(load_config(config_path));
    auto run = start("solve", out_dir, argv);
    run.inputs.push_back(config_path);
    json pts = json::array();
    for (const auto& p : points) pts.push_back(analytic_json(p));
    run.config = {{"integrator", "forward_euler"}, {"points", pts}};

    auto solve_one = [&](const AnalyticParams& p, const std::string& name) {
        const auto s = integrate(p);
        run.warn(s.warnings);
        run.emit(name, [&](std::ostream& o) { write_growth(s.curve, o); });
        return json{{"file", name},
                    {"t_hat_end", s.t_hat.back()},
                    {"stopped_at_decrease", s.stopped_at_decrease},
                    {"regime", s.warnings.empty() ? to_string(classify_growth(s.curve).regime) : "unclassified"}};
    };
    if (points.size() == 1) {
        run.results = solve_one(points.front(), "curve.csv");
    } else {
        json index = json::array();
        std::ostringstream csv;
        csv << "file,B,C,alpha,rho,N_i,T,dt\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::ostringstream name;
            name << "curve_" << std::setw(3) << std::setfill('0') << i << ".csv";
            index.push_back(solve_one(points[i], name.str()));
            const auto& p = points[i];
            csv << name.str() << ',' << real(p.B_tilde / p.T_hat()) << ',' << real(p.C_tilde / p.T_hat()) << ','
                << real(p.alpha) << ',' << real(p.rho) << ',' << real(p.N_i) << ',' << real(p.T) << ',' << real(p.dt)
                << '\n';
        }
        run.emit("index.csv", [&](std::ostream& o) { o << csv.str(); });
        run.results["sweep"] = index;
    }
    run.finish();
    return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, double threshold, const std::string& out_dir,
                const std::vector<std::string>& argv) {
    const auto a = load_curve(a_path), b = load_curve(b_path);
    const double d = compare(a, b);
    const bool pass = d <= threshold;
    std::cout << "D = " << real(d) << '\n' << "threshold = " << real(threshold) << '\n'
              << "result = " << (pass ? "pass" : "fail") << '\n';
    if (!out_dir.empty()) {
        auto run = start("compare", out_dir, argv);
        run.inputs = {a_path, b_path};
        run.config = {{"threshold", threshold}, {"grid_points", kCompareGridPoints}};
        run.emit("compare.txt", [&](std::ostream& o) {
            o << "D = " << real(d) << '\n' << "threshold = " << real(threshold) << '\n'
              << "result = " << (pass ? "pass" : "fail") << '\n';
        });
        run.results = {{"D", d}, {"pass", pass}};
        run.finish();
    }
    return 0;
}

int cmd_fixture(const std::string& out_dir, const std::vector<std::string>& argv) {
    auto run = start("generate-fixture", out_dir, argv);
    const auto log = fig1_fixture();
    run.emit("fixture.csv", [&](std::ostream& o) { write_log(log, o); });
    run.results = {{"records", log.size()}, {"users", log.user_count()}, {"memes", log.meme_count()}, {"span", log.span()}};
    run.finish();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meme popularity growth: simulate, solve, analyze and fit."};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    const std::vector<std::string> args(argv, argv + argc);

    std::string log_path, config_path, out_dir, a_path, b_path;
    bool fit = false, keep_origin = false, single = false;
    std::int64_t horizon = 0;
    unsigned threads = 0;
    double threshold = 0.05;
    CurveFlags flags;

    auto* analyze = app.add_subcommand("analyze", "Rate curves, activation and distributions of an event log");
    analyze->add_option("log", log_path, "Event log CSV")->required();
    analyze->add_option("-o,--out", out_dir, "Run directory")->required();
    analyze->add_flag("--fit", fit, "Also write a fit report");
    analyze->add_flag("--keep-time-origin", keep_origin, "Do not shift the earliest timestamp to 0");
    analyze->add_option("--horizon", horizon, "Observation length (default: max timestamp + 1)");
    add_curve_flags(analyze, flags);

    auto* simulate = app.add_subcommand("simulate", "Run the agent model from a key-value config");
    simulate->add_option("config", config_path, "Config file")->required();
    simulate->add_option("-o,--out", out_dir, "Run directory")->required();
    simulate->add_option("--threads", threads, "Replica worker threads (0 = hardware)");
    add_curve_flags(simulate, flags);

    auto* solve = app.add_subcommand("solve", "Integrate the analytic growth law; list values sweep");
    solve->add_option("config", config_path, "Config file")->required();
    solve->add_option("-o,--out", out_dir, "Run directory")->required();

    auto* fitcmd = app.add_subcommand("fit", "Estimate B, C, alpha, rho and the growth regime of a log");
    fitcmd->add_option("log", log_path, "Event log CSV")->required();
    fitcmd->add_option("-o,--out", out_dir, "Run directory")->required();
    fitcmd->add_flag("--keep-time-origin", keep_origin, "Do not shift the earliest timestamp to 0");
    fitcmd->add_option("--horizon", horizon, "Observation length (default: max timestamp + 1)");
    fitcmd->add_flag("--single-sigmoid", single, "Skip plateau detection");
    add_curve_flags(fitcmd, flags);

    auto* comparecmd = app.add_subcommand("compare", "KS distance between two L,value curves");
    comparecmd->add_option("a", a_path, "Curve file")->required();
    comparecmd->add_option("b", b_path, "Curve file")->required();
    comparecmd->add_option("--threshold", threshold, "Pass when D <= threshold")->capture_default_str();
    comparecmd->add_option("-o,--out", out_dir, "Optional run directory");

    auto* fixture = app.add_subcommand("generate-fixture", "Write the seven-user toy log");
    fixture->add_option("-o,--out", out_dir, "Run directory")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*analyze) return cmd_analyze(log_path, out_dir, fit, keep_origin, horizon, flags, args);
        if (*simulate) return cmd_simulate(config_path, out_dir, threads, flags, args);
        if (*solve) return cmd_solve(config_path, out_dir, args);
        if (*fitcmd) return cmd_fit(log_path, out_dir, keep_origin, horizon, single, flags, args);
        if (*comparecmd) return cmd_compare(a_path, b_path, threshold, out_dir, args);
        if (*fixture) return cmd_fixture(out_dir, args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
