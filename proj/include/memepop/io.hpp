#pragma once

#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "memepop/analytic.hpp"
#include "memepop/error.hpp"
#include "memepop/fitting.hpp"
#include "memepop/metrics.hpp"
#include "memepop/simulator.hpp"

namespace memepop {

// Shortest-safe round-trip formatting (17 significant digits).
inline std::string real(double x) {
    std::ostringstream s;
    s << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
    return s.str();
}

inline void write_rate_curves(const RateCurves& c, std::ostream& out) {
    out << "L,P_F,P_W,P_N\n";
    for (std::size_t i = 0; i < c.L.size(); ++i)
        out << real(c.L[i]) << ',' << real(c.P_F[i]) << ',' << real(c.P_W[i]) << ',' << real(c.P_N[i]) << '\n';
}

inline void write_counts(const RawSeries& s, std::ostream& out) {
    out << "t,F,W,S,N\n";
    for (std::size_t t = 0; t < s.length(); ++t)
        out << t << ',' << s.F[t] << ',' << s.W[t] << ',' << s.S[t] << ',' << s.N[t] << '\n';
}

inline void write_counts(const RateCurves& c, std::ostream& out) { write_counts(RawSeries{c.F, c.W, c.S, c.N}, out); }

inline void write_activation(const ActivationCurve& a, std::ostream& out) {
    out << "L,P_A\n";
    for (std::size_t i = 0; i < a.L.size(); ++i) out << real(a.L[i]) << ',' << real(a.P_A[i]) << '\n';
}

inline void write_histogram(const Histogram& h, std::ostream& out) {
    out << "value,count\n";
    for (const auto& [v, c] : h) out << v << ',' << c << '\n';
}

inline void write_growth(const GrowthCurve& g, std::ostream& out) {
    out << "L,value\n";
    for (std::size_t i = 0; i < g.L.size(); ++i) out << real(g.L[i]) << ',' << real(g.value[i]) << '\n';
}

inline GrowthCurve read_growth(std::istream& in) {
    GrowthCurve g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != "L,value") throw ParseError(lineno, "expected header 'L,value'");
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError(lineno, "expected 2 fields");
        try {
            std::size_t u1 = 0, u2 = 0;
            const auto a = line.substr(0, comma), b = line.substr(comma + 1);
            const double l = std::stod(a, &u1), v = std::stod(b, &u2);
            if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(line);
            if (!g.L.empty() && !(l > g.L.back())) throw ParseError(lineno, "L must be strictly increasing");
            g.L.push_back(l);
            g.value.push_back(v);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(lineno, "not a number");
        }
    }
    if (lineno == 0) throw Error("empty curve file");
    return g;
}

inline void write_summary(const ReplicaSummary& s, std::ostream& out) {
    out << "L,mean_PF,std_PF,mean_PW,std_PW,mean_PN,std_PN\n";
    for (std::size_t i = 0; i < s.L.size(); ++i)
        out << real(s.L[i]) << ',' << real(s.P_F.mean[i]) << ',' << real(s.P_F.std[i]) << ',' << real(s.P_W.mean[i])
            << ',' << real(s.P_W.std[i]) << ',' << real(s.P_N.mean[i]) << ',' << real(s.P_N.std[i]) << '\n';
}

// Mean popularity across replicas as a growth curve.
inline GrowthCurve summary_growth(const ReplicaSummary& s) { return {s.L, s.popularity.mean}; }

inline constexpr const char* kFitReportColumns =
    "B,C,B2,C2,split,sigmoid_residual,alpha,ks_D,alpha_rejected,rho_mean,regime,"
    "rms_linear,rms_sigmoid,rms_exponential,linear_r2,half_value";

inline void write_fit_report_kv(const FitReport& r, std::ostream& out) {
    out << "B = " << real(r.B) << '\n'
        << "C = " << real(r.C) << '\n'
        << "two_sigmoids = " << (r.two_sigmoids ? "true" : "false") << '\n';
    if (r.two_sigmoids)
        out << "B2 = " << real(r.B2) << '\n' << "C2 = " << real(r.C2) << '\n' << "split = " << real(r.split) << '\n';
    out << "sigmoid_residual = " << real(r.sigmoid_residual) << '\n'
        << "alpha = " << real(r.alpha) << '\n'
        << "ks_D = " << real(r.ks_D) << '\n'
        << "alpha_rejected = " << (r.alpha_rejected ? "true" : "false") << '\n'
        << "rho_mean = " << real(r.rho_mean) << '\n'
        << "rho_users = " << r.rho_distribution.size() << '\n'
        << "regime = " << to_string(r.growth.regime) << '\n'
        << "rms_linear = " << real(r.growth.rms_linear) << '\n'
        << "rms_sigmoid = " << real(r.growth.rms_sigmoid) << '\n'
        << "rms_exponential = " << real(r.growth.rms_exponential) << '\n'
        << "linear_r2 = " << real(r.growth.linear_r2) << '\n'
        << "half_value = " << real(r.growth.half_value) << '\n';
}

inline void write_fit_report_csv(const FitReport& r, std::ostream& out, bool header = true) {
    if (header) out << kFitReportColumns << '\n';
    out << real(r.B) << ',' << real(r.C) << ',' << real(r.B2) << ',' << real(r.C2) << ',' << real(r.split) << ','
        << real(r.sigmoid_residual) << ',' << real(r.alpha) << ',' << real(r.ks_D) << ','
        << (r.alpha_rejected ? "true" : "false") << ',' << real(r.rho_mean) << ',' << to_string(r.growth.regime) << ','
        << real(r.growth.rms_linear) << ',' << real(r.growth.rms_sigmoid) << ',' << real(r.growth.rms_exponential)
        << ',' << real(r.growth.linear_r2) << ',' << real(r.growth.half_value) << '\n';
}

} // namespace memepop
