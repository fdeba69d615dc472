#pragma once

// Helpers shared by the unit and acceptance tests, including an independent
// geometry model used as the oracle for contact-plan checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace testing {

inline std::string scenario_path(const std::string& name) { return std::string(SATFL_SCENARIO_DIR) + "/" + name; }

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

namespace oracle {

constexpr double kRe = 6371e3;
constexpr double kMu = 3.98e14;
constexpr double kOmega = 7.2921159e-5;

using V = std::array<double, 3>;

inline double period(double h) {
    const double a = kRe + h;
    return 2.0 * std::numbers::pi * std::sqrt(a * a * a / kMu);
}

// Perifocal circle rotated by inclination about x, then by RAAN about z.
inline V sat_pos(double h, double inc, double raan, double u0, double t) {
    const double a = kRe + h;
    const double u = u0 + std::sqrt(kMu / (a * a * a)) * t;
    const V p{a * std::cos(u), a * std::sin(u), 0.0};
    const V q{p[0], p[1] * std::cos(inc) - p[2] * std::sin(inc), p[1] * std::sin(inc) + p[2] * std::cos(inc)};
    return {q[0] * std::cos(raan) - q[1] * std::sin(raan), q[0] * std::sin(raan) + q[1] * std::cos(raan), q[2]};
}

inline V gs_pos(double lat, double lon, double t) {
    const double l = lon + kOmega * t;
    return {kRe * std::cos(lat) * std::cos(l), kRe * std::cos(lat) * std::sin(l), kRe * std::sin(lat)};
}

// asin of the line of sight projected on the local vertical.
inline double elevation(const V& s, const V& g) {
    const V d{s[0] - g[0], s[1] - g[1], s[2] - g[2]};
    const double dn = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    return std::asin(std::clamp((d[0] * g[0] + d[1] * g[1] + d[2] * g[2]) / (dn * gn), -1.0, 1.0));
}

struct Window {
    double rise;
    double set;
};

// First and last visible sample of each run of visible samples.
inline std::vector<Window> scan(double h, double inc, double raan, double u0, double lat, double lon, double mask,
                                double horizon, double step) {
    std::vector<Window> out;
    bool in = false;
    double last = 0.0;
    const auto n = static_cast<long>(std::floor(horizon / step));
    for (long i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * step;
        const bool vis = elevation(sat_pos(h, inc, raan, u0, t), gs_pos(lat, lon, t)) >= mask;
        if (vis && !in) out.push_back({t, t});
        if (vis) last = t;
        if (!vis && in) out.back().set = last;
        in = vis;
    }
    if (in) out.back().set = last;
    return out;
}

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace oracle

}  // namespace testing
