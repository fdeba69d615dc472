#include "satfl/orbital.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "satfl/error.hpp"

namespace satfl::orbital {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Narrows a visibility transition bracketed by one invisible and one visible
// instant. Returns the visible endpoint once the bracket is <= tol wide.
template <typename F>
double bisect_edge(F&& visible, double invisible_t, double visible_t, double tol) {
    while (std::abs(visible_t - invisible_t) > tol) {
        const double mid = 0.5 * (invisible_t + visible_t);
        if (visible(mid)) {
            visible_t = mid;
        } else {
            invisible_t = mid;
        }
    }
    return visible_t;
}

}  // namespace

void validate(const EarthConstants& earth) {
    if (!(earth.radius_m > 0.0 && earth.mu_m3_s2 > 0.0 && earth.rotation_rad_s > 0.0 && earth.light_speed_m_s > 0.0)) {
        throw DomainError("Earth constants must be strictly positive");
    }
}

void validate(const OrbitSpec& orbit) {
    if (!(orbit.altitude_m > 0.0)) throw DomainError("orbit altitude must be positive");
    if (orbit.inclination_rad < 0.0 || orbit.inclination_rad > std::numbers::pi) {
        throw DomainError("orbit inclination must lie in [0, pi]");
    }
    if (orbit.satellite_count < 1) throw DomainError("orbit must hold at least one satellite");
}

void validate(const GroundStation& gs) {
    if (std::abs(gs.latitude_rad) > std::numbers::pi / 2) throw DomainError("ground station latitude out of range");
    if (gs.min_elevation_rad < 0.0 || gs.min_elevation_rad >= std::numbers::pi / 2) {
        throw DomainError("minimum elevation must lie in [0, pi/2)");
    }
}

std::vector<SatelliteRef> enumerate_satellites(std::span<const OrbitSpec> constellation) {
    std::vector<SatelliteRef> sats;
    for (const auto& orbit : constellation) {
        for (int slot = 0; slot < orbit.satellite_count; ++slot) sats.push_back({orbit, slot});
    }
    return sats;
}

double orbital_speed(double altitude_m, const EarthConstants& earth) {
    return std::sqrt(earth.mu_m3_s2 / (altitude_m + earth.radius_m));
}

double orbital_period(double altitude_m, const EarthConstants& earth) {
    // h = 0 is the surface-orbit limit of the closed form and is accepted.
    if (altitude_m < 0.0 || !std::isfinite(altitude_m)) {
        throw DomainError("altitude must be non-negative, got " + std::to_string(altitude_m));
    }
    return kTwoPi * (earth.radius_m + altitude_m) / orbital_speed(altitude_m, earth);
}

Vec3 satellite_position_eci(const OrbitSpec& orbit, int slot, double t, const EarthConstants& earth) {
    if (slot < 0 || slot >= orbit.satellite_count) throw DomainError("satellite slot out of range");
    const double radius = earth.radius_m + orbit.altitude_m;
    const double period = orbital_period(orbit.altitude_m, earth);
    const double u = orbit.initial_arg_latitude_rad + kTwoPi * slot / orbit.satellite_count + kTwoPi * t / period;

    const double cu = std::cos(u), su = std::sin(u);
    const double co = std::cos(orbit.raan_rad), so = std::sin(orbit.raan_rad);
    const double ci = std::cos(orbit.inclination_rad), si = std::sin(orbit.inclination_rad);
    return {radius * (co * cu - so * su * ci), radius * (so * cu + co * su * ci), radius * (su * si)};
}

Vec3 satellite_position_eci(const SatelliteRef& sat, double t, const EarthConstants& earth) {
    return satellite_position_eci(sat.orbit, sat.slot, t, earth);
}

Vec3 ground_station_position_eci(const GroundStation& gs, double t, const EarthConstants& earth) {
    const double lon = gs.longitude_rad + earth.rotation_rad_s * t;
    const double cl = std::cos(gs.latitude_rad);
    return {earth.radius_m * cl * std::cos(lon), earth.radius_m * cl * std::sin(lon),
            earth.radius_m * std::sin(gs.latitude_rad)};
}

double elevation_angle(const Vec3& sat_pos, const Vec3& gs_pos) {
    const Vec3 line_of_sight = sat_pos - gs_pos;
    if (line_of_sight == Vec3{}) throw DomainError("satellite and ground station coincide");
    return std::numbers::pi / 2 - angle_between(gs_pos, line_of_sight);
}

bool is_visible(const Vec3& sat_pos, const GroundStation& gs, const Vec3& gs_pos) {
    return elevation_angle(sat_pos, gs_pos) >= gs.min_elevation_rad;
}

double elevation_at(const SatelliteRef& sat, const GroundStation& gs, double t, const EarthConstants& earth) {
    return elevation_angle(satellite_position_eci(sat, t, earth), ground_station_position_eci(gs, t, earth));
}

double slant_range(const Vec3& sat_pos, const Vec3& gs_pos) { return norm(sat_pos - gs_pos); }

std::size_t ContactPlan::total_passes() const {
    std::size_t n = 0;
    for (const auto& p : passes) n += p.size();
    return n;
}

ContactPlan compute_contact_plan(std::span<const OrbitSpec> constellation, const GroundStation& gs,
                                 double horizon_s, const ContactPlanOptions& options, const EarthConstants& earth) {
    validate(earth);
    validate(gs);
    for (const auto& orbit : constellation) validate(orbit);
    if (!(horizon_s > 0.0)) throw ValidationError("horizon must be positive");
    if (!(options.coarse_step_s > 0.0) || options.coarse_step_s > kMaxCoarseStep) {
        throw ValidationError("coarse step must lie in (0, 10] s, got " + std::to_string(options.coarse_step_s));
    }
    if (!(options.refine_tolerance_s > 0.0)) throw ValidationError("refinement tolerance must be positive");

    ContactPlan plan;
    plan.horizon_s = horizon_s;
    plan.station = gs;
    plan.earth = earth;
    plan.satellites = enumerate_satellites(constellation);
    plan.passes.resize(plan.satellites.size());

    const auto steps = static_cast<long>(std::ceil(horizon_s / options.coarse_step_s));
    for (std::size_t k = 0; k < plan.satellites.size(); ++k) {
        const auto& sat = plan.satellites[k];
        auto visible = [&](double t) { return elevation_at(sat, gs, t, earth) >= gs.min_elevation_rad; };

        if (visible(0.0) || visible(horizon_s)) {
            throw ValidationError("satellite " + std::to_string(k) +
                                  " is visible at a horizon endpoint; choose a horizon whose endpoints lie in "
                                  "off-time");
        }

        auto& out = plan.passes[k];
        double prev_t = 0.0;
        bool prev_vis = false;
        double rise = 0.0;
        for (long i = 1; i <= steps; ++i) {
            const double t = std::min(horizon_s, static_cast<double>(i) * options.coarse_step_s);
            const bool vis = visible(t);
            if (vis && !prev_vis) {
                rise = bisect_edge(visible, prev_t, t, options.refine_tolerance_s);
            } else if (!vis && prev_vis) {
                const double set = bisect_edge(visible, t, prev_t, options.refine_tolerance_s);
                out.push_back({rise, set});
            }
            prev_t = t;
            prev_vis = vis;
        }
    }
    return plan;
}

std::vector<Pass> brute_force_passes(const SatelliteRef& sat, const GroundStation& gs, double horizon_s,
                                     double step_s, const EarthConstants& earth) {
    if (!(step_s > 0.0)) throw DomainError("scan step must be positive");
    std::vector<Pass> out;
    bool in_pass = false;
    double first = 0.0, last = 0.0;
    const auto steps = static_cast<long>(std::floor(horizon_s / step_s));
    for (long i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * step_s;
        const bool vis = elevation_at(sat, gs, t, earth) >= gs.min_elevation_rad;
        if (vis) {
            if (!in_pass) first = t;
            last = t;
        } else if (in_pass) {
            out.push_back({first, last});
        }
        in_pass = vis;
    }
    if (in_pass) out.push_back({first, last});
    return out;
}

double max_pass_distance(const Pass& pass, const SatelliteRef& sat, const GroundStation& gs,
                         const EarthConstants& earth) {
    const auto samples = std::max<long>(1, static_cast<long>(std::ceil(pass.duration() / 1.0)));
    double best = 0.0;
    for (long i = 0; i <= samples; ++i) {
        const double t = (i == samples) ? pass.set_s : pass.rise_s + pass.duration() * static_cast<double>(i) / samples;
        best = std::max(best, slant_range(satellite_position_eci(sat, t, earth), ground_station_position_eci(gs, t, earth)));
    }
    return best;
}

}  // namespace satfl::orbital
