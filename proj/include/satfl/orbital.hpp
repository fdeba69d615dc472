#pragma once

// Circular-orbit kinematics, ground-station visibility and contact plans.
//
// Frame: Earth-centered inertial. Orbits are ideal two-body circles; the
// ground station sits on a spherical Earth that rotates at omega_E.
// All times are seconds since the start of the simulation horizon.

#include <numbers>
#include <span>
#include <vector>

#include "satfl/vec3.hpp"

namespace satfl::orbital {

struct EarthConstants {
    double radius_m = 6371e3;
    double mu_m3_s2 = 3.98e14;
    double rotation_rad_s = 7.2921159e-5;  // sidereal
    double light_speed_m_s = 299792458.0;
};

inline constexpr EarthConstants kEarth{};

// Throws DomainError unless every constant is strictly positive.
void validate(const EarthConstants& earth);

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct OrbitSpec {
    double altitude_m = 0.0;
    double inclination_rad = 0.0;
    double raan_rad = 0.0;
    double initial_arg_latitude_rad = 0.0;
    int satellite_count = 1;  // uniformly phased within the plane

    friend bool operator==(const OrbitSpec&, const OrbitSpec&) = default;
};

void validate(const OrbitSpec& orbit);

struct GroundStation {
    double latitude_rad = 0.0;
    double longitude_rad = 0.0;
    double min_elevation_rad = 0.0;

    friend bool operator==(const GroundStation&, const GroundStation&) = default;
};

void validate(const GroundStation& gs);

// One satellite of a constellation: its plane and slot within the plane.
struct SatelliteRef {
    OrbitSpec orbit;
    int slot = 0;

    friend bool operator==(const SatelliteRef&, const SatelliteRef&) = default;
};

// Flattens a constellation into satellites, numbered plane by plane.
std::vector<SatelliteRef> enumerate_satellites(std::span<const OrbitSpec> constellation);

double orbital_speed(double altitude_m, const EarthConstants& earth = kEarth);

// 2*pi*(r_E + h) / v with v = sqrt(mu / (r_E + h)). Throws DomainError for h <= 0.
double orbital_period(double altitude_m, const EarthConstants& earth = kEarth);

Vec3 satellite_position_eci(const OrbitSpec& orbit, int slot, double t, const EarthConstants& earth = kEarth);
Vec3 satellite_position_eci(const SatelliteRef& sat, double t, const EarthConstants& earth = kEarth);

Vec3 ground_station_position_eci(const GroundStation& gs, double t, const EarthConstants& earth = kEarth);

// pi/2 minus the angle between gs_pos and the line of sight gs -> sat.
double elevation_angle(const Vec3& sat_pos, const Vec3& gs_pos);

// Closed boundary: elevation == min_elevation counts as visible.
bool is_visible(const Vec3& sat_pos, const GroundStation& gs, const Vec3& gs_pos);

// Elevation of a satellite above the station at time t.
double elevation_at(const SatelliteRef& sat, const GroundStation& gs, double t, const EarthConstants& earth = kEarth);

double slant_range(const Vec3& sat_pos, const Vec3& gs_pos);

struct Pass {
    double rise_s = 0.0;
    double set_s = 0.0;

    double duration() const { return set_s - rise_s; }
    friend bool operator==(const Pass&, const Pass&) = default;
};

struct ContactPlan {
    double horizon_s = 0.0;
    GroundStation station;
    EarthConstants earth;
    std::vector<SatelliteRef> satellites;
    std::vector<std::vector<Pass>> passes;  // passes[k] sorted ascending

    int satellite_count() const { return static_cast<int>(satellites.size()); }
    std::size_t total_passes() const;
};

struct ContactPlanOptions {
    double coarse_step_s = 10.0;   // must be in (0, 10]
    double refine_tolerance_s = 0.1;
};

inline constexpr double kMaxCoarseStep = 10.0;

// Scans every satellite's visibility on a coarse grid over [0, horizon] and
// refines each sign change of (elevation - min_elevation) by bisection.
// Throws ValidationError if a horizon endpoint lies inside a pass.
ContactPlan compute_contact_plan(std::span<const OrbitSpec> constellation, const GroundStation& gs,
                                 double horizon_s, const ContactPlanOptions& options = {},
                                 const EarthConstants& earth = kEarth);

// Reference scan used for cross-checking: samples visibility every step_s
// and reports the first/last visible sample of each run.
std::vector<Pass> brute_force_passes(const SatelliteRef& sat, const GroundStation& gs, double horizon_s,
                                     double step_s, const EarthConstants& earth = kEarth);

// Longest slant range over the pass, sampled at <= 1 s with both endpoints included.
double max_pass_distance(const Pass& pass, const SatelliteRef& sat, const GroundStation& gs,
                         const EarthConstants& earth = kEarth);

}  // namespace satfl::orbital
