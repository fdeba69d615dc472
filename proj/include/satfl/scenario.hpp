#pragma once

// Scenario files: INI-style sections of `key = value` lines.
//
//   [constellation]   orbit = altitude_km=500 inclination_deg=80 raan_deg=0 phase_deg=0 count=1   (repeatable)
//   [ground_station]  name, latitude_deg, longitude_deg, min_elevation_deg
//   [link]            power_dbm, gain_sat_dbi, gain_gs_dbi, bandwidth_hz, noise_temp_k, carrier_hz,
//                     ul_power_dbm, ul_gain_sat_dbi, ul_gain_gs_dbi (optional uplink overrides)
//   [learner]         kind, classes, feature_dim, hidden, eta, batch_size, local_iters, local_epochs,
//                     samples_per_class, test_per_class, spread, partition
//   [compute]         train_time_s | cycles_per_bit + cpu_hz
//   [scheduler]       policy, strict_online_budget, max_concurrent_links
//   [sim]             horizon_h, eval_period_s, seed, coarse_step_s, model_bits, accuracy_threshold
//
// The key suffix names the unit a bare number is read in. A value may carry
// its own unit instead ("10 W", "2.4 GHz", "0.5 rad", "30 min"), which is
// converted to the key's unit on parsing. Values are stored in key units, so
// parse -> serialize -> parse is the identity.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satfl/link.hpp"
#include "satfl/orbital.hpp"
#include "satfl/scheduler.hpp"

namespace satfl {

struct OrbitConfig {
    double altitude_km = 500.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double phase_deg = 0.0;
    int count = 1;

    friend bool operator==(const OrbitConfig&, const OrbitConfig&) = default;
};

struct GroundStationConfig {
    std::string name = "gs";
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double min_elevation_deg = 10.0;

    friend bool operator==(const GroundStationConfig&, const GroundStationConfig&) = default;
};

struct LinkConfig {
    double power_dbm = 40.0;
    double gain_sat_dbi = 6.98;
    double gain_gs_dbi = 6.98;
    double bandwidth_hz = 20e6;
    double noise_temp_k = 290.0;
    double carrier_hz = 2.4e9;
    std::optional<double> ul_power_dbm;
    std::optional<double> ul_gain_sat_dbi;
    std::optional<double> ul_gain_gs_dbi;

    friend bool operator==(const LinkConfig&, const LinkConfig&) = default;
};

struct LearnerConfig {
    std::string kind = "logreg";
    int classes = 10;
    int feature_dim = 16;
    int hidden = 32;
    double eta = 0.1;
    int batch_size = 10;
    int local_iters = 0;  // 0: derive from local_epochs
    int local_epochs = 1;
    int samples_per_class = 400;
    int test_per_class = 100;
    double spread = 1.0;
    std::string partition = "altitude";  // "altitude" | "iid"

    friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

struct ComputeConfig {
    std::optional<double> train_time_s = 30.0;
    std::optional<double> cycles_per_bit;
    std::optional<double> cpu_hz;

    friend bool operator==(const ComputeConfig&, const ComputeConfig&) = default;
};

struct SchedulerConfig {
    scheduler::Policy policy = scheduler::Policy::FedSat;
    bool strict_online_budget = true;
    int max_concurrent_links = 0;  // 0: unlimited

    friend bool operator==(const SchedulerConfig&, const SchedulerConfig&) = default;
};

struct SimConfig {
    double horizon_h = 48.0;
    double eval_period_s = 600.0;
    std::uint64_t seed = 1;
    double coarse_step_s = 10.0;
    std::optional<double> model_bits;
    std::optional<double> accuracy_threshold;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Scenario {
    std::vector<OrbitConfig> constellation;
    GroundStationConfig ground_station;
    LinkConfig link;
    LearnerConfig learner;
    ComputeConfig compute;
    SchedulerConfig scheduler;
    SimConfig sim;

    double horizon_s() const { return sim.horizon_h * 3600.0; }
    std::vector<orbital::OrbitSpec> orbit_specs() const;
    orbital::GroundStation station() const;
    link::LinkBudget downlink_budget() const;
    link::LinkBudget uplink_budget() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws ParseError (with the line number) on malformed input and
// ValidationError for values that parse but cannot be simulated.
Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

void validate(const Scenario& scenario);

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace satfl
