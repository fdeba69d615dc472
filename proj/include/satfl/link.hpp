#pragma once

// Satellite <-> ground-station link model: free-space path loss, SNR,
// Shannon rate and model-exchange time. All quantities are linear SI units;
// dB forms exist only for configuration input.

#include "satfl/orbital.hpp"

namespace satfl::link {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct LinkBudget {
    double tx_power_w = 0.0;
    double gain_sat = 0.0;  // linear
    double gain_gs = 0.0;   // linear
    double bandwidth_hz = 0.0;
    double noise_temp_k = 0.0;
    double carrier_hz = 0.0;
    double boltzmann = kBoltzmann;

    // N_0 = k_B * T * B
    double noise_power_w() const { return boltzmann * noise_temp_k * bandwidth_hz; }

    static LinkBudget from_db(double power_dbm, double gain_sat_dbi, double gain_gs_dbi, double bandwidth_hz,
                              double noise_temp_k, double carrier_hz);

    friend bool operator==(const LinkBudget&, const LinkBudget&) = default;
};

// Throws DomainError unless every field is strictly positive.
void validate(const LinkBudget& budget);

// (4 pi f_c d / c)^2
double path_loss(double distance_m, double carrier_hz, double light_speed = orbital::kEarth.light_speed_m_s);

// P_t G_sat G_gs / (N_0 L(d)) when visible, 0 otherwise.
double snr(const LinkBudget& budget, double distance_m, bool visible,
           double light_speed = orbital::kEarth.light_speed_m_s);

// B log2(1 + snr), bits/s.
double data_rate(const LinkBudget& budget, double snr_linear);

// S(w)/R + d/c. A zero rate means the link is down and raises LinkUnavailable.
double comm_time(double model_bits, double rate_bps, double distance_m,
                 double light_speed = orbital::kEarth.light_speed_m_s);

// comm_time evaluated at a visible slant range, chaining snr and data_rate.
double exchange_time(const LinkBudget& budget, double model_bits, double distance_m,
                     double light_speed = orbital::kEarth.light_speed_m_s);

}  // namespace satfl::link
