#include "satfl/link.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "satfl/error.hpp"

namespace satfl::link {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) {
    if (!(linear > 0.0)) throw DomainError("dB conversion needs a positive ratio");
    return 10.0 * std::log10(linear);
}
double dbm_to_watts(double dbm) { return db_to_linear(dbm) * 1e-3; }
double watts_to_dbm(double watts) { return linear_to_db(watts * 1e3); }

LinkBudget LinkBudget::from_db(double power_dbm, double gain_sat_dbi, double gain_gs_dbi, double bandwidth_hz,
                               double noise_temp_k, double carrier_hz) {
    LinkBudget b;
    b.tx_power_w = dbm_to_watts(power_dbm);
    b.gain_sat = db_to_linear(gain_sat_dbi);
    b.gain_gs = db_to_linear(gain_gs_dbi);
    b.bandwidth_hz = bandwidth_hz;
    b.noise_temp_k = noise_temp_k;
    b.carrier_hz = carrier_hz;
    validate(b);
    return b;
}

void validate(const LinkBudget& b) {
    const bool ok = b.tx_power_w > 0.0 && b.gain_sat > 0.0 && b.gain_gs > 0.0 && b.bandwidth_hz > 0.0 &&
                    b.noise_temp_k > 0.0 && b.carrier_hz > 0.0 && b.boltzmann > 0.0;
    if (!ok) throw DomainError("link budget fields must be strictly positive");
}

double path_loss(double distance_m, double carrier_hz, double light_speed) {
    if (!(distance_m > 0.0)) throw DomainError("path loss needs a positive distance, got " + std::to_string(distance_m));
    const double a = 4.0 * std::numbers::pi * carrier_hz * distance_m / light_speed;
    return a * a;
}

double snr(const LinkBudget& budget, double distance_m, bool visible, double light_speed) {
    if (!visible) return 0.0;
    return budget.tx_power_w * budget.gain_sat * budget.gain_gs /
           (budget.noise_power_w() * path_loss(distance_m, budget.carrier_hz, light_speed));
}

double data_rate(const LinkBudget& budget, double snr_linear) {
    if (snr_linear < 0.0) throw DomainError("SNR must be non-negative");
    return budget.bandwidth_hz * std::log2(1.0 + snr_linear);
}

double comm_time(double model_bits, double rate_bps, double distance_m, double light_speed) {
    if (!(rate_bps > 0.0)) throw LinkUnavailable("link unavailable: zero data rate");
    return model_bits / rate_bps + distance_m / light_speed;
}

double exchange_time(const LinkBudget& budget, double model_bits, double distance_m, double light_speed) {
    const double rate = data_rate(budget, snr(budget, distance_m, true, light_speed));
    return comm_time(model_bits, rate, distance_m, light_speed);
}

}  // namespace satfl::link
