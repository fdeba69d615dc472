#pragma once

// Transmission scheduling on top of a contact plan.
//
// A schedule is a list of update cycles per satellite. Each cycle is one
// download of the global model, one training run of t_l seconds and (unless
// the horizon ends first) one upload. FedSat downloads right after its upload
// at every pass and trains in the following off-time. FedSatSchedule looks at
// the next pass: if that pass can hold download + training + upload, it skips
// the download now and runs the whole cycle inside the next pass instead.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satfl/link.hpp"
#include "satfl/orbital.hpp"

namespace satfl::scheduler {

enum class Policy { FedSat, FedSatSchedule, FedAvgSync };

std::string to_string(Policy policy);
// Accepts "fedsat", "fedsatschedule", "fedavg_sync"; throws ValidationError otherwise.
Policy parse_policy(const std::string& name);

enum class PassMode {
    TrainOffline,  // download this pass, train in the off-time, upload next pass
    TrainOnline,   // skip the download; download, train and upload inside the next pass
};

std::string to_string(PassMode mode);

struct PassDecision {
    int pass = 0;
    PassMode mode = PassMode::TrainOffline;

    friend bool operator==(const PassDecision&, const PassDecision&) = default;
};

// Per-pass downlink/uplink exchange times, evaluated at the pass's longest slant range.
struct PassComm {
    double distance_m = 0.0;
    double dl_s = 0.0;
    double ul_s = 0.0;
};

using CommTable = std::vector<std::vector<PassComm>>;  // [satellite][pass]

CommTable compute_comm_table(const orbital::ContactPlan& plan, const link::LinkBudget& downlink,
                             const link::LinkBudget& uplink, double model_bits);

// Pass duration minus DL and UL exchange time. Negative means the pass cannot host an online cycle.
double effective_online_budget(const orbital::Pass& pass, const PassComm& comm);
double effective_online_budget(const orbital::Pass& pass, const orbital::SatelliteRef& sat,
                               const orbital::GroundStation& gs, const link::LinkBudget& budget, double model_bits,
                               const orbital::EarthConstants& earth = orbital::kEarth);

// TrainOffline iff budget < t_l (strict), TrainOnline otherwise.
PassMode decide_mode(double next_pass_budget_s, double train_time_s);

// Decision taken during pass n from the raw duration of pass n+1.
// Without a pass n+1 the only option is TrainOffline.
PassDecision fedsatschedule_decide(const orbital::ContactPlan& plan, int satellite, int pass, double train_time_s);

// Same, but compares against effective_online_budget of pass n+1.
PassDecision fedsatschedule_decide(const orbital::ContactPlan& plan, const CommTable& comm, int satellite, int pass,
                                   double train_time_s);

using DecisionTable = std::vector<std::vector<PassDecision>>;  // [satellite][pass]

DecisionTable fedsat_decisions(const orbital::ContactPlan& plan);
DecisionTable fedsatschedule_decisions(const orbital::ContactPlan& plan, const CommTable& comm,
                                       std::span<const double> train_time_s, bool strict_online_budget);

struct Transmission {
    int pass = 0;
    double start_s = 0.0;
    double end_s = 0.0;

    friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct UpdateCycle {
    int satellite = 0;
    int round = -1;  // synchronous round; -1 for asynchronous policies
    PassMode mode = PassMode::TrainOffline;
    Transmission dl;
    double train_end_s = 0.0;
    std::optional<Transmission> ul;  // empty when the horizon ends first

    friend bool operator==(const UpdateCycle&, const UpdateCycle&) = default;
};

struct TransmissionSchedule {
    std::vector<std::vector<UpdateCycle>> cycles;  // [satellite], in time order

    std::vector<double> dl_instants(int satellite) const;
    std::vector<double> ul_instants(int satellite) const;
    std::size_t completed_updates() const;

    friend bool operator==(const TransmissionSchedule&, const TransmissionSchedule&) = default;
};

// Books transmissions on the ground station when at most `max_links`
// satellites may talk at once. max_links == 0 means unlimited.
class LinkArbiter {
public:
    explicit LinkArbiter(int max_links = 0) : max_links_(max_links) {}

    // Earliest start >= earliest_s such that [start, start + duration) fits
    // before window_end_s and under the cap. Books it on success.
    std::optional<double> book(double earliest_s, double duration_s, double window_end_s);

private:
    bool has_room(double start_s, double end_s) const;

    int max_links_;
    std::vector<std::pair<double, double>> booked_;
};

// Turns per-pass decisions into concrete DL/UL instants for the asynchronous
// policies. Passes of all satellites are handled in rise-time order.
// Throws ScheduleError when an online cycle does not fit its pass.
TransmissionSchedule extract_schedule(const orbital::ContactPlan& plan, const DecisionTable& decisions,
                                      const CommTable& comm, std::span<const double> train_time_s,
                                      int max_links = 0);

// Synchronous FedAvg timing: every satellite downloads the round-r model at
// its first contact after the round opens, trains, uploads at a later pass;
// the round closes with the last upload.
TransmissionSchedule extract_sync_schedule(const orbital::ContactPlan& plan, const CommTable& comm,
                                           std::span<const double> train_time_s, int max_links = 0);

struct ScheduleInputs {
    Policy policy = Policy::FedSat;
    bool strict_online_budget = true;
    int max_links = 0;
};

struct ScheduleResult {
    DecisionTable decisions;  // empty for the synchronous baseline
    TransmissionSchedule schedule;
};

ScheduleResult build_schedule(const orbital::ContactPlan& plan, const CommTable& comm,
                              std::span<const double> train_time_s, const ScheduleInputs& inputs);

// Design criterion C(VP, ST); larger is better.
using ScheduleCriterion = std::function<double(const orbital::ContactPlan&, const TransmissionSchedule&)>;

// Mean DL-complete -> UL-complete time over completed cycles.
double mean_time_staleness(const TransmissionSchedule& schedule);

// Criterion that prefers fresher updates: -mean_time_staleness.
double staleness_criterion(const orbital::ContactPlan& plan, const TransmissionSchedule& schedule);

// Index of the candidate with the largest criterion value (first on ties).
std::size_t select_schedule(const orbital::ContactPlan& plan, std::span<const TransmissionSchedule> candidates,
                            const ScheduleCriterion& criterion);

}  // namespace satfl::scheduler
