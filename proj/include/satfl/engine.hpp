#pragma once

// Deterministic discrete-event engine. A run computes the contact plan and
// the transmission schedule up front (so infeasible scenarios fail before
// any event fires), then replays rise/set, DL/train/UL completions and
// periodic evaluations in time order, applying aggregation as updates land.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satfl/federation.hpp"
#include "satfl/learning.hpp"
#include "satfl/orbital.hpp"
#include "satfl/scenario.hpp"
#include "satfl/scheduler.hpp"

namespace satfl::sim {

// Declaration order is the tie-break priority for events at the same instant.
enum class EventKind { Rise, UlComplete, TrainComplete, DlComplete, Set, Eval };

std::string to_string(EventKind kind);

struct SimEvent {
    double time_s = 0.0;
    EventKind kind = EventKind::Eval;
    int satellite = -1;  // -1 for Eval
    int pass = -1;
    int cycle = -1;
};

// Strict weak order: time, then kind priority, then satellite id, then cycle.
bool event_before(const SimEvent& a, const SimEvent& b);

struct MetricsRow {
    double time_s = 0.0;
    std::uint64_t global_epoch = 0;
    std::optional<int> satellite;
    std::optional<std::uint64_t> epoch_staleness;
    std::optional<double> time_staleness_s;
    std::optional<double> test_accuracy;  // evaluation rows only

    bool is_eval() const { return test_accuracy.has_value(); }
};

struct MetricsLog {
    std::vector<MetricsRow> rows;

    std::vector<std::pair<double, double>> accuracy_curve() const;  // (time, accuracy) of eval rows
    std::vector<MetricsRow> uploads() const;
};

// Everything a run needs besides the event loop, derived from a scenario.
struct RunSetup {
    Scenario scenario;
    orbital::ContactPlan plan;
    std::unique_ptr<learning::Learner> learner;
    std::vector<learning::Dataset> datasets;  // by satellite id
    learning::Dataset test;
    learning::ModelParams initial;
    std::vector<learning::SgdConfig> sgd;     // by satellite id
    std::vector<double> train_time_s;         // t_l(k)
    double model_bits = 0.0;
    scheduler::CommTable comm;
    scheduler::ScheduleResult schedule;
};

// Validates the scenario and builds plan, data, comm times and schedule.
// Throws ValidationError (or ScheduleError) before anything runs.
RunSetup prepare_run(const Scenario& scenario);

// Satellite groups used for the label split: one group per distinct altitude
// (ascending) for "altitude", all satellites for "iid".
std::vector<std::vector<int>> partition_groups(const Scenario& scenario);

// Seed of the local SGD shuffle for a satellite's `cycle`-th training run.
std::uint64_t training_seed(std::uint64_t run_seed, int satellite, int cycle);

struct RunSummary {
    std::string policy;
    std::uint64_t seed = 0;
    double eval_period_s = 0.0;
    double horizon_s = 0.0;
    double model_bits = 0.0;
    double initial_accuracy = 0.0;
    double final_accuracy = 0.0;
    double threshold = 0.0;
    std::optional<double> time_to_threshold_s;
    double mean_time_staleness_s = 0.0;
    double mean_epoch_staleness = 0.0;
    std::size_t uploads = 0;
    std::uint64_t global_epoch = 0;
    std::size_t passes = 0;
};

struct SimulationResult {
    orbital::ContactPlan plan;
    scheduler::CommTable comm;
    scheduler::ScheduleResult schedule;
    MetricsLog metrics;
    std::vector<SimEvent> trace;
    learning::ModelParams final_global;
    RunSummary summary;
};

SimulationResult run_simulation(const Scenario& scenario);
SimulationResult run_simulation(RunSetup setup);

// First evaluation time with accuracy >= threshold.
std::optional<double> time_to_threshold(const MetricsLog& log, double threshold);

// Fills threshold-dependent summary fields.
void apply_threshold(RunSummary& summary, const MetricsLog& log, double threshold);

struct ComparisonRow {
    std::string policy;
    double threshold = 0.0;
    std::optional<double> time_to_threshold_s;
    double final_accuracy = 0.0;
    double mean_time_staleness_s = 0.0;
    double mean_epoch_staleness = 0.0;
    std::size_t uploads = 0;
};

struct Comparison {
    double threshold = 0.0;
    std::vector<SimulationResult> runs;
    std::vector<ComparisonRow> rows;
};

// Runs scenarios that differ only in scheduler policy and tabulates
// time-to-threshold. The threshold is sim.accuracy_threshold when set,
// else the midpoint between the initial and final accuracy of the fedsat
// run (or of the first run when fedsat is absent).
Comparison compare_runs(std::span<const Scenario> scenarios, bool parallel = true);

}  // namespace satfl::sim
