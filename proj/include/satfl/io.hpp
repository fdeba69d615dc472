#pragma once

// Plot-ready exports. CSV files carry a header row, '.' decimals and the
// shortest round-trip representation of every number; summaries are
// `key = value` text.

#include <ostream>

#include "satfl/engine.hpp"

namespace satfl::io {

// satellite_id, pass_index, rise_s, set_s, duration_s, max_distance_m
void write_contact_plan_csv(std::ostream& out, const orbital::ContactPlan& plan, const scheduler::CommTable& comm);

// satellite_id, altitude_km, pass_count, mean_duration_s, min_duration_s, max_duration_s
void write_plan_summary_csv(std::ostream& out, const orbital::ContactPlan& plan);

// sim_time_s, global_epoch, satellite_id, epoch_staleness, time_staleness_s, test_accuracy
void write_metrics_csv(std::ostream& out, const sim::MetricsLog& log);

// satellite_id, pass_index, decision, dl_time_s, ul_time_s (one row per update cycle;
// pass_index is the pass of the download)
void write_schedule_csv(std::ostream& out, const scheduler::TransmissionSchedule& schedule);

void write_run_summary(std::ostream& out, const sim::RunSummary& summary);

// policy, threshold, time_to_threshold_s, final_accuracy, mean_time_staleness_s, mean_epoch_staleness, uploads
void write_comparison_csv(std::ostream& out, const sim::Comparison& comparison);

}  // namespace satfl::io
