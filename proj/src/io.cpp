#include "satfl/io.hpp"

#include <algorithm>

namespace satfl::io {

namespace {

std::string num(double v) { return format_number(v); }

template <typename T, typename F>
std::string opt(const std::optional<T>& v, F&& f) {
    return v ? f(*v) : std::string();
}

}  // namespace

void write_contact_plan_csv(std::ostream& out, const orbital::ContactPlan& plan, const scheduler::CommTable& comm) {
    out << "satellite_id,pass_index,rise_s,set_s,duration_s,max_distance_m\n";
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        for (std::size_t n = 0; n < plan.passes[k].size(); ++n) {
            const auto& p = plan.passes[k][n];
            out << k << ',' << n << ',' << num(p.rise_s) << ',' << num(p.set_s) << ',' << num(p.duration()) << ','
                << num(comm.at(k).at(n).distance_m) << '\n';
        }
    }
}

void write_plan_summary_csv(std::ostream& out, const orbital::ContactPlan& plan) {
    out << "satellite_id,altitude_km,pass_count,mean_duration_s,min_duration_s,max_duration_s\n";
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        const auto& passes = plan.passes[k];
        double sum = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t n = 0; n < passes.size(); ++n) {
            const double d = passes[n].duration();
            sum += d;
            lo = n == 0 ? d : std::min(lo, d);
            hi = n == 0 ? d : std::max(hi, d);
        }
        out << k << ',' << num(plan.satellites[k].orbit.altitude_m / 1e3) << ',' << passes.size() << ','
            << (passes.empty() ? std::string() : num(sum / static_cast<double>(passes.size()))) << ','
            << (passes.empty() ? std::string() : num(lo)) << ',' << (passes.empty() ? std::string() : num(hi))
            << '\n';
    }
}

void write_metrics_csv(std::ostream& out, const sim::MetricsLog& log) {
    out << "sim_time_s,global_epoch,satellite_id,epoch_staleness,time_staleness_s,test_accuracy\n";
    for (const auto& r : log.rows) {
        out << num(r.time_s) << ',' << r.global_epoch << ','
            << opt(r.satellite, [](int v) { return std::to_string(v); }) << ','
            << opt(r.epoch_staleness, [](std::uint64_t v) { return std::to_string(v); }) << ','
            << opt(r.time_staleness_s, num) << ',' << opt(r.test_accuracy, num) << '\n';
    }
}

void write_schedule_csv(std::ostream& out, const scheduler::TransmissionSchedule& schedule) {
    out << "satellite_id,pass_index,decision,dl_time_s,ul_time_s\n";
    for (std::size_t k = 0; k < schedule.cycles.size(); ++k) {
        for (const auto& c : schedule.cycles[k]) {
            out << k << ',' << c.dl.pass << ',' << scheduler::to_string(c.mode) << ',' << num(c.dl.start_s) << ','
                << (c.ul ? num(c.ul->start_s) : std::string()) << '\n';
        }
    }
}

void write_run_summary(std::ostream& out, const sim::RunSummary& s) {
    out << "policy = " << s.policy << '\n'
        << "seed = " << s.seed << '\n'
        << "horizon_s = " << num(s.horizon_s) << '\n'
        << "eval_period_s = " << num(s.eval_period_s) << '\n'
        << "model_bits = " << num(s.model_bits) << '\n'
        << "passes = " << s.passes << '\n'
        << "uploads = " << s.uploads << '\n'
        << "global_epoch = " << s.global_epoch << '\n'
        << "initial_accuracy = " << num(s.initial_accuracy) << '\n'
        << "final_accuracy = " << num(s.final_accuracy) << '\n'
        << "threshold = " << num(s.threshold) << '\n'
        << "time_to_threshold_s = " << (s.time_to_threshold_s ? num(*s.time_to_threshold_s) : "none") << '\n'
        << "mean_time_staleness_s = " << num(s.mean_time_staleness_s) << '\n'
        << "mean_epoch_staleness = " << num(s.mean_epoch_staleness) << '\n';
}

void write_comparison_csv(std::ostream& out, const sim::Comparison& cmp) {
    out << "policy,threshold,time_to_threshold_s,final_accuracy,mean_time_staleness_s,mean_epoch_staleness,uploads\n";
    for (const auto& r : cmp.rows) {
        out << r.policy << ',' << num(r.threshold) << ',' << opt(r.time_to_threshold_s, num) << ','
            << num(r.final_accuracy) << ',' << num(r.mean_time_staleness_s) << ',' << num(r.mean_epoch_staleness)
            << ',' << r.uploads << '\n';
    }
}

}  // namespace satfl::io
