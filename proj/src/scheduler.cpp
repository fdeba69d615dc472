#include "satfl/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "satfl/error.hpp"

namespace satfl::scheduler {

namespace {

void check_tables(const orbital::ContactPlan& plan, const CommTable& comm, std::span<const double> train_time_s) {
    const auto K = plan.passes.size();
    if (comm.size() != K || train_time_s.size() != K) throw DomainError("schedule inputs do not match the plan");
    for (std::size_t k = 0; k < K; ++k) {
        if (comm[k].size() != plan.passes[k].size()) throw DomainError("comm table does not match the plan");
        if (!(train_time_s[k] > 0.0)) throw DomainError("training time must be positive");
    }
}

struct PassRef {
    double rise_s;
    int satellite;
    int pass;
};

std::vector<PassRef> passes_by_rise(const orbital::ContactPlan& plan) {
    std::vector<PassRef> out;
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        for (std::size_t n = 0; n < plan.passes[k].size(); ++n) {
            out.push_back({plan.passes[k][n].rise_s, static_cast<int>(k), static_cast<int>(n)});
        }
    }
    std::sort(out.begin(), out.end(), [](const PassRef& a, const PassRef& b) {
        return a.rise_s != b.rise_s ? a.rise_s < b.rise_s : a.satellite < b.satellite;
    });
    return out;
}

}  // namespace

std::string to_string(Policy policy) {
    switch (policy) {
        case Policy::FedSat: return "fedsat";
        case Policy::FedSatSchedule: return "fedsatschedule";
        case Policy::FedAvgSync: return "fedavg_sync";
    }
    return "?";
}

Policy parse_policy(const std::string& name) {
    if (name == "fedsat") return Policy::FedSat;
    if (name == "fedsatschedule") return Policy::FedSatSchedule;
    if (name == "fedavg_sync") return Policy::FedAvgSync;
    throw ValidationError("unknown scheduler policy '" + name + "' (expected fedsat, fedsatschedule or fedavg_sync)");
}

std::string to_string(PassMode mode) { return mode == PassMode::TrainOnline ? "TRAIN_ONLINE" : "TRAIN_OFFLINE"; }

CommTable compute_comm_table(const orbital::ContactPlan& plan, const link::LinkBudget& downlink,
                             const link::LinkBudget& uplink, double model_bits) {
    CommTable table(plan.passes.size());
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        for (const auto& pass : plan.passes[k]) {
            PassComm c;
            c.distance_m = orbital::max_pass_distance(pass, plan.satellites[k], plan.station, plan.earth);
            c.dl_s = link::exchange_time(downlink, model_bits, c.distance_m, plan.earth.light_speed_m_s);
            c.ul_s = link::exchange_time(uplink, model_bits, c.distance_m, plan.earth.light_speed_m_s);
            table[k].push_back(c);
        }
    }
    return table;
}

double effective_online_budget(const orbital::Pass& pass, const PassComm& comm) {
    return pass.duration() - comm.dl_s - comm.ul_s;
}

double effective_online_budget(const orbital::Pass& pass, const orbital::SatelliteRef& sat,
                               const orbital::GroundStation& gs, const link::LinkBudget& budget, double model_bits,
                               const orbital::EarthConstants& earth) {
    PassComm c;
    c.distance_m = orbital::max_pass_distance(pass, sat, gs, earth);
    c.dl_s = link::exchange_time(budget, model_bits, c.distance_m, earth.light_speed_m_s);
    c.ul_s = c.dl_s;
    return effective_online_budget(pass, c);
}

PassMode decide_mode(double next_pass_budget_s, double train_time_s) {
    return next_pass_budget_s < train_time_s ? PassMode::TrainOffline : PassMode::TrainOnline;
}

PassDecision fedsatschedule_decide(const orbital::ContactPlan& plan, int satellite, int pass, double train_time_s) {
    const auto& passes = plan.passes.at(static_cast<std::size_t>(satellite));
    if (pass < 0 || pass >= static_cast<int>(passes.size())) throw DomainError("pass index out of range");
    if (pass + 1 >= static_cast<int>(passes.size())) return {pass, PassMode::TrainOffline};
    return {pass, decide_mode(passes[static_cast<std::size_t>(pass) + 1].duration(), train_time_s)};
}

PassDecision fedsatschedule_decide(const orbital::ContactPlan& plan, const CommTable& comm, int satellite, int pass,
                                   double train_time_s) {
    const auto& passes = plan.passes.at(static_cast<std::size_t>(satellite));
    if (pass < 0 || pass >= static_cast<int>(passes.size())) throw DomainError("pass index out of range");
    if (pass + 1 >= static_cast<int>(passes.size())) return {pass, PassMode::TrainOffline};
    const auto next = static_cast<std::size_t>(pass) + 1;
    const double budget = effective_online_budget(passes[next], comm.at(static_cast<std::size_t>(satellite)).at(next));
    return {pass, decide_mode(budget, train_time_s)};
}

DecisionTable fedsat_decisions(const orbital::ContactPlan& plan) {
    DecisionTable table(plan.passes.size());
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        for (std::size_t n = 0; n < plan.passes[k].size(); ++n) {
            table[k].push_back({static_cast<int>(n), PassMode::TrainOffline});
        }
    }
    return table;
}

DecisionTable fedsatschedule_decisions(const orbital::ContactPlan& plan, const CommTable& comm,
                                       std::span<const double> train_time_s, bool strict_online_budget) {
    check_tables(plan, comm, train_time_s);
    DecisionTable table(plan.passes.size());
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        const int sat = static_cast<int>(k);
        for (std::size_t n = 0; n < plan.passes[k].size(); ++n) {
            const int pass = static_cast<int>(n);
            table[k].push_back(strict_online_budget
                                   ? fedsatschedule_decide(plan, comm, sat, pass, train_time_s[k])
                                   : fedsatschedule_decide(plan, sat, pass, train_time_s[k]));
        }
    }
    return table;
}

// ---------------------------------------------------------------------------

std::vector<double> TransmissionSchedule::dl_instants(int satellite) const {
    std::vector<double> out;
    for (const auto& c : cycles.at(static_cast<std::size_t>(satellite))) out.push_back(c.dl.start_s);
    return out;
}

std::vector<double> TransmissionSchedule::ul_instants(int satellite) const {
    std::vector<double> out;
    for (const auto& c : cycles.at(static_cast<std::size_t>(satellite))) {
        if (c.ul) out.push_back(c.ul->start_s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t TransmissionSchedule::completed_updates() const {
    std::size_t n = 0;
    for (const auto& sat : cycles) {
        for (const auto& c : sat) n += c.ul.has_value() ? 1 : 0;
    }
    return n;
}

bool LinkArbiter::has_room(double start_s, double end_s) const {
    // Concurrency inside [start, end) peaks at start or at some booked start.
    auto load_at = [&](double t) {
        int n = 0;
        for (const auto& [s, e] : booked_) n += (s <= t && t < e) ? 1 : 0;
        return n;
    };
    if (load_at(start_s) >= max_links_) return false;
    for (const auto& [s, e] : booked_) {
        if (s > start_s && s < end_s && load_at(s) >= max_links_) return false;
    }
    return true;
}

std::optional<double> LinkArbiter::book(double earliest_s, double duration_s, double window_end_s) {
    if (max_links_ <= 0) {
        if (earliest_s + duration_s > window_end_s) return std::nullopt;
        return earliest_s;
    }
    std::vector<double> candidates{earliest_s};
    for (const auto& [s, e] : booked_) {
        if (e > earliest_s && e < window_end_s) candidates.push_back(e);
    }
    std::sort(candidates.begin(), candidates.end());
    for (double start : candidates) {
        if (start + duration_s > window_end_s) break;
        if (has_room(start, start + duration_s)) {
            booked_.emplace_back(start, start + duration_s);
            return start;
        }
    }
    return std::nullopt;
}

TransmissionSchedule extract_schedule(const orbital::ContactPlan& plan, const DecisionTable& decisions,
                                      const CommTable& comm, std::span<const double> train_time_s, int max_links) {
    check_tables(plan, comm, train_time_s);
    if (decisions.size() != plan.passes.size()) throw DomainError("decisions do not cover the plan");
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        if (decisions[k].size() != plan.passes[k].size()) throw DomainError("decisions do not cover every pass");
    }

    const auto K = plan.passes.size();
    TransmissionSchedule out;
    out.cycles.resize(K);
    std::vector<std::optional<std::size_t>> pending(K);  // cycle awaiting its upload
    std::vector<bool> online_due(K, false);
    LinkArbiter arbiter(max_links);

    for (const auto& ref : passes_by_rise(plan)) {
        const auto k = static_cast<std::size_t>(ref.satellite);
        const auto& pass = plan.passes[k][static_cast<std::size_t>(ref.pass)];
        const auto& c = comm[k][static_cast<std::size_t>(ref.pass)];
        auto& cycles = out.cycles[k];
        double cursor = pass.rise_s;

        if (pending[k]) {
            auto& cyc = cycles[*pending[k]];
            if (auto start = arbiter.book(std::max(cursor, cyc.train_end_s), c.ul_s, pass.set_s)) {
                cyc.ul = Transmission{ref.pass, *start, *start + c.ul_s};
                cursor = cyc.ul->end_s;
                pending[k].reset();
            }
        }

        if (online_due[k]) {
            online_due[k] = false;
            if (!pending[k]) {
                UpdateCycle cyc;
                cyc.satellite = ref.satellite;
                cyc.mode = PassMode::TrainOnline;
                const auto dl_start = arbiter.book(cursor, c.dl_s, pass.set_s);
                if (!dl_start) throw ScheduleError(ref.satellite, ref.pass, std::max(0.0, cursor + c.dl_s - pass.set_s));
                cyc.dl = {ref.pass, *dl_start, *dl_start + c.dl_s};
                cyc.train_end_s = cyc.dl.end_s + train_time_s[k];
                const auto ul_start = arbiter.book(cyc.train_end_s, c.ul_s, pass.set_s);
                if (!ul_start) {
                    throw ScheduleError(ref.satellite, ref.pass, std::max(0.0, cyc.train_end_s + c.ul_s - pass.set_s));
                }
                cyc.ul = Transmission{ref.pass, *ul_start, *ul_start + c.ul_s};
                cursor = cyc.ul->end_s;
                cycles.push_back(cyc);
            }
        }

        if (pending[k]) continue;  // one outstanding update at a time
        if (decisions[k][static_cast<std::size_t>(ref.pass)].mode == PassMode::TrainOnline) {
            online_due[k] = true;
            continue;
        }
        if (auto dl_start = arbiter.book(cursor, c.dl_s, pass.set_s)) {
            UpdateCycle cyc;
            cyc.satellite = ref.satellite;
            cyc.mode = PassMode::TrainOffline;
            cyc.dl = {ref.pass, *dl_start, *dl_start + c.dl_s};
            cyc.train_end_s = cyc.dl.end_s + train_time_s[k];
            cycles.push_back(cyc);
            pending[k] = cycles.size() - 1;
        }
        // A download that does not fit is retried at the next pass.
    }
    return out;
}

TransmissionSchedule extract_sync_schedule(const orbital::ContactPlan& plan, const CommTable& comm,
                                           std::span<const double> train_time_s, int max_links) {
    check_tables(plan, comm, train_time_s);
    const auto K = plan.passes.size();
    TransmissionSchedule out;
    out.cycles.resize(K);
    if (K == 0) return out;

    LinkArbiter arbiter(max_links);
    std::vector<std::size_t> next_pass(K, 0);     // first pass a DL may use
    std::vector<double> not_before(K, 0.0);       // end of the satellite's last UL
    double round_open = 0.0;

    for (int round = 0;; ++round) {
        bool complete = true;
        double round_close = round_open;
        for (std::size_t k = 0; k < K && complete; ++k) {
            const auto& passes = plan.passes[k];
            UpdateCycle cyc;
            cyc.satellite = static_cast<int>(k);
            cyc.round = round;
            cyc.mode = PassMode::TrainOffline;

            std::optional<std::size_t> dl_pass;
            for (std::size_t p = next_pass[k]; p < passes.size() && !dl_pass; ++p) {
                const double earliest = std::max({passes[p].rise_s, round_open, not_before[k]});
                if (auto start = arbiter.book(earliest, comm[k][p].dl_s, passes[p].set_s)) {
                    cyc.dl = {static_cast<int>(p), *start, *start + comm[k][p].dl_s};
                    dl_pass = p;
                }
            }
            if (!dl_pass) {
                complete = false;
                break;
            }
            cyc.train_end_s = cyc.dl.end_s + train_time_s[k];
            for (std::size_t q = *dl_pass + 1; q < passes.size() && !cyc.ul; ++q) {
                const double earliest = std::max(passes[q].rise_s, cyc.train_end_s);
                if (auto start = arbiter.book(earliest, comm[k][q].ul_s, passes[q].set_s)) {
                    cyc.ul = Transmission{static_cast<int>(q), *start, *start + comm[k][q].ul_s};
                    next_pass[k] = q;
                    not_before[k] = cyc.ul->end_s;
                    round_close = std::max(round_close, cyc.ul->end_s);
                }
            }
            out.cycles[k].push_back(cyc);
            if (!cyc.ul) complete = false;
        }
        if (!complete) break;
        round_open = round_close;
    }
    return out;
}

ScheduleResult build_schedule(const orbital::ContactPlan& plan, const CommTable& comm,
                              std::span<const double> train_time_s, const ScheduleInputs& inputs) {
    ScheduleResult r;
    switch (inputs.policy) {
        case Policy::FedSat:
            r.decisions = fedsat_decisions(plan);
            r.schedule = extract_schedule(plan, r.decisions, comm, train_time_s, inputs.max_links);
            break;
        case Policy::FedSatSchedule:
            r.decisions = fedsatschedule_decisions(plan, comm, train_time_s, inputs.strict_online_budget);
            r.schedule = extract_schedule(plan, r.decisions, comm, train_time_s, inputs.max_links);
            break;
        case Policy::FedAvgSync:
            r.schedule = extract_sync_schedule(plan, comm, train_time_s, inputs.max_links);
            break;
    }
    return r;
}

double mean_time_staleness(const TransmissionSchedule& schedule) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& sat : schedule.cycles) {
        for (const auto& c : sat) {
            if (!c.ul) continue;
            sum += c.ul->end_s - c.dl.end_s;
            ++n;
        }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

double staleness_criterion(const orbital::ContactPlan&, const TransmissionSchedule& schedule) {
    const double m = mean_time_staleness(schedule);
    return std::isnan(m) ? -std::numeric_limits<double>::infinity() : -m;
}

std::size_t select_schedule(const orbital::ContactPlan& plan, std::span<const TransmissionSchedule> candidates,
                            const ScheduleCriterion& criterion) {
    if (candidates.empty()) throw DomainError("no candidate schedules");
    std::size_t best = 0;
    double best_score = criterion(plan, candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double s = criterion(plan, candidates[i]);
        if (s > best_score) {
            best = i;
            best_score = s;
        }
    }
    return best;
}

}  // namespace satfl::scheduler
