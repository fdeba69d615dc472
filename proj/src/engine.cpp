#include "satfl/engine.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <queue>
#include <set>

#include "satfl/error.hpp"

namespace satfl::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return splitmix64(splitmix64(seed) ^ stream); }

constexpr std::uint64_t kDataStream = 0x64617461;      // "data"
constexpr std::uint64_t kInitStream = 0x696e6974;      // "init"
constexpr std::uint64_t kPartitionStream = 0x70617274; // "part"

[[noreturn]] void invariant_failure(const std::string& what) {
    throw std::logic_error("simulation invariant violated: " + what);
}

struct EventAfter {
    bool operator()(const SimEvent& a, const SimEvent& b) const { return event_before(b, a); }
};

}  // namespace

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Rise: return "RISE";
        case EventKind::UlComplete: return "UL_COMPLETE";
        case EventKind::TrainComplete: return "TRAIN_COMPLETE";
        case EventKind::DlComplete: return "DL_COMPLETE";
        case EventKind::Set: return "SET";
        case EventKind::Eval: return "EVAL";
    }
    return "?";
}

bool event_before(const SimEvent& a, const SimEvent& b) {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.satellite != b.satellite) return a.satellite < b.satellite;
    return a.cycle < b.cycle;
}

std::vector<std::pair<double, double>> MetricsLog::accuracy_curve() const {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rows) {
        if (r.test_accuracy) out.emplace_back(r.time_s, *r.test_accuracy);
    }
    return out;
}

std::vector<MetricsRow> MetricsLog::uploads() const {
    std::vector<MetricsRow> out;
    for (const auto& r : rows) {
        if (r.satellite) out.push_back(r);
    }
    return out;
}

std::vector<std::vector<int>> partition_groups(const Scenario& scenario) {
    const auto sats = orbital::enumerate_satellites(scenario.orbit_specs());
    if (sats.empty()) return {};
    if (scenario.learner.partition == "iid") {
        std::vector<int> all(sats.size());
        for (std::size_t k = 0; k < sats.size(); ++k) all[k] = static_cast<int>(k);
        return {all};
    }
    std::map<double, std::vector<int>> by_altitude;
    for (std::size_t k = 0; k < sats.size(); ++k) by_altitude[sats[k].orbit.altitude_m].push_back(static_cast<int>(k));
    std::vector<std::vector<int>> groups;
    for (auto& [alt, ids] : by_altitude) groups.push_back(std::move(ids));
    return groups;
}

std::uint64_t training_seed(std::uint64_t run_seed, int satellite, int cycle) {
    return derive_seed(derive_seed(run_seed, static_cast<std::uint64_t>(satellite) + 1),
                       static_cast<std::uint64_t>(cycle) + 1);
}

RunSetup prepare_run(const Scenario& scenario) {
    validate(scenario);
    RunSetup setup;
    setup.scenario = scenario;

    const auto orbits = scenario.orbit_specs();
    orbital::ContactPlanOptions options;
    options.coarse_step_s = scenario.sim.coarse_step_s;
    setup.plan = orbital::compute_contact_plan(orbits, scenario.station(), scenario.horizon_s(), options);
    const auto K = static_cast<std::size_t>(setup.plan.satellite_count());

    const auto& lc = scenario.learner;
    setup.learner = learning::make_learner(lc.kind, lc.classes, lc.feature_dim, lc.hidden);

    learning::TaskSpec task;
    task.classes = lc.classes;
    task.feature_dim = lc.feature_dim;
    task.samples_per_class = lc.samples_per_class;
    task.test_per_class = lc.test_per_class;
    task.spread = lc.spread;
    task.seed = derive_seed(scenario.sim.seed, kDataStream);
    auto data = learning::generate_synthetic_task(task);
    setup.test = std::move(data.test);
    if (K > 0) {
        const auto groups = partition_groups(scenario);
        try {
            setup.datasets = learning::partition_non_iid(data.train, groups, lc.classes,
                                                         derive_seed(scenario.sim.seed, kPartitionStream));
        } catch (const DomainError& e) {
            throw ValidationError(std::string("cannot partition the training data: ") + e.what());
        }
    }
    setup.initial = setup.learner->initial_params(derive_seed(scenario.sim.seed, kInitStream));
    setup.model_bits = scenario.sim.model_bits.value_or(setup.initial.wire_bits());

    for (std::size_t k = 0; k < K; ++k) {
        learning::SgdConfig sgd;
        sgd.eta = lc.eta;
        sgd.batch_size = lc.batch_size;
        sgd.iterations = lc.local_iters > 0
                             ? lc.local_iters
                             : learning::steps_per_epochs(setup.datasets[k].size(), lc.batch_size, lc.local_epochs);
        setup.sgd.push_back(sgd);
        if (scenario.compute.train_time_s) {
            setup.train_time_s.push_back(*scenario.compute.train_time_s);
        } else {
            learning::ComputeProfile profile{*scenario.compute.cycles_per_bit, *scenario.compute.cpu_hz, sgd.iterations};
            setup.train_time_s.push_back(learning::training_time(profile, setup.datasets[k].data_bits()));
        }
    }

    setup.comm = scheduler::compute_comm_table(setup.plan, scenario.downlink_budget(), scenario.uplink_budget(),
                                               setup.model_bits);
    scheduler::ScheduleInputs inputs;
    inputs.policy = scenario.scheduler.policy;
    inputs.strict_online_budget = scenario.scheduler.strict_online_budget;
    inputs.max_links = scenario.scheduler.max_concurrent_links;
    setup.schedule = scheduler::build_schedule(setup.plan, setup.comm, setup.train_time_s, inputs);
    return setup;
}

std::optional<double> time_to_threshold(const MetricsLog& log, double threshold) {
    for (const auto& r : log.rows) {
        if (r.test_accuracy && *r.test_accuracy >= threshold) return r.time_s;
    }
    return std::nullopt;
}

void apply_threshold(RunSummary& summary, const MetricsLog& log, double threshold) {
    summary.threshold = threshold;
    summary.time_to_threshold_s = time_to_threshold(log, threshold);
}

SimulationResult run_simulation(const Scenario& scenario) { return run_simulation(prepare_run(scenario)); }

SimulationResult run_simulation(RunSetup setup) {
    const auto& plan = setup.plan;
    const auto& schedule = setup.schedule.schedule;
    const auto& scenario = setup.scenario;
    const int K = plan.satellite_count();
    const bool sync = scenario.scheduler.policy == scheduler::Policy::FedAvgSync;
    const double horizon = plan.horizon_s;

    std::vector<std::size_t> sizes;
    for (const auto& d : setup.datasets) sizes.push_back(d.size());
    federation::ServerState server(setup.initial, sizes);
    std::vector<federation::ClientState> clients;
    for (int k = 0; k < K; ++k) clients.emplace_back(k);

    // Cycles indexed by the pass in which their DL / UL happens.
    std::vector<std::vector<std::vector<int>>> dl_at(static_cast<std::size_t>(K)), ul_at(static_cast<std::size_t>(K));
    std::vector<std::vector<bool>> armed(static_cast<std::size_t>(K));
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
        dl_at[k].resize(plan.passes[k].size());
        ul_at[k].resize(plan.passes[k].size());
        const auto& cycles = schedule.cycles[k];
        armed[k].assign(cycles.size(), false);
        for (std::size_t i = 0; i < cycles.size(); ++i) {
            dl_at[k][static_cast<std::size_t>(cycles[i].dl.pass)].push_back(static_cast<int>(i));
            if (cycles[i].ul) ul_at[k][static_cast<std::size_t>(cycles[i].ul->pass)].push_back(static_cast<int>(i));
        }
    }

    std::priority_queue<SimEvent, std::vector<SimEvent>, EventAfter> queue;
    for (int k = 0; k < K; ++k) {
        const auto& passes = plan.passes[static_cast<std::size_t>(k)];
        for (std::size_t n = 0; n < passes.size(); ++n) {
            queue.push({passes[n].rise_s, EventKind::Rise, k, static_cast<int>(n), -1});
            queue.push({passes[n].set_s, EventKind::Set, k, static_cast<int>(n), -1});
        }
    }
    for (long i = 0;; ++i) {
        const double t = static_cast<double>(i) * scenario.sim.eval_period_s;
        if (t > horizon) break;
        queue.push({t, EventKind::Eval, -1, -1, -1});
    }

    SimulationResult result;
    std::map<int, std::vector<federation::UpdateMessage>> round_buffer;
    double time_stale_sum = 0.0, epoch_stale_sum = 0.0;
    std::size_t upload_count = 0;
    double last_time = 0.0;

    auto cycle_at = [&](const SimEvent& e) -> const scheduler::UpdateCycle& {
        if (e.satellite < 0 || e.satellite >= K) invariant_failure("event for unknown satellite");
        const auto& cycles = schedule.cycles[static_cast<std::size_t>(e.satellite)];
        if (e.cycle < 0 || e.cycle >= static_cast<int>(cycles.size())) invariant_failure("event for unknown cycle");
        return cycles[static_cast<std::size_t>(e.cycle)];
    };

    while (!queue.empty()) {
        const SimEvent ev = queue.top();
        queue.pop();
        if (ev.time_s < last_time) invariant_failure("event time went backwards");
        if (ev.time_s > horizon) invariant_failure("event after the horizon");
        last_time = ev.time_s;
        result.trace.push_back(ev);

        switch (ev.kind) {
            case EventKind::Rise: {
                if (ev.satellite < 0 || ev.satellite >= K) invariant_failure("event for unknown satellite");
                const auto k = static_cast<std::size_t>(ev.satellite);
                const auto p = static_cast<std::size_t>(ev.pass);
                for (int i : dl_at[k][p]) {
                    queue.push({schedule.cycles[k][static_cast<std::size_t>(i)].dl.end_s, EventKind::DlComplete,
                                ev.satellite, ev.pass, i});
                }
                for (int i : ul_at[k][p]) {
                    if (armed[k][static_cast<std::size_t>(i)]) {
                        queue.push({schedule.cycles[k][static_cast<std::size_t>(i)].ul->end_s, EventKind::UlComplete,
                                    ev.satellite, ev.pass, i});
                    }
                }
                break;
            }
            case EventKind::Set:
                break;
            case EventKind::DlComplete: {
                const auto& cyc = cycle_at(ev);
                clients[static_cast<std::size_t>(ev.satellite)].receive_global(server.global(), ev.time_s, server.epoch());
                const double done = ev.time_s + setup.train_time_s[static_cast<std::size_t>(ev.satellite)];
                if (done != cyc.train_end_s) invariant_failure("training end does not match the schedule");
                if (done <= horizon) queue.push({done, EventKind::TrainComplete, ev.satellite, ev.pass, ev.cycle});
                break;
            }
            case EventKind::TrainComplete: {
                const auto& cyc = cycle_at(ev);
                const auto k = static_cast<std::size_t>(ev.satellite);
                auto& client = clients[k];
                client.finish_training(learning::local_sgd(*setup.learner, client.cached_global(), setup.datasets[k],
                                                           setup.sgd[k],
                                                           training_seed(scenario.sim.seed, ev.satellite, ev.cycle)));
                armed[k][static_cast<std::size_t>(ev.cycle)] = true;
                if (cyc.ul) {
                    const auto& ul_pass = plan.passes[k][static_cast<std::size_t>(cyc.ul->pass)];
                    if (cyc.ul->start_s < ev.time_s) invariant_failure("upload scheduled before training ends");
                    // Uploads inside an already-risen pass are armed here; later ones at their RISE.
                    if (ul_pass.rise_s <= ev.time_s) {
                        queue.push({cyc.ul->end_s, EventKind::UlComplete, ev.satellite, cyc.ul->pass, ev.cycle});
                    }
                }
                break;
            }
            case EventKind::UlComplete: {
                cycle_at(ev);
                auto msg = clients[static_cast<std::size_t>(ev.satellite)].make_update();
                const auto stale = federation::record_staleness(msg, ev.time_s, server);
                if (sync) {
                    const int round = cycle_at(ev).round;
                    auto& buffer = round_buffer[round];
                    buffer.push_back(std::move(msg));
                    if (static_cast<int>(buffer.size()) == K) {
                        federation::fedavg_sync_aggregate(server, buffer);
                        round_buffer.erase(round);
                    }
                } else {
                    federation::fedsat_aggregate(server, msg);
                }
                MetricsRow row;
                row.time_s = ev.time_s;
                row.global_epoch = server.epoch();
                row.satellite = ev.satellite;
                row.epoch_staleness = stale.epoch_staleness;
                row.time_staleness_s = stale.time_staleness_s;
                result.metrics.rows.push_back(row);
                time_stale_sum += stale.time_staleness_s;
                epoch_stale_sum += static_cast<double>(stale.epoch_staleness);
                ++upload_count;
                break;
            }
            case EventKind::Eval: {
                MetricsRow row;
                row.time_s = ev.time_s;
                row.global_epoch = server.epoch();
                row.test_accuracy = learning::evaluate_accuracy(*setup.learner, server.global(), setup.test);
                result.metrics.rows.push_back(row);
                break;
            }
        }
    }

    auto& s = result.summary;
    s.policy = scheduler::to_string(scenario.scheduler.policy);
    s.seed = scenario.sim.seed;
    s.eval_period_s = scenario.sim.eval_period_s;
    s.horizon_s = horizon;
    s.model_bits = setup.model_bits;
    s.passes = plan.total_passes();
    const auto curve = result.metrics.accuracy_curve();
    if (!curve.empty()) {
        s.initial_accuracy = curve.front().second;
        s.final_accuracy = curve.back().second;
    }
    s.uploads = upload_count;
    s.global_epoch = server.epoch();
    s.mean_time_staleness_s = upload_count ? time_stale_sum / static_cast<double>(upload_count) : 0.0;
    s.mean_epoch_staleness = upload_count ? epoch_stale_sum / static_cast<double>(upload_count) : 0.0;
    apply_threshold(s, result.metrics,
                    scenario.sim.accuracy_threshold.value_or(0.5 * (s.initial_accuracy + s.final_accuracy)));

    result.final_global = server.global();
    result.plan = std::move(setup.plan);
    result.comm = std::move(setup.comm);
    result.schedule = std::move(setup.schedule);
    return result;
}

Comparison compare_runs(std::span<const Scenario> scenarios, bool parallel) {
    if (scenarios.empty()) throw ValidationError("nothing to compare");
    auto normalized = [](Scenario s) {
        s.scheduler.policy = scheduler::Policy::FedSat;
        return s;
    };
    const auto reference = normalized(scenarios.front());
    for (const auto& s : scenarios) {
        if (!(normalized(s) == reference)) throw ValidationError("compared scenarios differ in more than the policy");
    }

    Comparison cmp;
    if (parallel && scenarios.size() > 1) {
        std::vector<std::future<SimulationResult>> jobs;
        for (const auto& s : scenarios) {
            jobs.push_back(std::async(std::launch::async, [&s] { return run_simulation(s); }));
        }
        for (auto& j : jobs) cmp.runs.push_back(j.get());
    } else {
        for (const auto& s : scenarios) cmp.runs.push_back(run_simulation(s));
    }

    for (const auto& r : cmp.runs) {
        if (r.plan.passes != cmp.runs.front().plan.passes) invariant_failure("contact plans differ between compared runs");
    }

    std::size_t base = 0;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        if (scenarios[i].scheduler.policy == scheduler::Policy::FedSat) {
            base = i;
            break;
        }
    }
    const auto& b = cmp.runs[base].summary;
    cmp.threshold = reference.sim.accuracy_threshold.value_or(0.5 * (b.initial_accuracy + b.final_accuracy));

    for (auto& r : cmp.runs) {
        apply_threshold(r.summary, r.metrics, cmp.threshold);
        ComparisonRow row;
        row.policy = r.summary.policy;
        row.threshold = cmp.threshold;
        row.time_to_threshold_s = r.summary.time_to_threshold_s;
        row.final_accuracy = r.summary.final_accuracy;
        row.mean_time_staleness_s = r.summary.mean_time_staleness_s;
        row.mean_epoch_staleness = r.summary.mean_epoch_staleness;
        row.uploads = r.summary.uploads;
        cmp.rows.push_back(row);
    }
    return cmp;
}

}  // namespace satfl::sim
