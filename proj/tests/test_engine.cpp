#include <doctest.h>

#include <set>
#include <sstream>

#include "satfl/engine.hpp"
#include "satfl/error.hpp"
#include "satfl/io.hpp"
#include "support.hpp"

using namespace satfl;
using namespace satfl::sim;

namespace {

Scenario bremen(const char* name = "bremen_10sat.fedsat.ini") { return load_scenario(testing::scenario_path(name)); }

// One 500 km satellite over Bremen, with the horizon nudged into off-time.
Scenario single_satellite(double hours) {
    Scenario s;
    s.constellation = {OrbitConfig{500.0, 80.0, 0.0, 0.0, 1}};
    s.ground_station = GroundStationConfig{"Bremen", 53.07, 8.8, 10.0};
    s.learner.samples_per_class = 30;
    s.learner.test_per_class = 20;
    for (s.sim.horizon_h = hours;; s.sim.horizon_h += 0.25) {
        try {
            (void)orbital::compute_contact_plan(s.orbit_specs(), s.station(), s.horizon_s());
            return s;
        } catch (const ValidationError&) {
        }
    }
}

std::string metrics_csv(const SimulationResult& r) {
    std::ostringstream out;
    io::write_metrics_csv(out, r.metrics);
    return out.str();
}

}  // namespace

TEST_CASE("event ordering at equal times") {
    CHECK(event_before({5.0, EventKind::Rise, 3, 0, -1}, {5.0, EventKind::UlComplete, 0, 0, 0}));
    CHECK(event_before({5.0, EventKind::UlComplete, 3, 0, 0}, {5.0, EventKind::TrainComplete, 0, 0, 0}));
    CHECK(event_before({5.0, EventKind::DlComplete, 3, 0, 0}, {5.0, EventKind::Set, 0, 0, -1}));
    CHECK(event_before({5.0, EventKind::Set, 3, 0, -1}, {5.0, EventKind::Eval, -1, -1, -1}));
    CHECK(event_before({4.0, EventKind::Eval, -1, -1, -1}, {5.0, EventKind::Rise, 0, 0, -1}));
    CHECK(to_string(EventKind::TrainComplete) == "TRAIN_COMPLETE");
}

TEST_CASE("empty constellation only evaluates") {
    Scenario s;
    s.ground_station = GroundStationConfig{"x", 10.0, 10.0, 10.0};
    s.sim.horizon_h = 2.0;
    const auto r = run_simulation(s);
    REQUIRE(r.metrics.rows.size() == 13);
    for (const auto& row : r.metrics.rows) {
        CHECK(row.is_eval());
        CHECK(row.global_epoch == 0);
        CHECK(*row.test_accuracy == *r.metrics.rows.front().test_accuracy);
    }
    CHECK(r.summary.uploads == 0);
    CHECK(r.final_global == prepare_run(s).initial);
}

TEST_CASE("single satellite matches chained local SGD") {
    const Scenario s = single_satellite(24.0);
    const auto setup = prepare_run(s);
    const auto r = run_simulation(s);
    const auto m = r.summary.uploads;
    REQUIRE(m >= 2);

    auto w = setup.initial;
    for (std::size_t c = 0; c < m; ++c) {
        w = learning::local_sgd(*setup.learner, w, setup.datasets[0], setup.sgd[0],
                                training_seed(s.sim.seed, 0, static_cast<int>(c)));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < w.dimension(); ++i) {
        worst = std::max(worst, std::abs(w.values[i] - r.final_global.values[i]));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("identical inputs give identical logs") {
    const auto a = run_simulation(bremen());
    const auto b = run_simulation(bremen());
    CHECK(metrics_csv(a) == metrics_csv(b));
    CHECK(a.final_global == b.final_global);

    auto other = bremen();
    other.sim.seed = 2;
    CHECK(metrics_csv(run_simulation(other)) != metrics_csv(a));
}

TEST_CASE("run invariants") {
    for (const char* name : {"bremen_10sat.fedsat.ini", "bremen_10sat.schedule.ini"}) {
        CAPTURE(name);
        const auto s = bremen(name);
        const auto r = run_simulation(s);
        const auto gs = s.station();

        double last = 0.0;
        std::size_t ul_events = 0;
        for (const auto& e : r.trace) {
            CHECK(e.time_s >= last);
            CHECK(e.time_s <= s.horizon_s());
            last = e.time_s;
            if (e.kind == EventKind::UlComplete) ++ul_events;
        }
        CHECK(ul_events == r.summary.global_epoch);
        CHECK(r.summary.uploads == r.summary.global_epoch);
        CHECK(r.summary.uploads == r.schedule.schedule.completed_updates());

        for (std::size_t k = 0; k < r.schedule.schedule.cycles.size(); ++k) {
            const auto& sat = r.plan.satellites[k];
            auto visible = [&](double t) { return orbital::elevation_at(sat, gs, t) >= gs.min_elevation_rad - 1e-9; };
            for (const auto& c : r.schedule.schedule.cycles[k]) {
                CHECK(visible(c.dl.start_s));
                CHECK(visible(c.dl.end_s));
                CHECK(c.train_end_s == c.dl.end_s + *s.compute.train_time_s);
                if (c.ul) {
                    CHECK(visible(c.ul->start_s));
                    CHECK(visible(c.ul->end_s));
                    if (c.mode == scheduler::PassMode::TrainOnline) {
                        CHECK(c.ul->pass == c.dl.pass);
                    } else {
                        CHECK(c.ul->pass > c.dl.pass);
                    }
                }
            }
        }

        // Every DL_COMPLETE follows the RISE of its own pass.
        std::set<std::pair<int, int>> risen;
        for (const auto& e : r.trace) {
            if (e.kind == EventKind::Rise) risen.insert({e.satellite, e.pass});
            if (e.kind == EventKind::DlComplete || e.kind == EventKind::UlComplete) {
                CHECK(risen.contains({e.satellite, e.pass}));
            }
        }
    }
}

TEST_CASE("synchronous baseline aggregates whole rounds") {
    auto s = bremen();
    s.scheduler.policy = scheduler::Policy::FedAvgSync;
    const auto r = run_simulation(s);
    const auto K = static_cast<std::size_t>(r.plan.satellite_count());
    CHECK(r.summary.global_epoch >= 1);
    CHECK(r.summary.global_epoch * K <= r.summary.uploads);
    CHECK(r.summary.uploads < r.summary.global_epoch * K + K);
}

TEST_CASE("accuracy threshold") {
    MetricsLog log;
    log.rows = {{0.0, 0, {}, {}, {}, 0.1}, {10.0, 1, 0, 0, 3.0, {}}, {600.0, 1, {}, {}, {}, 0.6},
                {1200.0, 1, {}, {}, {}, 0.7}};
    CHECK(time_to_threshold(log, 0.6) == 600.0);
    CHECK(time_to_threshold(log, 0.05) == 0.0);
    CHECK_FALSE(time_to_threshold(log, 0.9).has_value());
    CHECK(log.accuracy_curve().size() == 3);
    CHECK(log.uploads().size() == 1);
}

TEST_CASE("comparisons") {
    const auto base = bremen();
    auto same = std::vector<Scenario>{base, base};
    const auto cmp = compare_runs(same);
    REQUIRE(cmp.rows.size() == 2);
    CHECK(cmp.rows[0].time_to_threshold_s == cmp.rows[1].time_to_threshold_s);
    CHECK(cmp.rows[0].final_accuracy == cmp.rows[1].final_accuracy);
    CHECK(metrics_csv(cmp.runs[0]) == metrics_csv(cmp.runs[1]));

    auto other = base;
    other.sim.seed = 9;
    auto mismatched = std::vector<Scenario>{base, other};
    CHECK_THROWS_AS(compare_runs(mismatched), ValidationError);
    CHECK_THROWS_AS(compare_runs(std::span<const Scenario>{}), ValidationError);
}
