#include <doctest.h>

#include <vector>

#include "satfl/error.hpp"
#include "satfl/scheduler.hpp"

using namespace satfl;
using namespace satfl::scheduler;
using orbital::Pass;

namespace {

// A hand-made plan with fixed communication times per pass.
struct Fixture {
    orbital::ContactPlan plan;
    CommTable comm;
};

Fixture make(std::vector<std::vector<Pass>> passes, double dl = 1.0, double ul = 1.0) {
    Fixture f;
    f.plan.horizon_s = 100000.0;
    f.plan.passes = std::move(passes);
    f.plan.satellites.resize(f.plan.passes.size());
    for (const auto& ps : f.plan.passes) f.comm.emplace_back(ps.size(), PassComm{1e6, dl, ul});
    return f;
}

void check_cycle_fits(const orbital::ContactPlan& plan, const UpdateCycle& c) {
    const auto& dlp = plan.passes[c.satellite][c.dl.pass];
    CHECK(c.dl.start_s >= dlp.rise_s);
    CHECK(c.dl.end_s <= dlp.set_s);
    CHECK(c.train_end_s >= c.dl.end_s);
    if (c.ul) {
        const auto& ulp = plan.passes[c.satellite][c.ul->pass];
        CHECK(c.ul->start_s >= ulp.rise_s);
        CHECK(c.ul->end_s <= ulp.set_s);
        CHECK(c.ul->start_s >= c.train_end_s);
        if (c.mode == PassMode::TrainOnline) CHECK(c.ul->pass == c.dl.pass);
    }
}

}  // namespace

TEST_CASE("policy names") {
    CHECK(parse_policy("fedsat") == Policy::FedSat);
    CHECK(parse_policy("fedsatschedule") == Policy::FedSatSchedule);
    CHECK(parse_policy("fedavg_sync") == Policy::FedAvgSync);
    CHECK(to_string(Policy::FedSatSchedule) == "fedsatschedule");
    CHECK_THROWS_AS(parse_policy("fedprox"), ValidationError);
    CHECK(to_string(PassMode::TrainOffline) == "TRAIN_OFFLINE");
}

TEST_CASE("decision rule is a strict comparison") {
    CHECK(decide_mode(29.9, 30.0) == PassMode::TrainOffline);
    CHECK(decide_mode(30.0, 30.0) == PassMode::TrainOnline);
    CHECK(decide_mode(600.0, 30.0) == PassMode::TrainOnline);

    auto f = make({{{0, 100}, {1000, 1060}, {2000, 2500}}});
    CHECK(fedsatschedule_decide(f.plan, 0, 0, 60.0).mode == PassMode::TrainOnline);
    CHECK(fedsatschedule_decide(f.plan, 0, 0, 61.0).mode == PassMode::TrainOffline);
    // Last pass has no successor.
    CHECK(fedsatschedule_decide(f.plan, 0, 2, 1.0).mode == PassMode::TrainOffline);
    CHECK_THROWS_AS(fedsatschedule_decide(f.plan, 0, 3, 1.0), DomainError);
    // The strict budget subtracts both transfers: 60 - 1 - 1 = 58.
    CHECK(fedsatschedule_decide(f.plan, f.comm, 0, 0, 58.0).mode == PassMode::TrainOnline);
    CHECK(fedsatschedule_decide(f.plan, f.comm, 0, 0, 58.5).mode == PassMode::TrainOffline);
}

TEST_CASE("FedSat schedule: upload then download at every visit") {
    auto f = make({{{0, 100}, {1000, 1100}, {2000, 2100}, {3000, 3100}}});
    const std::vector<double> tl{50.0};
    const auto s = extract_schedule(f.plan, fedsat_decisions(f.plan), f.comm, tl);
    REQUIRE(s.cycles[0].size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = s.cycles[0][i];
        CHECK(c.mode == PassMode::TrainOffline);
        CHECK(c.dl.pass == static_cast<int>(i));
        CHECK(c.train_end_s == doctest::Approx(c.dl.end_s + 50.0));
        check_cycle_fits(f.plan, c);
    }
    // Pass 1 starts with the upload of cycle 0 and then downloads cycle 1.
    CHECK(s.cycles[0][0].ul->start_s == 1000.0);
    CHECK(s.cycles[0][1].dl.start_s == 1001.0);
    CHECK_FALSE(s.cycles[0][3].ul.has_value());
    CHECK(s.completed_updates() == 3);
    CHECK(s.dl_instants(0).size() == s.ul_instants(0).size() + 1);
}

TEST_CASE("FedSatSchedule: online cycles live inside one pass") {
    auto f = make({{{0, 100}, {1000, 1100}, {2000, 2010}, {3000, 3100}, {4000, 4100}}});
    const std::vector<double> tl{50.0};
    const auto d = fedsatschedule_decisions(f.plan, f.comm, tl, true);
    CHECK(d[0][0].mode == PassMode::TrainOnline);
    CHECK(d[0][1].mode == PassMode::TrainOffline);  // pass 2 is too short
    CHECK(d[0][2].mode == PassMode::TrainOnline);
    const auto s = extract_schedule(f.plan, d, f.comm, tl);
    for (const auto& c : s.cycles[0]) check_cycle_fits(f.plan, c);
    REQUIRE(s.cycles[0].size() >= 2);
    const auto& first = s.cycles[0][0];
    CHECK(first.mode == PassMode::TrainOnline);
    CHECK(first.dl.pass == 1);
    CHECK(first.dl.start_s == 1000.0);
    CHECK(first.ul->start_s == doctest::Approx(1051.0));
    CHECK(first.ul->end_s - first.dl.end_s == doctest::Approx(51.0));
}

TEST_CASE("policy containment when training outlasts every pass") {
    auto f = make({{{0, 100}, {1000, 1100}, {2000, 2300}}, {{500, 700}, {1500, 1600}}});
    const std::vector<double> tl{450.0, 450.0};
    const auto a = build_schedule(f.plan, f.comm, tl, {Policy::FedSat, true, 0});
    const auto b = build_schedule(f.plan, f.comm, tl, {Policy::FedSatSchedule, true, 0});
    CHECK(a.schedule == b.schedule);
    CHECK(a.decisions == b.decisions);
}

TEST_CASE("a loose online budget can be infeasible") {
    auto f = make({{{0, 100}, {1000, 1050}}}, 5.0, 5.0);
    const std::vector<double> tl{45.0};
    const auto d = fedsatschedule_decisions(f.plan, f.comm, tl, false);
    REQUIRE(d[0][0].mode == PassMode::TrainOnline);
    try {
        (void)extract_schedule(f.plan, d, f.comm, tl);
        FAIL("expected a schedule error");
    } catch (const ScheduleError& e) {
        CHECK(e.satellite() == 0);
        CHECK(e.pass() == 1);
        CHECK(e.deficit_s() == doctest::Approx(5.0));
    }
}

TEST_CASE("link cap serialises transfers") {
    auto f = make({{{0, 100}, {1000, 1100}}, {{0, 100}, {1000, 1100}}}, 10.0, 10.0);
    const std::vector<double> tl{30.0, 30.0};
    const auto s = build_schedule(f.plan, f.comm, tl, {Policy::FedSat, true, 1}).schedule;
    std::vector<Transmission> all;
    for (const auto& sat : s.cycles) {
        for (const auto& c : sat) {
            all.push_back(c.dl);
            if (c.ul) all.push_back(*c.ul);
        }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            CHECK((all[i].end_s <= all[j].start_s || all[j].end_s <= all[i].start_s));
        }
    }
    LinkArbiter arb(1);
    CHECK(arb.book(0.0, 10.0, 100.0) == 0.0);
    CHECK(arb.book(0.0, 10.0, 100.0) == 10.0);
    CHECK_FALSE(arb.book(0.0, 90.0, 100.0).has_value());
}

TEST_CASE("synchronous rounds") {
    auto f = make({{{0, 100}, {1000, 1100}, {2000, 2100}, {3000, 3100}}, {{500, 600}, {1500, 1600}, {2500, 2600}}});
    const std::vector<double> tl{30.0, 30.0};
    const auto s = extract_sync_schedule(f.plan, f.comm, tl);
    // Every completed round has one upload per satellite, and the next round
    // only opens after the slowest upload of the previous one.
    const auto rounds0 = s.cycles[0].size();
    REQUIRE(rounds0 >= 1);
    for (std::size_t k = 0; k < 2; ++k) {
        for (const auto& c : s.cycles[k]) check_cycle_fits(f.plan, c);
    }
    const auto& r0a = s.cycles[0][0];
    const auto& r0b = s.cycles[1][0];
    REQUIRE(r0a.ul);
    REQUIRE(r0b.ul);
    CHECK(r0a.ul->pass > r0a.dl.pass);
    if (s.cycles[0].size() > 1) {
        CHECK(s.cycles[0][1].dl.start_s >= std::max(r0a.ul->end_s, r0b.ul->end_s));
        CHECK(s.cycles[0][1].round == 1);
    }
    const auto none = extract_sync_schedule(orbital::ContactPlan{}, CommTable{}, std::vector<double>{});
    CHECK(none.cycles.empty());
}

TEST_CASE("schedule selection") {
    auto f = make({{{0, 100}, {1000, 1100}, {2000, 2100}}});
    const std::vector<double> tl{30.0};
    const std::vector<TransmissionSchedule> cands{
        build_schedule(f.plan, f.comm, tl, {Policy::FedSat, true, 0}).schedule,
        build_schedule(f.plan, f.comm, tl, {Policy::FedSatSchedule, true, 0}).schedule};
    CHECK(mean_time_staleness(cands[1]) < mean_time_staleness(cands[0]));
    CHECK(select_schedule(f.plan, cands, staleness_criterion) == 1);
    CHECK_THROWS_AS(select_schedule(f.plan, std::vector<TransmissionSchedule>{}, staleness_criterion), DomainError);
}
