// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "satfl/cli.hpp"
#include "satfl/engine.hpp"
#include "satfl/error.hpp"
#include "satfl/io.hpp"
#include "support.hpp"

using namespace satfl;
namespace fs = std::filesystem;
namespace oc = testing::oracle;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

Scenario bundled(const char* name) { return load_scenario(testing::scenario_path(name)); }

std::string metrics_csv(const sim::SimulationResult& r) {
    std::ostringstream out;
    io::write_metrics_csv(out, r.metrics);
    return out.str();
}

Outcome orbital_period() {
    const double t500 = orbital::orbital_period(500e3), t2000 = orbital::orbital_period(2000e3);
    const double o500 = oc::period(500e3), o2000 = oc::period(2000e3);
    const bool ok = std::abs(t500 - o500) <= 1.0 && std::abs(t2000 - o2000) <= 1.0;
    return {ok, "T(500 km) = " + fmt(t500) + " s (oracle " + fmt(o500) + "), T(2000 km) = " + fmt(t2000) +
                    " s (oracle " + fmt(o2000) + ")"};
}

Outcome contact_plan_oracle() {
    const auto s = bundled("bremen_10sat.plan.ini");
    const auto plan = orbital::compute_contact_plan(s.orbit_specs(), s.station(), s.horizon_s());
    const auto gs = s.station();
    bool ok = plan.satellite_count() == 10;
    double worst = 0.0;
    std::size_t passes = 0;
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        const auto& o = s.constellation[k];
        const auto scan = oc::scan(o.altitude_km * 1e3, oc::deg(o.inclination_deg), oc::deg(o.raan_deg),
                                   oc::deg(o.phase_deg), gs.latitude_rad, gs.longitude_rad, gs.min_elevation_rad,
                                   s.horizon_s(), 1.0);
        if (scan.size() != plan.passes[k].size()) {
            ok = false;
            continue;
        }
        for (std::size_t n = 0; n < scan.size(); ++n) {
            worst = std::max({worst, std::abs(scan[n].rise - plan.passes[k][n].rise_s),
                              std::abs(scan[n].set - plan.passes[k][n].set_s)});
        }
        passes += scan.size();
    }
    ok = ok && worst <= 1.0;
    return {ok, std::to_string(passes) + " passes, pass counts " + (ok ? "identical" : "differ") +
                    ", worst rise/set offset " + fmt(worst) + " s"};
}

Outcome pass_structure() {
    const auto s = bundled("bremen_10sat.plan.ini");
    const auto plan = orbital::compute_contact_plan(s.orbit_specs(), s.station(), s.horizon_s());
    std::map<double, std::pair<double, int>> by_alt;
    bool gaps_vary = false;
    for (std::size_t k = 0; k < plan.passes.size(); ++k) {
        const double alt = plan.satellites[k].orbit.altitude_m;
        const double tp = orbital::orbital_period(alt);
        const auto& ps = plan.passes[k];
        for (std::size_t n = 0; n < ps.size(); ++n) {
            by_alt[alt].first += ps[n].duration();
            by_alt[alt].second += 1;
            if (n + 1 < ps.size() && std::abs(ps[n + 1].rise_s - ps[n].rise_s - tp) > 1.0) gaps_vary = true;
        }
    }
    const double low = by_alt[500e3].first / by_alt[500e3].second;
    const double high = by_alt[2000e3].first / by_alt[2000e3].second;
    return {high > low && gaps_vary, "mean pass 500 km " + fmt(low) + " s, 2000 km " + fmt(high) +
                                         " s, revisit gaps " + (gaps_vary ? "vary" : "all equal T_p")};
}

Outcome decision_truth_table() {
    int cases = 0, wrong = 0;
    for (double d : {60.0, 300.0, 600.0, 1800.0}) {
        for (double tl : {30.0, 900.0, 1800.0}) {
            orbital::ContactPlan plan;
            plan.passes = {{{0.0, 100.0}, {5000.0, 5000.0 + d}}};
            plan.satellites.resize(1);
            const auto got = scheduler::fedsatschedule_decide(plan, 0, 0, tl).mode;
            const auto want = d < tl ? scheduler::PassMode::TrainOffline : scheduler::PassMode::TrainOnline;
            ++cases;
            wrong += got == want ? 0 : 1;
        }
    }
    return {wrong == 0, std::to_string(cases - wrong) + "/" + std::to_string(cases) +
                            " cells correct, tie 1800/1800 included"};
}

Outcome policy_containment() {
    auto a = bundled("bremen_10sat.fedsat.ini");
    const auto plan = orbital::compute_contact_plan(a.orbit_specs(), a.station(), a.horizon_s());
    double longest = 0.0;
    for (const auto& ps : plan.passes) {
        for (const auto& p : ps) longest = std::max(longest, p.duration());
    }
    a.compute = ComputeConfig{1.5 * longest, std::nullopt, std::nullopt};
    auto b = a;
    a.scheduler.policy = scheduler::Policy::FedSat;
    b.scheduler.policy = scheduler::Policy::FedSatSchedule;
    const auto ra = sim::run_simulation(a);
    const auto rb = sim::run_simulation(b);
    const bool same_st = ra.schedule.schedule == rb.schedule.schedule;
    const bool same_csv = metrics_csv(ra) == metrics_csv(rb);
    return {same_st && same_csv, "t_l = " + fmt(1.5 * longest) + " s; ST " + (same_st ? "equal" : "differ") +
                                     ", metrics CSV " + (same_csv ? "byte-identical" : "differ")};
}

Outcome convergence_ordering() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto s = bundled("bremen_10sat.fedsat.ini");
        s.sim.seed = seed;
        s.sim.horizon_h = 48.0;
        s.compute = ComputeConfig{30.0, std::nullopt, std::nullopt};
        auto t = s;
        t.scheduler.policy = scheduler::Policy::FedSatSchedule;
        const std::vector<Scenario> pair{s, t};
        const auto cmp = sim::compare_runs(pair);
        const auto& fs_row = cmp.rows[0];
        const auto& st_row = cmp.rows[1];
        const bool faster = st_row.time_to_threshold_s &&
                            (!fs_row.time_to_threshold_s || *st_row.time_to_threshold_s <= *fs_row.time_to_threshold_s);
        const bool fresher = st_row.mean_time_staleness_s < fs_row.mean_time_staleness_s;
        ok = ok && faster && fresher;
        auto h = [](const std::optional<double>& v) { return v ? fmt(*v / 3600.0) + " h" : std::string("never"); };
        detail += (seed > 1 ? "; " : "") + std::string("seed ") + std::to_string(seed) + ": A=" + fmt(cmp.threshold) +
                  " " + h(st_row.time_to_threshold_s) + " vs " + h(fs_row.time_to_threshold_s) + ", staleness " +
                  fmt(st_row.mean_time_staleness_s) + " vs " + fmt(fs_row.mean_time_staleness_s) + " s";
    }
    return {ok, detail};
}

Outcome single_satellite_equivalence() {
    Scenario s;
    s.constellation = {OrbitConfig{500.0, 80.0, 0.0, 0.0, 1}};
    s.ground_station = GroundStationConfig{"Bremen", 53.07, 8.8, 10.0};
    for (s.sim.horizon_h = 24.0;; s.sim.horizon_h += 0.25) {
        try {
            (void)orbital::compute_contact_plan(s.orbit_specs(), s.station(), s.horizon_s());
            break;
        } catch (const ValidationError&) {
        }
    }
    const auto setup = sim::prepare_run(s);
    const auto r = sim::run_simulation(s);
    auto w = setup.initial;
    for (std::size_t c = 0; c < r.summary.uploads; ++c) {
        w = learning::local_sgd(*setup.learner, w, setup.datasets[0], setup.sgd[0],
                                sim::training_seed(s.sim.seed, 0, static_cast<int>(c)));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < w.dimension(); ++i) {
        worst = std::max(worst, std::abs(w.values[i] - r.final_global.values[i]));
    }
    return {r.summary.uploads >= 2 && worst <= 1e-12,
            std::to_string(r.summary.uploads) + " uploads, max |difference| " + fmt(worst)};
}

Outcome gradient_check() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    double worst = 0.0;
    int instances = 0;
    for (int i = 0; i < 20; ++i) {
        const int classes = 2 + static_cast<int>(rng() % 4), features = 1 + static_cast<int>(rng() % 6);
        const int hidden = 1 + static_cast<int>(rng() % 6), n = 1 + static_cast<int>(rng() % 8);
        learning::Dataset data;
        data.feature_dim = features;
        std::vector<double> x(static_cast<std::size_t>(features));
        for (int j = 0; j < n; ++j) {
            for (auto& v : x) v = g(rng);
            data.push(x, static_cast<int>(rng() % static_cast<std::uint64_t>(classes)), static_cast<std::size_t>(j));
        }
        std::vector<std::size_t> rows(data.size());
        for (std::size_t j = 0; j < rows.size(); ++j) rows[j] = j;

        for (const char* kind : {"logreg", "mlp"}) {
            const auto l = learning::make_learner(kind, classes, features, hidden);
            std::vector<double> p(l->dimension());
            for (auto& v : p) v = g(rng);
            std::vector<double> grad(p.size());
            l->loss_and_gradient(p, data, rows, grad);
            double diff = 0.0, scale = 0.0;
            const double h = 1e-6;
            for (std::size_t j = 0; j < p.size(); ++j) {
                auto q = p;
                q[j] = p[j] + h;
                const double up = l->loss_and_gradient(q, data, rows, {});
                q[j] = p[j] - h;
                const double down = l->loss_and_gradient(q, data, rows, {});
                const double fd = (up - down) / (2 * h);
                diff += (fd - grad[j]) * (fd - grad[j]);
                scale = std::max({scale, fd * fd, grad[j] * grad[j]});
            }
            worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(scale), 1e-300));
            ++instances;
        }
    }
    return {worst <= 1e-5, std::to_string(instances) + " instances (logreg and mlp), worst relative error " + fmt(worst)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), dir).string()] = s.str();
    }
    return out;
}

Outcome cli_determinism() {
    std::random_device rd;
    const auto dir = fs::temp_directory_path() / ("satfl_accept_" + std::to_string(rd()));
    cli::RunManifest m;
    m.scenario_path = testing::scenario_path("bremen_10sat.schedule.ini");
    m.out_dir = dir.string();
    std::ostringstream out, err;
    const int rc1 = cli::cmd_run(m, out, err);
    const auto first = rc1 == 0 ? snapshot(dir) : std::map<std::string, std::string>{};
    const int rc2 = cli::cmd_run(m, out, err);
    const auto second = rc2 == 0 ? snapshot(dir) : std::map<std::string, std::string>{};
    std::error_code ec;
    fs::remove_all(dir, ec);
    const bool ok = rc1 == 0 && rc2 == 0 && !first.empty() && first == second;
    return {ok, std::to_string(first.size()) + " output files " + (ok ? "byte-identical" : "differ") +
                    (err.str().empty() ? "" : ": " + err.str())};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"orbital period", orbital_period},
        {"contact plan vs 1 s brute-force scan", contact_plan_oracle},
        {"pass duration by altitude, uneven revisits", pass_structure},
        {"scheduler decision truth table", decision_truth_table},
        {"policy containment at t_l = 1.5x longest pass", policy_containment},
        {"convergence ordering, seeds 1-5", convergence_ordering},
        {"single-satellite chained SGD", single_satellite_equivalence},
        {"gradient check", gradient_check},
        {"cmd_run determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << " [" << fmt(secs)
                  << " s]: " << o.detail << '\n';
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
