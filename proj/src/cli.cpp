#include "satfl/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "satfl/engine.hpp"
#include "satfl/error.hpp"
#include "satfl/io.hpp"

namespace satfl::cli {

namespace fs = std::filesystem;

namespace {

using FileSet = std::vector<std::pair<fs::path, std::string>>;

void write_files(const fs::path& dir, const FileSet& files) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto& [rel, content] : files) {
        const auto path = dir / rel;
        fs::create_directories(path.parent_path(), ec);
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw ValidationError("cannot write '" + path.string() + "'");
        f << content;
        if (!f) throw ValidationError("failed writing '" + path.string() + "'");
    }
}

template <typename F>
std::string render(F&& writer) {
    std::ostringstream s;
    writer(s);
    return s.str();
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

std::string time_or_none(const std::optional<double>& t) {
    return t ? format_number(*t / 3600.0) + " h" : std::string("not reached");
}

void print_summary(std::ostream& out, const sim::RunSummary& s) {
    out << s.policy << ": " << s.uploads << " uploads over " << s.passes << " passes, accuracy "
        << format_number(s.initial_accuracy) << " -> " << format_number(s.final_accuracy) << ", threshold "
        << format_number(s.threshold) << " reached at " << time_or_none(s.time_to_threshold_s)
        << ", mean time staleness " << format_number(s.mean_time_staleness_s) << " s\n";
}

}  // namespace

Scenario resolve_scenario(const RunManifest& manifest) {
    if (manifest.scenario_path.empty()) throw ValidationError("--scenario is required");
    Scenario s = load_scenario(manifest.scenario_path);
    if (manifest.seed) s.sim.seed = *manifest.seed;
    if (manifest.policy) s.scheduler.policy = scheduler::parse_policy(*manifest.policy);
    if (manifest.train_time_s) {
        if (!(*manifest.train_time_s > 0.0)) throw ValidationError("--tl must be positive");
        s.compute = ComputeConfig{};
        s.compute.train_time_s = *manifest.train_time_s;
    }
    if (manifest.horizon_h) {
        if (!(*manifest.horizon_h > 0.0)) throw ValidationError("--horizon must be positive");
        s.sim.horizon_h = *manifest.horizon_h;
    }
    validate(s);
    return s;
}

int cmd_plan(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario s = resolve_scenario(manifest);
        orbital::ContactPlanOptions options;
        options.coarse_step_s = s.sim.coarse_step_s;
        const auto plan = orbital::compute_contact_plan(s.orbit_specs(), s.station(), s.horizon_s(), options);
        const auto& lc = s.learner;
        const double bits = s.sim.model_bits.value_or(
            32.0 * static_cast<double>(learning::make_learner(lc.kind, lc.classes, lc.feature_dim, lc.hidden)->dimension()));
        const auto comm = scheduler::compute_comm_table(plan, s.downlink_budget(), s.uplink_budget(), bits);

        FileSet files;
        files.emplace_back("contact_plan.csv", render([&](std::ostream& o) { io::write_contact_plan_csv(o, plan, comm); }));
        files.emplace_back("plan_summary.csv", render([&](std::ostream& o) { io::write_plan_summary_csv(o, plan); }));
        write_files(manifest.out_dir, files);

        out << "contact plan for " << s.ground_station.name << ": " << plan.satellite_count() << " satellites, "
            << plan.total_passes() << " passes over " << format_number(s.sim.horizon_h) << " h\n";
        for (std::size_t k = 0; k < plan.passes.size(); ++k) {
            double total = 0.0;
            for (const auto& p : plan.passes[k]) total += p.duration();
            out << "  S" << k << ": " << plan.passes[k].size() << " passes, mean "
                << (plan.passes[k].empty() ? std::string("-")
                                           : format_number(total / static_cast<double>(plan.passes[k].size())))
                << " s\n";
        }
        return kExitOk;
    });
}

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario s = resolve_scenario(manifest);
        const auto r = sim::run_simulation(s);

        FileSet files;
        files.emplace_back("scenario.ini", serialize_scenario(s));
        files.emplace_back("contact_plan.csv", render([&](std::ostream& o) { io::write_contact_plan_csv(o, r.plan, r.comm); }));
        files.emplace_back("schedule.csv", render([&](std::ostream& o) { io::write_schedule_csv(o, r.schedule.schedule); }));
        files.emplace_back("metrics.csv", render([&](std::ostream& o) { io::write_metrics_csv(o, r.metrics); }));
        files.emplace_back("summary.txt", render([&](std::ostream& o) { io::write_run_summary(o, r.summary); }));
        write_files(manifest.out_dir, files);

        print_summary(out, r.summary);
        return kExitOk;
    });
}

int cmd_compare(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (manifest.policies.size() < 2) throw ValidationError("compare needs at least two policies");
        const Scenario base = resolve_scenario(manifest);
        std::vector<Scenario> scenarios;
        for (const auto& name : manifest.policies) {
            Scenario s = base;
            s.scheduler.policy = scheduler::parse_policy(name);
            scenarios.push_back(s);
        }
        const auto cmp = sim::compare_runs(scenarios);

        FileSet files;
        files.emplace_back("scenario.ini", serialize_scenario(base));
        files.emplace_back("contact_plan.csv",
                           render([&](std::ostream& o) { io::write_contact_plan_csv(o, cmp.runs[0].plan, cmp.runs[0].comm); }));
        files.emplace_back("comparison.csv", render([&](std::ostream& o) { io::write_comparison_csv(o, cmp); }));
        std::map<std::string, int> used;
        for (const auto& r : cmp.runs) {
            const int n = ++used[r.summary.policy];
            const fs::path dir = n == 1 ? r.summary.policy : r.summary.policy + "-" + std::to_string(n);
            files.emplace_back(dir / "metrics.csv", render([&](std::ostream& o) { io::write_metrics_csv(o, r.metrics); }));
            files.emplace_back(dir / "schedule.csv",
                               render([&](std::ostream& o) { io::write_schedule_csv(o, r.schedule.schedule); }));
            files.emplace_back(dir / "summary.txt", render([&](std::ostream& o) { io::write_run_summary(o, r.summary); }));
        }
        write_files(manifest.out_dir, files);

        out << "threshold accuracy " << format_number(cmp.threshold) << '\n';
        for (const auto& r : cmp.runs) print_summary(out, r.summary);
        return kExitOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Federated learning over LEO satellite constellations: contact plans, schedules and runs"};
    app.require_subcommand(1);

    RunManifest m;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> policy;
    std::optional<double> tl, horizon;
    std::string policies = "fedsat,fedsatschedule";

    auto common = [&](CLI::App* sub, bool with_policy) {
        sub->add_option("--scenario", m.scenario_path, "Scenario file")->required();
        sub->add_option("--out", m.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override sim.seed");
        sub->add_option("--tl", tl, "Override the training time t_l in seconds");
        sub->add_option("--horizon", horizon, "Override the horizon in hours");
        if (with_policy) sub->add_option("--policy", policy, "fedsat | fedsatschedule | fedavg_sync");
    };
    auto* plan = app.add_subcommand("plan", "Compute the contact plan");
    common(plan, false);
    auto* run = app.add_subcommand("run", "Run one simulation");
    common(run, true);
    auto* compare = app.add_subcommand("compare", "Run several policies on the same scenario");
    common(compare, false);
    compare->add_option("--policies", policies, "Comma-separated policy list")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    m.seed = seed;
    m.policy = policy;
    m.train_time_s = tl;
    m.horizon_h = horizon;
    if (*plan) return cmd_plan(m, out, err);
    if (*run) return cmd_run(m, out, err);

    std::stringstream list(policies);
    for (std::string item; std::getline(list, item, ',');) {
        if (!item.empty()) m.policies.push_back(item);
    }
    return cmd_compare(m, out, err);
}

}  // namespace satfl::cli
