#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "satfl/engine.hpp"
#include "satfl/error.hpp"
#include "satfl/io.hpp"

namespace py = pybind11;
using namespace satfl;

namespace {

Scenario with_overrides(const std::string& text, std::optional<std::string> policy, std::optional<std::uint64_t> seed) {
    Scenario s = parse_scenario(text);
    if (policy) s.scheduler.policy = scheduler::parse_policy(*policy);
    if (seed) s.sim.seed = *seed;
    return s;
}

py::dict summary_dict(const sim::RunSummary& s) {
    py::dict d;
    d["policy"] = s.policy;
    d["seed"] = s.seed;
    d["horizon_s"] = s.horizon_s;
    d["eval_period_s"] = s.eval_period_s;
    d["model_bits"] = s.model_bits;
    d["passes"] = s.passes;
    d["uploads"] = s.uploads;
    d["global_epoch"] = s.global_epoch;
    d["initial_accuracy"] = s.initial_accuracy;
    d["final_accuracy"] = s.final_accuracy;
    d["threshold"] = s.threshold;
    d["time_to_threshold_s"] = s.time_to_threshold_s;
    d["mean_time_staleness_s"] = s.mean_time_staleness_s;
    d["mean_epoch_staleness"] = s.mean_epoch_staleness;
    return d;
}

py::dict result_dict(const sim::SimulationResult& r) {
    py::dict d;
    d["summary"] = summary_dict(r.summary);
    d["accuracy"] = r.metrics.accuracy_curve();
    std::ostringstream csv;
    io::write_metrics_csv(csv, r.metrics);
    d["metrics_csv"] = csv.str();
    d["final_params"] = r.final_global.values;
    return d;
}

}  // namespace

PYBIND11_MODULE(_satfl, m) {
    m.doc() = "Bindings for the satfl federated-learning constellation simulator";

    auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<LinkUnavailable>(m, "LinkUnavailable", PyExc_RuntimeError);
    (void)validation;

    m.def("orbital_period", [](double h) { return orbital::orbital_period(h); }, py::arg("altitude_m"));
    m.def("path_loss", [](double d, double f) { return link::path_loss(d, f); }, py::arg("distance_m"),
          py::arg("carrier_hz"));
    m.def("decide_mode",
          [](double budget, double tl) { return scheduler::to_string(scheduler::decide_mode(budget, tl)); },
          py::arg("next_pass_budget_s"), py::arg("train_time_s"));

    m.def("normalize_scenario", [](const std::string& text) { return serialize_scenario(parse_scenario(text)); },
          py::arg("text"), "Parse and re-serialize a scenario.");
    m.def("load_scenario", [](const std::string& path) { return serialize_scenario(load_scenario(path)); },
          py::arg("path"), "Load a scenario file and return its normalized text.");

    m.def(
        "contact_plan",
        [](const std::string& text) {
            const Scenario s = parse_scenario(text);
            orbital::ContactPlanOptions options;
            options.coarse_step_s = s.sim.coarse_step_s;
            const auto plan = orbital::compute_contact_plan(s.orbit_specs(), s.station(), s.horizon_s(), options);
            std::vector<std::vector<std::pair<double, double>>> out(plan.passes.size());
            for (std::size_t k = 0; k < plan.passes.size(); ++k) {
                for (const auto& p : plan.passes[k]) out[k].emplace_back(p.rise_s, p.set_s);
            }
            return out;
        },
        py::arg("text"), "Rise/set pairs per satellite.");

    m.def(
        "run",
        [](const std::string& text, std::optional<std::string> policy, std::optional<std::uint64_t> seed) {
            const Scenario s = with_overrides(text, policy, seed);
            py::gil_scoped_release release;
            auto r = sim::run_simulation(s);
            py::gil_scoped_acquire acquire;
            return result_dict(r);
        },
        py::arg("text"), py::arg("policy") = py::none(), py::arg("seed") = py::none());

    m.def(
        "compare",
        [](const std::string& text, const std::vector<std::string>& policies, std::optional<std::uint64_t> seed) {
            std::vector<Scenario> runs;
            for (const auto& p : policies) runs.push_back(with_overrides(text, p, seed));
            sim::Comparison cmp;
            {
                py::gil_scoped_release release;
                cmp = sim::compare_runs(runs);
            }
            py::dict d;
            d["threshold"] = cmp.threshold;
            py::list rows;
            for (const auto& r : cmp.runs) rows.append(summary_dict(r.summary));
            d["runs"] = rows;
            return d;
        },
        py::arg("text"), py::arg("policies"), py::arg("seed") = py::none());
}
