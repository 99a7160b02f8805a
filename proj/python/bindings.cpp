#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "baqca/assessment.hpp"
#include "baqca/dataset.hpp"
#include "baqca/error.hpp"
#include "baqca/minimize.hpp"
#include "baqca/recommend.hpp"
#include "baqca/report.hpp"
#include "baqca/study.hpp"
#include "baqca/version.hpp"

namespace py = pybind11;
using namespace baqca;

namespace {

// Results cross the boundary as JSON text; the package parses them.

std::string qca(const std::string& path, const std::string& outcome, const std::optional<std::string>& id,
                double consistency, std::uint32_t conf_n, const std::string& solution, bool negate) {
    CaseMatrix data = load_csv(path, outcome, id);
    if (negate) data = negate_outcome(data);
    const Thresholds t{consistency, conf_n};
    const SolutionMode mode = parse_solution_mode(solution);
    const TruthTable table = build_truth_table(data, t);
    const auto s = solve(table, mode, data);
    Json j{{"outcome", data.outcome_name()}, {"negated", negate}, {"n", data.num_cases()}};
    j["result"] = s ? to_json(*s) : Json(nullptr);
    j["reason"] = s ? Json(nullptr) : Json(describe(*minimize(table, mode).reason));
    j["truth_table"] = to_json(table);
    return j.dump();
}

MarginalProfile profile_of(std::vector<double> condition_probs, double outcome_prob, std::size_t n) {
    MarginalProfile p{std::move(condition_probs), outcome_prob, n};
    p.validate();
    return p;
}

std::string assess_profile(std::vector<double> condition_probs, double outcome_prob, std::size_t n, double consistency,
                           std::uint32_t conf_n, const std::string& solution, std::size_t sims, std::size_t boot,
                           double level, std::uint64_t seed, std::size_t threads, bool trace) {
    AssessSettings s;
    s.thresholds = {consistency, conf_n};
    s.thresholds.validate();
    s.mode = parse_solution_mode(solution);
    s.sims = sims;
    s.boot = boot;
    s.level = level;
    s.seed = seed;
    s.threads = threads;
    BaqcaReport r;
    {
        py::gil_scoped_release release;
        r = assess(profile_of(std::move(condition_probs), outcome_prob, n), s);
    }
    return to_json(r, trace).dump();
}

std::string recommend_profile(std::vector<double> condition_probs, double outcome_prob, std::size_t n,
                              std::vector<double> alphas, const std::string& solution, std::size_t sims,
                              std::uint64_t seed, std::size_t threads, const std::string& model) {
    RecommendSettings s;
    s.alphas = std::move(alphas);
    s.mode = parse_solution_mode(solution);
    s.sims = sims;
    s.seed = seed;
    s.threads = threads;
    s.model = parse_recommend_model(model);
    RecommendResult r;
    {
        py::gil_scoped_release release;
        r = recommend(profile_of(std::move(condition_probs), outcome_prob, n), s);
    }
    return to_json(r).dump();
}

std::string study(std::size_t iterations, std::uint64_t seed, int min_conditions, int max_conditions,
                  std::size_t threads) {
    StudyConfig c;
    c.iterations = iterations;
    c.seed = seed;
    c.structure.conditions = {min_conditions, max_conditions};
    c.threads = threads;
    StudyModels m;
    std::size_t spurious = 0;
    {
        py::gil_scoped_release release;
        const auto records = run_study(c);
        for (const auto& r : records) spurious += r.spurious;
        m = fit_models(records);
    }
    Json j = to_json(m);
    j["records"] = iterations;
    j["spurious"] = spurious;
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "csQCA engine with robustness assessment and threshold recommendation";
    m.attr("__version__") = kVersion;

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    m.def("qca", &qca, py::arg("path"), py::arg("outcome"), py::arg("id") = std::nullopt,
          py::arg("consistency") = 0.85, py::arg("conf_n") = 1, py::arg("solution") = "complex",
          py::arg("negate") = false);
    m.def("assess_profile", &assess_profile, py::arg("condition_probs"), py::arg("outcome_prob"), py::arg("n"),
          py::arg("consistency") = 0.85, py::arg("conf_n") = 1, py::arg("solution") = "complex",
          py::arg("sims") = 2000, py::arg("boot") = 1000, py::arg("level") = 0.95, py::arg("seed") = 0,
          py::arg("threads") = 0, py::arg("trace") = false);
    m.def("recommend_profile", &recommend_profile, py::arg("condition_probs"), py::arg("outcome_prob"), py::arg("n"),
          py::arg("alphas") = std::vector<double>{0.10, 0.05, 0.01, 0.001}, py::arg("solution") = "complex",
          py::arg("sims") = 2000, py::arg("seed") = 0, py::arg("threads") = 0, py::arg("model") = "interaction");
    m.def("study", &study, py::arg("iterations") = 10000, py::arg("seed") = 0, py::arg("min_conditions") = 1,
          py::arg("max_conditions") = 6, py::arg("threads") = 0);
}
