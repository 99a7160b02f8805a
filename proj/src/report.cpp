#include "baqca/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace baqca {

namespace {

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string percent(double x) { return fmt::format("{:.1f}%", 100.0 * x); }

std::string stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

// Display width in code points; the tables contain the odd em dash.
std::size_t width(const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad_right(const std::string& s, std::size_t w) { return s + std::string(w > width(s) ? w - width(s) : 0, ' '); }
std::string pad_left(const std::string& s, std::size_t w) { return std::string(w > width(s) ? w - width(s) : 0, ' ') + s; }

constexpr const char* kDash = "—";

}  // namespace

Json to_json(const Thresholds& t) { return Json{{"consistency", t.consistency}, {"conf_n", t.conf_n}}; }

Json to_json(const TruthTable& table) {
    Json rows = Json::array();
    for (const auto& row : table.rows()) {
        if (row.case_count == 0) continue;
        rows.push_back(Json{{"configuration", table.bits_string(row.code)},
                            {"n", row.case_count},
                            {"outcome_n", row.outcome_count},
                            {"consistency", row.consistency()},
                            {"status", to_string(row.status)}});
    }
    const std::size_t total = std::size_t{1} << table.num_conditions();
    return Json{{"conditions", table.condition_names()},
                {"thresholds", to_json(table.thresholds())},
                {"observed_rows", rows},
                {"remainder_rows", total - rows.size()}};
}

Json to_json(const SolutionSet& solution) {
    Json recipes = Json::array();
    for (std::size_t k = 0; k < solution.recipes.size(); ++k) {
        const auto& r = solution.recipes[k];
        recipes.push_back(Json{{"recipe", render_recipe(r, solution.condition_names)},
                               {"pattern", r.pattern()},
                               {"consistency", solution.metrics.per_recipe[k].consistency},
                               {"raw_coverage", solution.metrics.per_recipe[k].raw_coverage}});
    }
    return Json{{"mode", to_string(solution.mode)},
                {"thresholds", to_json(solution.thresholds)},
                {"conditions", solution.condition_names},
                {"solution", render_solution(solution.recipes, solution.condition_names)},
                {"recipes", recipes},
                {"overall_consistency", solution.metrics.overall_consistency},
                {"overall_coverage", solution.metrics.overall_coverage}};
}

Json to_json(const BaqcaReport& report, bool include_trace) {
    const auto& s = report.settings;
    Json j{{"point_estimate", report.point_estimate},
           {"ci_low", report.ci_low},
           {"ci_high", report.ci_high},
           {"results", report.results},
           {"settings",
            {{"thresholds", to_json(s.thresholds)},
             {"mode", to_string(s.mode)},
             {"sims", s.sims},
             {"boot", s.boot},
             {"level", s.level},
             {"seed", s.seed},
             {"null", report.null_kind == NullKind::Bernoulli ? "bernoulli" : "permute"}}},
           {"profile",
            {{"condition_probs", report.profile.condition_probs},
             {"outcome_prob", report.profile.outcome_prob},
             {"n", report.profile.n}}}};
    if (report.convergence) {
        const auto& c = *report.convergence;
        j["convergence"] = Json{{"segments", c.segments},
                                {"segment_means", c.segment_means},
                                {"within_variance", c.within_variance},
                                {"between_variance", c.between_variance},
                                {"ratio", number_or_null(c.ratio)},
                                {"converged", c.converged}};
    } else {
        j["convergence"] = nullptr;
    }
    if (include_trace) {
        std::string trace;
        trace.reserve(report.indicator_trace.size());
        for (auto b : report.indicator_trace) trace.push_back(b ? '1' : '0');
        j["trace"] = trace;
    }
    return j;
}

Json to_json(const GlmFit& fit) {
    const auto labels = fit.spec.column_labels();
    Json terms = Json::array();
    for (std::size_t k = 0; k < fit.columns.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        Json t{{"name", fit.columns[k]}, {"label", k < labels.size() ? labels[k] : fit.columns[k]}};
        if (fit.dropped[k]) {
            t["estimate"] = nullptr;
            t["std_error"] = nullptr;
            t["dropped"] = true;
        } else {
            t["estimate"] = fit.coefficients[i];
            t["std_error"] = number_or_null(fit.standard_errors[i]);
            t["dropped"] = false;
        }
        terms.push_back(t);
    }
    return Json{{"terms", terms},
                {"deviance", fit.deviance},
                {"null_deviance", fit.null_deviance},
                {"aic", fit.aic},
                {"num_obs", fit.num_obs},
                {"num_params", fit.num_params},
                {"converged", fit.converged},
                {"separation", fit.separation},
                {"iterations", fit.iterations},
                {"warnings", fit.warnings}};
}

Json to_json(const RecommendResult& result) {
    const auto& s = result.settings;
    Json tables = Json::array();
    for (const auto& rec : result.tables) {
        Json rows = Json::array();
        for (const auto& row : rec.rows)
            rows.push_back(Json{{"conf_n", row.conf_n},
                                {"min_consistency", optional_number(row.min_consistency)},
                                {"attainable", row.min_consistency.has_value()},
                                {"ci_low", optional_number(row.ci_low)},
                                {"ci_high", optional_number(row.ci_high)},
                                {"fitted_prob", row.min_consistency ? Json(row.fitted_prob) : Json(nullptr)},
                                {"non_monotone", row.non_monotone}});
        tables.push_back(Json{{"alpha", rec.alpha}, {"rows", rows}});
    }
    Json cells = Json::array();
    for (const auto& c : result.cells)
        cells.push_back(Json{{"consistency", c.consistency},
                             {"conf_n", c.conf_n},
                             {"results", c.results},
                             {"fitted_prob", c.fitted_prob},
                             {"ci_low", c.ci_low},
                             {"ci_high", c.ci_high}});
    return Json{{"recommendations", tables},
                {"degenerate", result.degenerate},
                {"total_results", result.total_results},
                {"settings",
                 {{"mode", to_string(s.mode)},
                  {"alphas", s.alphas},
                  {"sims", s.sims},
                  {"seed", s.seed},
                  {"model", to_string(s.model)},
                  {"level", s.level},
                  {"grid",
                   {{"consistency", s.grid.consistency_values()},
                    {"conf_n", s.grid.conf_n_values()}}}}},
                {"profile",
                 {{"condition_probs", result.profile.condition_probs},
                  {"outcome_prob", result.profile.outcome_prob},
                  {"n", result.profile.n}}},
                {"fit", to_json(result.fit)},
                {"cells", cells}};
}

Json to_json(const StudyModels& models) {
    return Json{{"model1", to_json(models.model1)},
                {"model2", to_json(models.model2)},
                {"means", models.means},
                {"warnings", models.warnings}};
}

std::string format_solution_table(const SolutionSet& solution, const std::string& title) {
    std::vector<std::string> names;
    for (const auto& r : solution.recipes) names.push_back(render_recipe(r, solution.condition_names));
    std::size_t w = std::string("Solutions").size();
    for (const auto& n : names) w = std::max(w, width(n));
    const std::size_t col = 12;
    const std::string rule(w + 2 * col, '=');

    std::ostringstream out;
    if (!title.empty()) out << title << '\n';
    out << pad_right("Solutions", w) << pad_left("Consistency", col) << pad_left("Coverage", col) << '\n';
    out << rule << '\n';
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto& m = solution.metrics.per_recipe[k];
        out << pad_right(names[k], w) << pad_left(percent(m.consistency), col) << pad_left(percent(m.raw_coverage), col)
            << '\n';
    }
    out << std::string(w + 2 * col, '-') << '\n';
    out << "Overall consistency: " << percent(solution.metrics.overall_consistency) << '\n';
    out << "Overall coverage: " << percent(solution.metrics.overall_coverage) << '\n';
    out << fmt::format("({} solution; consistency threshold {}, configurational N threshold {})\n",
                       to_string(solution.mode), solution.thresholds.consistency, solution.thresholds.conf_n);
    return out.str();
}

std::string format_assessment_table(std::span<const AssessmentRow> rows) {
    std::size_t w = std::string("Solutions").size();
    for (const auto& r : rows) w = std::max(w, width(r.label));
    const std::string h1 = "Probability of Randomness";
    const std::string h2 = "95% Confidence Interval";
    std::ostringstream out;
    out << pad_right("Solutions", w) << "  " << h1 << "  " << h2 << '\n';
    out << std::string(w + 4 + h1.size() + h2.size(), '=') << '\n';
    for (const auto& r : rows) {
        const auto& rep = *r.report;
        out << pad_right(r.label, w) << "  " << pad_left(fmt::format("{:.4f}", rep.point_estimate), h1.size()) << "  "
            << pad_left(fmt::format("{:.4f}   {:.4f}", rep.ci_low, rep.ci_high), h2.size()) << '\n';
    }
    for (const auto& r : rows) {
        const auto& s = r.report->settings;
        out << fmt::format("{}: {} solution, consistency {}, configurational N {}, {} simulations, seed {}\n", r.label,
                           to_string(s.mode), s.thresholds.consistency, s.thresholds.conf_n, s.sims, s.seed);
        if (r.report->convergence && !r.report->convergence->converged)
            out << fmt::format("  warning: simulation trace not converged (ratio {:.3f}); increase --sims\n",
                               r.report->convergence->ratio);
    }
    return out.str();
}

std::string format_recommendations(const RecommendResult& result) {
    std::ostringstream out;
    bool any_unattainable = false;
    bool any_non_monotone = false;
    for (const auto& rec : result.tables) {
        out << fmt::format("alpha = {}\n", rec.alpha);
        out << "Conf. N  Min. Consistency  CI low  CI high\n";
        out << "==========================================\n";
        for (const auto& row : rec.rows) {
            auto cell = [](const std::optional<double>& x) { return x ? fmt::format("{:.2f}", *x) : std::string(kDash); };
            std::string mark;
            if (!row.min_consistency) any_unattainable = true;
            if (row.non_monotone) {
                any_non_monotone = true;
                mark = " +";
            }
            out << pad_left(std::to_string(row.conf_n), 7) << pad_left(cell(row.min_consistency), 18)
                << pad_left(cell(row.ci_low), 8) << pad_left(cell(row.ci_high), 9) << mark << '\n';
        }
        out << '\n';
    }
    if (any_unattainable)
        out << kDash << " no consistency threshold in the grid brings the fitted probability down to alpha\n";
    if (any_non_monotone) out << "+ fitted probability is not monotone in consistency at this configurational N\n";
    if (result.degenerate)
        out << fmt::format("note: indicator grid is constant ({} results); the fit is degenerate\n",
                           result.total_results);
    if (result.fit.separation) out << "note: separation detected; intervals span the whole grid\n";
    return out.str();
}

std::string recommendation_csv(const RecommendResult& result) {
    std::ostringstream out;
    out << "alpha,conf_n,min_consistency,ci_low,ci_high,fitted_prob,non_monotone\n";
    auto cell = [](const std::optional<double>& x) { return x ? fmt::format("{}", *x) : std::string("NA"); };
    for (const auto& rec : result.tables)
        for (const auto& row : rec.rows)
            out << fmt::format("{},{},{},{},{},{},{}\n", rec.alpha, row.conf_n, cell(row.min_consistency),
                               cell(row.ci_low), cell(row.ci_high),
                               row.min_consistency ? fmt::format("{:.6f}", row.fitted_prob) : std::string("NA"),
                               int(row.non_monotone));
    return out.str();
}

std::string recommendation_plot_csv(const RecommendResult& result) {
    std::ostringstream out;
    out << "confN,consistency,fitted,ci_low,ci_high\n";
    for (const auto& c : result.cells)
        out << fmt::format("{},{},{:.6f},{:.6f},{:.6f}\n", c.conf_n, c.consistency, c.fitted_prob, c.ci_low,
                           c.ci_high);
    return out.str();
}

std::string format_models_table(const StudyModels& models) {
    auto cells = [](const GlmFit& fit) {
        std::map<std::string, std::string> out;
        const auto labels = fit.spec.column_labels();
        for (std::size_t k = 0; k < fit.columns.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            if (fit.dropped[k]) {
                out[labels[k]] = "dropped";
                continue;
            }
            const double est = fit.coefficients[i];
            const double se = fit.standard_errors[i];
            const double p = std::erfc(std::abs(est / se) / std::sqrt(2.0));
            out[labels[k]] = fmt::format("{:.2f}({:.2f}){}", est, se, stars(p));
        }
        return out;
    };
    const auto m1 = cells(models.model1);
    const auto m2 = cells(models.model2);
    const auto order = models.model2.spec.column_labels();
    std::size_t w = 0;
    for (const auto& l : order) w = std::max(w, width(l));
    const std::size_t col = 18;

    std::ostringstream out;
    out << pad_right("", w) << pad_left("Model 1", col) << pad_left("Model 2", col) << '\n';
    out << std::string(w + 2 * col, '=') << '\n';
    for (const auto& l : order) {
        auto get = [&](const auto& m) {
            auto it = m.find(l);
            return it == m.end() ? std::string() : it->second;
        };
        out << pad_right(l, w) << pad_left(get(m1), col) << pad_left(get(m2), col) << '\n';
    }
    out << std::string(w + 2 * col, '-') << '\n';
    auto stat = [&](const char* name, double a, double b) {
        out << pad_right(name, w) << pad_left(fmt::format("{:.1f}", a), col) << pad_left(fmt::format("{:.1f}", b), col)
            << '\n';
    };
    stat("AIC", models.model1.aic, models.model2.aic);
    stat("Residual Deviance", models.model1.deviance, models.model2.deviance);
    stat("Null Deviance", models.model1.null_deviance, models.model2.null_deviance);
    out << pad_right("Num. obs.", w) << pad_left(std::to_string(models.model1.num_obs), col)
        << pad_left(std::to_string(models.model2.num_obs), col) << '\n';
    out << "*** p < 0.001, ** p < 0.01, * p < 0.05\n";
    return out.str();
}

}  // namespace baqca
