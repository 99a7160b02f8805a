#include <doctest.h>

#include "baqca/report.hpp"

using namespace baqca;

namespace {

// Y equals A exactly.
CaseMatrix identity_data() { return CaseMatrix({"A", "B"}, {1, 0, 1, 1, 0, 0, 0, 1}, {1, 1, 0, 0}); }

}  // namespace

TEST_CASE("solution table layout") {
    const auto d = identity_data();
    const auto s = solve(build_truth_table(d, {0.85, 1}), SolutionMode::Parsimonious, d);
    REQUIRE(s);
    const auto text = format_solution_table(*s, "Y");
    CHECK(text ==
          "Y\n"
          "Solutions Consistency    Coverage\n"
          "=================================\n"
          "A              100.0%      100.0%\n"
          "---------------------------------\n"
          "Overall consistency: 100.0%\n"
          "Overall coverage: 100.0%\n"
          "(parsimonious solution; consistency threshold 0.85, configurational N threshold 1)\n");
}

TEST_CASE("solution json") {
    const auto d = identity_data();
    const auto s = solve(build_truth_table(d, {0.85, 1}), SolutionMode::Complex, d);
    REQUIRE(s);
    const auto j = to_json(*s);
    CHECK(j["mode"] == "complex");
    CHECK(j["recipes"].size() == s->recipes.size());
    CHECK(j["overall_coverage"] == 1.0);
    const auto t = to_json(build_truth_table(d, {0.85, 1}));
    CHECK(t["observed_rows"].size() == 4);
    CHECK(t["remainder_rows"] == 0);
}

TEST_CASE("assessment table") {
    BaqcaReport r;
    r.point_estimate = 0.79246;
    r.ci_low = 0.774;
    r.ci_high = 0.809;
    r.settings.thresholds = {0.85, 1};
    r.settings.sims = 2000;
    r.settings.seed = 7;
    ConvergenceDiagnostic c;
    c.ratio = 1.3;
    c.converged = false;
    r.convergence = c;
    const std::vector<AssessmentRow> rows{{"Set 1", &r}};
    const auto text = format_assessment_table(rows);
    CHECK(text.find("Probability of Randomness") != std::string::npos);
    CHECK(text.find("95% Confidence Interval") != std::string::npos);
    CHECK(text.find("0.7925") != std::string::npos);
    CHECK(text.find("0.7740   0.8090") != std::string::npos);
    CHECK(text.find("not converged (ratio 1.300)") != std::string::npos);

    const auto j = to_json(r, true);
    CHECK(j["results"] == 0);
    CHECK(j["settings"]["null"] == "bernoulli");
    CHECK(j["convergence"]["converged"] == false);
    CHECK(j["trace"] == "");
    CHECK_FALSE(to_json(r).contains("trace"));
}

TEST_CASE("recommendation output") {
    const auto r = recommend(MarginalProfile{{0.5, 0.5}, 0.35, 20}, [] {
        RecommendSettings s;
        s.sims = 150;
        s.seed = 3;
        s.alphas = {0.5, 0.001};
        return s;
    }());
    const auto text = format_recommendations(r);
    CHECK(text.find("alpha = 0.5\n") != std::string::npos);
    CHECK(text.find("Conf. N  Min. Consistency  CI low  CI high") != std::string::npos);
    bool unattainable = false;
    for (const auto& t : r.tables)
        for (const auto& row : t.rows) unattainable |= !row.min_consistency;
    CHECK((text.find("— no consistency threshold") != std::string::npos) == unattainable);

    const auto csv = recommendation_csv(r);
    CHECK(csv.rfind("alpha,conf_n,min_consistency,ci_low,ci_high,fitted_prob,non_monotone\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 6);
    const auto plot = recommendation_plot_csv(r);
    CHECK(plot.rfind("confN,consistency,fitted,ci_low,ci_high\n", 0) == 0);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 1 + 66);

    const auto j = to_json(r);
    CHECK(j["recommendations"].size() == 2);
    CHECK(j["cells"].size() == 66);
    CHECK(j["fit"]["terms"].size() == 4);
}

TEST_CASE("unattainable rows print a dash and a footnote") {
    RecommendResult r;
    r.fit.columns = {"(Intercept)"};
    r.tables = {Recommendation{0.05, {RecommendationRow{1, std::nullopt, std::nullopt, std::nullopt, 0.0, false},
                                      RecommendationRow{2, 0.9, 0.85, 0.95, 0.04, true}}}};
    const auto text = format_recommendations(r);
    CHECK(text ==
          "alpha = 0.05\n"
          "Conf. N  Min. Consistency  CI low  CI high\n"
          "==========================================\n"
          "      1                 —       —        —\n"
          "      2              0.90    0.85     0.95 +\n"
          "\n"
          "— no consistency threshold in the grid brings the fitted probability down to alpha\n"
          "+ fitted probability is not monotone in consistency at this configurational N\n");
    CHECK(recommendation_csv(r) ==
          "alpha,conf_n,min_consistency,ci_low,ci_high,fitted_prob,non_monotone\n"
          "0.05,1,NA,NA,NA,NA,0\n"
          "0.05,2,0.9,0.85,0.95,0.040000,1\n");
}

TEST_CASE("models table") {
    const auto models = fit_models(run_study([] {
        StudyConfig c;
        c.iterations = 1500;
        c.seed = 2;
        return c;
    }()));
    const auto text = format_models_table(models);
    for (const char* s : {"Model 1", "Model 2", "Cons. Threshold", "Cons. Threshold * Conf. N Threshold", "AIC",
                          "Residual Deviance", "Null Deviance", "Num. obs."})
        CHECK(text.find(s) != std::string::npos);
    const auto j = to_json(models);
    CHECK(j["model1"]["terms"].size() == 7);
    CHECK(j["model2"]["terms"].size() == 22);
    CHECK(j["means"].size() == 6);
}
