#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "baqca/assessment.hpp"
#include "baqca/glm.hpp"
#include "baqca/minimize.hpp"
#include "baqca/recommend.hpp"
#include "baqca/study.hpp"
#include "baqca/truth_table.hpp"

namespace baqca {

using Json = nlohmann::ordered_json;

Json to_json(const Thresholds& t);
Json to_json(const TruthTable& table);
Json to_json(const SolutionSet& solution);
Json to_json(const BaqcaReport& report, bool include_trace = false);
Json to_json(const GlmFit& fit);
Json to_json(const RecommendResult& result);
Json to_json(const StudyModels& models);

// Solutions / Consistency / Coverage, percentages to one decimal, then the
// overall coverage line.
std::string format_solution_table(const SolutionSet& solution, const std::string& title = "");

// Label / Probability of Randomness / 95% Confidence Interval.
struct AssessmentRow {
    std::string label;
    const BaqcaReport* report = nullptr;
};
std::string format_assessment_table(std::span<const AssessmentRow> rows);

// One block per alpha; unattainable thresholds print as an em dash with a
// footnote underneath.
std::string format_recommendations(const RecommendResult& result);

// alpha,conf_n,min_consistency,ci_low,ci_high,fitted_prob,non_monotone
std::string recommendation_csv(const RecommendResult& result);

// confN,consistency,fitted,ci_low,ci_high for every grid cell.
std::string recommendation_plot_csv(const RecommendResult& result);

// Model 1 and Model 2 side by side: estimate (SE) with significance stars.
std::string format_models_table(const StudyModels& models);

}  // namespace baqca
