#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "baqca/dataset.hpp"
#include "baqca/glm.hpp"
#include "baqca/minimize.hpp"

namespace baqca {

// Researcher-choice sweep.  Consistency values are lo, lo+step, ..., hi.
struct SweepGrid {
    double consistency_lo = 0.5;
    double consistency_hi = 1.0;
    double consistency_step = 0.05;
    std::uint32_t conf_n_lo = 1;
    std::uint32_t conf_n_hi = 6;

    void validate() const;
    std::vector<double> consistency_values() const;
    std::vector<std::uint32_t> conf_n_values() const;
};

enum class RecommendModel : std::uint8_t {
    Interaction,  // consistency + conf_n + consistency:conf_n (default)
    MainEffects,  // consistency + conf_n
};

std::string to_string(RecommendModel model);
RecommendModel parse_recommend_model(std::string_view text);

struct RecommendSettings {
    SolutionMode mode = SolutionMode::Complex;
    std::vector<double> alphas{0.10, 0.05, 0.01, 0.001};
    std::size_t sims = 2000;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    SweepGrid grid;
    RecommendModel model = RecommendModel::Interaction;
    double level = 0.95;
    FitOptions fit_options;

    void validate() const;
};

struct Inversion {
    std::optional<double> min_consistency;  // nullopt = UNATTAINABLE
    bool non_monotone = false;              // fitted curve not monotone in consistency over the grid
};

// Smallest grid consistency c with predict_prob(fit, {c, conf_n}) <= alpha.
Inversion invert_threshold(const GlmFit& fit, std::uint32_t conf_n, double alpha,
                           const std::vector<double>& consistency_grid);

struct RecommendationRow {
    std::uint32_t conf_n = 0;
    std::optional<double> min_consistency;
    // Grid consistency where the upper / lower confidence band of the fitted
    // probability first reaches alpha.  ci_low <= min_consistency <= ci_high.
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    double fitted_prob = 0.0;  // at (min_consistency, conf_n) when attainable
    bool non_monotone = false;
};

struct Recommendation {
    double alpha = 0.0;
    std::vector<RecommendationRow> rows;  // ascending conf_n
};

struct GridCell {
    double consistency = 0.0;
    std::uint32_t conf_n = 0;
    std::size_t results = 0;  // datasets returning a result at this cell
    double fitted_prob = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct RecommendResult {
    std::vector<Recommendation> tables;  // one per alpha, in settings order
    GlmFit fit;
    std::vector<GridCell> cells;  // conf_n-major, consistency ascending
    RecommendSettings settings;
    MarginalProfile profile;
    std::size_t total_results = 0;
    bool degenerate = false;  // indicator grid all 0 or all 1
};

// Predictor names used in the fitted model.
inline constexpr const char* kConsistencyTerm = "consistency";
inline constexpr const char* kConfNTerm = "conf_n";

RecommendResult recommend(const MarginalProfile& profile, const RecommendSettings& settings);

// Builds recommendation tables from an existing fit (also used by recommend).
std::vector<Recommendation> recommendation_tables(const GlmFit& fit, const RecommendSettings& settings);

}  // namespace baqca
