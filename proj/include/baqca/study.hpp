#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "baqca/glm.hpp"
#include "baqca/random_gen.hpp"

namespace baqca {

struct StudyRecord {
    double consistency_threshold = 0.0;
    std::uint32_t conf_n_threshold = 0;
    bool complex_solution = false;
    std::uint32_t sample_size = 0;
    std::uint32_t num_conditions = 0;
    double outcome_dist = 0.0;  // the shared marginal of conditions and outcome
    bool spurious = false;

    bool operator==(const StudyRecord&) const = default;
};

struct StudyConfig {
    std::size_t iterations = 100'000;
    StructureRanges structure;  // conditions 1-6, sample size 10-60, p in [0.1, 0.9]
    Range<double> consistency{0.5, 1.0};
    Range<int> conf_n{1, 6};
    Range<int> complex_solution{0, 1};
    // Evaluate every dataset at every (consistency step, conf_n, mode)
    // combination instead of one random draw per iteration.
    bool factorial = false;
    double factorial_consistency_step = 0.05;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::size_t block_size = 4096;  // records handed to the sink per call

    void validate() const;
};

// Predictor names in model column order.
inline const std::vector<std::string>& study_predictors() {
    static const std::vector<std::string> names{"consistency_threshold", "conf_n_threshold", "complex_solution",
                                                "sample_size",           "num_conditions",   "outcome_dist"};
    return names;
}

// Receives consecutive blocks of records in iteration order.
using RecordSink = std::function<void(std::span<const StudyRecord>)>;

std::vector<StudyRecord> run_study(const StudyConfig& config, const RecordSink& sink = {});

std::string record_csv_header();
std::string record_csv_line(const StudyRecord& record);
std::vector<StudyRecord> read_records_csv(const std::string& path);

PredictorFrame to_frame(std::span<const StudyRecord> records);

DesignSpec model1_spec();
DesignSpec model2_spec();  // model 1 plus all 15 pairwise interactions

struct StudyModels {
    GlmFit model1;
    GlmFit model2;
    Record means;  // sample means of the six predictors
    std::vector<std::string> warnings;
};

StudyModels fit_models(std::span<const StudyRecord> records, const FitOptions& options = {});

struct CurvePoint {
    std::string vary;
    double vary_value = 0.0;
    std::string panel;
    double panel_value = 0.0;
    double prob = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct CurveGrid {
    std::vector<double> vary_values;
    std::vector<double> panel_values;
};

// Fitted probabilities over vary_values at each panel value, with every
// other predictor held at `means`.
std::vector<CurvePoint> predicted_curves(const GlmFit& fit, const std::string& vary, const std::string& panel,
                                         const CurveGrid& grid, const Record& means, double level = 0.95);

std::string curves_csv(std::span<const CurvePoint> points, const std::string& figure);

struct CurveSet {
    std::string name;
    std::vector<CurvePoint> points;
};

// Standard curve sets over the configured ranges:
//   main_effects       model 1, each predictor varied alone
//   by_outcome_dist    model 2, researcher choices at several outcome distributions
//   by_num_conditions  model 2, researcher choices at each condition count
//   by_sample_size     model 2, researcher choices at several sample sizes
std::vector<CurveSet> standard_curves(const StudyModels& models, const StudyConfig& config, double level = 0.95);

}  // namespace baqca
