#include "baqca/study.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "baqca/error.hpp"
#include "baqca/minimize.hpp"
#include "baqca/parallel.hpp"
#include "baqca/truth_table.hpp"
#include "csv.hpp"

namespace baqca {

namespace {

// Researcher choices come from their own stream family so the simulated
// datasets do not depend on which choice ranges are configured.
constexpr std::uint64_t kChoiceDomain = 0x63686F6963657321ULL;  // "choices!"

std::vector<double> consistency_steps(const StudyConfig& c) {
    std::vector<double> out;
    const double step = c.factorial_consistency_step;
    const auto steps = static_cast<long>(std::floor((c.consistency.hi - c.consistency.lo) / step + 1e-9));
    for (long k = 0; k <= steps; ++k)
        out.push_back(std::round((c.consistency.lo + static_cast<double>(k) * step) * 1e10) / 1e10);
    return out;
}

}  // namespace

void StudyConfig::validate() const {
    if (iterations < 1) throw InputError("iterations must be >= 1");
    structure.validate();
    if (!(consistency.lo >= 0.0 && consistency.hi <= 1.0 && consistency.lo <= consistency.hi))
        throw InputError("consistency range must lie within [0, 1]");
    if (conf_n.lo < 1 || conf_n.hi < conf_n.lo) throw InputError("configurational N range must be >= 1");
    if (complex_solution.lo < 0 || complex_solution.hi > 1 || complex_solution.hi < complex_solution.lo)
        throw InputError("complex-solution range must lie within {0, 1}");
    if (factorial && !(factorial_consistency_step > 0.0)) throw InputError("factorial step must be positive");
    if (block_size < 1) throw InputError("block size must be >= 1");
}

std::vector<StudyRecord> run_study(const StudyConfig& config, const RecordSink& sink) {
    config.validate();
    const std::vector<double> cons_grid = config.factorial ? consistency_steps(config) : std::vector<double>{};
    const std::size_t per_iteration =
        config.factorial ? cons_grid.size() * static_cast<std::size_t>(config.conf_n.hi - config.conf_n.lo + 1) *
                               static_cast<std::size_t>(config.complex_solution.hi - config.complex_solution.lo + 1)
                         : 1;

    auto simulate = [&](std::size_t i, StudyRecord* out) {
        auto [data, shape] = generate_uniform_structure(config.structure, config.seed, i);
        StudyRecord base;
        base.sample_size = static_cast<std::uint32_t>(shape.sample_size);
        base.num_conditions = static_cast<std::uint32_t>(shape.num_conditions);
        base.outcome_dist = shape.probability;
        const TruthTable counts = build_truth_table(data, Thresholds{0.0, 1});

        auto evaluate = [&](StudyRecord rec) {
            const TruthTable table = counts.reclassified(Thresholds{rec.consistency_threshold, rec.conf_n_threshold});
            rec.spurious = solution_exists(table, rec.complex_solution ? SolutionMode::Complex : SolutionMode::Parsimonious);
            return rec;
        };

        if (!config.factorial) {
            Rng choice = make_stream(mix_seed(config.seed, kChoiceDomain), i);
            StudyRecord rec = base;
            rec.consistency_threshold = uniform_real(choice, config.consistency.lo, config.consistency.hi);
            rec.conf_n_threshold = static_cast<std::uint32_t>(uniform_int(choice, config.conf_n.lo, config.conf_n.hi));
            rec.complex_solution = uniform_int(choice, config.complex_solution.lo, config.complex_solution.hi) == 1;
            out[0] = evaluate(rec);
            return;
        }
        std::size_t k = 0;
        for (double c : cons_grid)
            for (int n = config.conf_n.lo; n <= config.conf_n.hi; ++n)
                for (int m = config.complex_solution.lo; m <= config.complex_solution.hi; ++m) {
                    StudyRecord rec = base;
                    rec.consistency_threshold = c;
                    rec.conf_n_threshold = static_cast<std::uint32_t>(n);
                    rec.complex_solution = m == 1;
                    out[k++] = evaluate(rec);
                }
    };

    std::vector<StudyRecord> records(config.iterations * per_iteration);
    for (std::size_t start = 0; start < config.iterations; start += config.block_size) {
        const std::size_t stop = std::min(config.iterations, start + config.block_size);
        parallel_for(stop - start, config.threads,
                     [&](std::size_t k) { simulate(start + k, records.data() + (start + k) * per_iteration); });
        if (sink)
            sink(std::span<const StudyRecord>(records.data() + start * per_iteration, (stop - start) * per_iteration));
    }
    return records;
}

std::string record_csv_header() {
    return "consistency_threshold,conf_n_threshold,complex_solution,sample_size,num_conditions,outcome_dist,spurious\n";
}

std::string record_csv_line(const StudyRecord& r) {
    return fmt::format("{},{},{},{},{},{},{}\n", r.consistency_threshold, r.conf_n_threshold, int(r.complex_solution),
                       r.sample_size, r.num_conditions, r.outcome_dist, int(r.spurious));
}

std::vector<StudyRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot open record file '{}'", path));
    auto rows = csv::read_all(in);
    if (rows.empty()) throw InputError("record file has no header");
    std::vector<StudyRecord> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 7) throw InputError(fmt::format("record row {} does not have 7 fields", r + 1));
        std::array<double, 7> v{};
        for (std::size_t c = 0; c < 7; ++c) {
            auto x = csv::parse_number(rows[r][c]);
            if (!x) throw InputError(fmt::format("non-numeric record field at row {}", r + 1));
            v[c] = *x;
        }
        out.push_back(StudyRecord{v[0], static_cast<std::uint32_t>(v[1]), v[2] != 0.0, static_cast<std::uint32_t>(v[3]),
                                  static_cast<std::uint32_t>(v[4]), v[5], v[6] != 0.0});
    }
    return out;
}

PredictorFrame to_frame(std::span<const StudyRecord> records) {
    std::vector<std::vector<double>> cols(6, std::vector<double>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        cols[0][i] = r.consistency_threshold;
        cols[1][i] = r.conf_n_threshold;
        cols[2][i] = r.complex_solution ? 1.0 : 0.0;
        cols[3][i] = r.sample_size;
        cols[4][i] = r.num_conditions;
        cols[5][i] = r.outcome_dist;
    }
    PredictorFrame frame;
    for (std::size_t k = 0; k < 6; ++k) frame.add(study_predictors()[k], std::move(cols[k]));
    return frame;
}

namespace {

std::map<std::string, std::string> predictor_labels() {
    return {{"consistency_threshold", "Cons. Threshold"}, {"conf_n_threshold", "Conf. N Threshold"},
            {"complex_solution", "Complex Solution"},     {"sample_size", "Sample Size"},
            {"num_conditions", "Num. Variables"},         {"outcome_dist", "Dependent Variable Dist."}};
}

}  // namespace

DesignSpec model1_spec() {
    DesignSpec spec;
    spec.terms = study_predictors();
    spec.labels = predictor_labels();
    return spec;
}

DesignSpec model2_spec() {
    DesignSpec spec = model1_spec();
    const auto& t = spec.terms;
    for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = a + 1; b < t.size(); ++b) spec.interactions.emplace_back(t[a], t[b]);
    return spec;
}

StudyModels fit_models(std::span<const StudyRecord> records, const FitOptions& options) {
    if (records.empty()) throw InputError("no study records to fit");
    StudyModels models;
    if (records.size() < 1000)
        models.warnings.push_back(fmt::format("only {} records; at least 1000 are recommended", records.size()));
    const PredictorFrame frame = to_frame(records);
    std::vector<double> y(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) y[i] = records[i].spurious ? 1.0 : 0.0;
    models.model1 = fit_logistic(y, frame, model1_spec(), options);
    models.model2 = fit_logistic(y, frame, model2_spec(), options);
    for (const auto& name : study_predictors()) models.means[name] = frame.mean(name);
    return models;
}

std::vector<CurvePoint> predicted_curves(const GlmFit& fit, const std::string& vary, const std::string& panel,
                                         const CurveGrid& grid, const Record& means, double level) {
    const auto& terms = fit.spec.terms;
    if (std::find(terms.begin(), terms.end(), vary) == terms.end())
        throw InputError(fmt::format("unknown predictor '{}'", vary));
    if (std::find(terms.begin(), terms.end(), panel) == terms.end())
        throw InputError(fmt::format("unknown predictor '{}'", panel));
    if (vary == panel) throw InputError("vary and panel predictors must differ");
    std::vector<CurvePoint> out;
    for (double pv : grid.panel_values)
        for (double vv : grid.vary_values) {
            Record r = means;
            r[panel] = pv;
            r[vary] = vv;
            const auto [lo, hi] = linear_ci(fit, r, level);
            out.push_back(CurvePoint{vary, vv, panel, pv, predict_prob(fit, r), lo, hi});
        }
    return out;
}

std::string curves_csv(std::span<const CurvePoint> points, const std::string& figure) {
    std::ostringstream out;
    out << "figure,vary,vary_value,panel,panel_value,prob,ci_low,ci_high\n";
    for (const auto& p : points)
        out << fmt::format("{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", figure, p.vary, p.vary_value, p.panel,
                           p.panel_value, p.prob, p.ci_low, p.ci_high);
    return out.str();
}

namespace {

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> out;
    if (points < 2 || hi <= lo) return {lo};
    for (int k = 0; k < points; ++k)
        out.push_back(std::round((lo + (hi - lo) * k / (points - 1)) * 1e10) / 1e10);
    return out;
}

std::vector<double> integers(int lo, int hi, int max_points = 11) {
    std::vector<double> out;
    const int step = std::max(1, (hi - lo + max_points - 1) / max_points);
    for (int k = lo; k <= hi; k += step) out.push_back(k);
    if (out.back() != hi) out.push_back(hi);
    return out;
}

}  // namespace

std::vector<CurveSet> standard_curves(const StudyModels& models, const StudyConfig& config, double level) {
    const auto& s = config.structure;
    const std::map<std::string, std::vector<double>> grids{
        {"consistency_threshold", linspace(config.consistency.lo, config.consistency.hi, 11)},
        {"conf_n_threshold", integers(config.conf_n.lo, config.conf_n.hi)},
        {"complex_solution", integers(config.complex_solution.lo, config.complex_solution.hi)},
        {"sample_size", integers(s.sample_size.lo, s.sample_size.hi)},
        {"num_conditions", integers(s.conditions.lo, s.conditions.hi)},
        {"outcome_dist", linspace(s.probability.lo, s.probability.hi, 9)},
    };
    const std::vector<std::string> choices{"consistency_threshold", "conf_n_threshold", "complex_solution"};

    std::vector<CurveSet> sets;
    CurveSet main{"main_effects", {}};
    for (const auto& vary : study_predictors()) {
        // The panel predictor sits at its mean, so every other predictor does too.
        const std::string panel = vary == "outcome_dist" ? "consistency_threshold" : "outcome_dist";
        auto pts = predicted_curves(models.model1, vary, panel, {grids.at(vary), {models.means.at(panel)}},
                                    models.means, level);
        main.points.insert(main.points.end(), pts.begin(), pts.end());
    }
    sets.push_back(std::move(main));

    auto by = [&](const std::string& name, const std::string& panel, std::vector<double> panel_values) {
        CurveSet set{name, {}};
        for (const auto& vary : choices) {
            auto pts = predicted_curves(models.model2, vary, panel, {grids.at(vary), panel_values}, models.means, level);
            set.points.insert(set.points.end(), pts.begin(), pts.end());
        }
        sets.push_back(std::move(set));
    };
    by("by_outcome_dist", "outcome_dist", linspace(s.probability.lo, s.probability.hi, 5));
    by("by_num_conditions", "num_conditions", integers(s.conditions.lo, s.conditions.hi));
    by("by_sample_size", "sample_size", linspace(s.sample_size.lo, s.sample_size.hi, 6));
    return sets;
}

}  // namespace baqca
