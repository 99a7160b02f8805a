#include "baqca/recommend.hpp"

#include <cmath>

#include <fmt/format.h>

#include "baqca/error.hpp"
#include "baqca/parallel.hpp"
#include "baqca/random_gen.hpp"
#include "baqca/truth_table.hpp"

namespace baqca {

void SweepGrid::validate() const {
    if (!(consistency_lo >= 0.0 && consistency_hi <= 1.0 && consistency_lo <= consistency_hi))
        throw InputError("consistency grid must lie within [0, 1]");
    if (!(consistency_step > 0.0)) throw InputError("consistency grid step must be positive");
    if (conf_n_lo < 1 || conf_n_hi < conf_n_lo) throw InputError("configurational N grid must be a range >= 1");
}

std::vector<double> SweepGrid::consistency_values() const {
    std::vector<double> out;
    const auto steps = static_cast<long>(std::floor((consistency_hi - consistency_lo) / consistency_step + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        // Rounded to 1e-10 so 0.5 + 7 * 0.05 prints and compares as 0.85.
        const double c = std::round((consistency_lo + static_cast<double>(k) * consistency_step) * 1e10) / 1e10;
        out.push_back(std::min(c, consistency_hi));
    }
    return out;
}

std::vector<std::uint32_t> SweepGrid::conf_n_values() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t n = conf_n_lo; n <= conf_n_hi; ++n) out.push_back(n);
    return out;
}

std::string to_string(RecommendModel model) {
    return model == RecommendModel::Interaction ? "interaction" : "main-effects";
}

RecommendModel parse_recommend_model(std::string_view text) {
    if (text == "interaction") return RecommendModel::Interaction;
    if (text == "main-effects") return RecommendModel::MainEffects;
    throw InputError(fmt::format("unknown recommendation model '{}' (interaction|main-effects)", text));
}

void RecommendSettings::validate() const {
    if (sims < 1) throw InputError("sims must be >= 1");
    if (alphas.empty()) throw InputError("at least one alpha is required");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw InputError(fmt::format("alpha {} outside (0, 1)", a));
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
    grid.validate();
}

namespace {

Record grid_record(double consistency, std::uint32_t conf_n) {
    return Record{{kConsistencyTerm, consistency}, {kConfNTerm, static_cast<double>(conf_n)}};
}

// Smallest grid value whose probability (from `prob`) is <= alpha.
template <class Prob>
std::optional<double> first_below(const std::vector<double>& grid, double alpha, Prob&& prob) {
    for (double c : grid)
        if (prob(c) <= alpha) return c;
    return std::nullopt;
}

}  // namespace

Inversion invert_threshold(const GlmFit& fit, std::uint32_t conf_n, double alpha,
                           const std::vector<double>& consistency_grid) {
    Inversion inv;
    double previous = 0.0;
    bool rising = false;
    bool falling = false;
    for (std::size_t k = 0; k < consistency_grid.size(); ++k) {
        const double p = predict_prob(fit, grid_record(consistency_grid[k], conf_n));
        if (k > 0) {
            rising |= p > previous + 1e-15;
            falling |= p < previous - 1e-15;
        }
        previous = p;
        if (!inv.min_consistency && p <= alpha) inv.min_consistency = consistency_grid[k];
    }
    inv.non_monotone = rising && falling;
    return inv;
}

std::vector<Recommendation> recommendation_tables(const GlmFit& fit, const RecommendSettings& settings) {
    const auto grid = settings.grid.consistency_values();
    std::vector<Recommendation> tables;
    for (double alpha : settings.alphas) {
        Recommendation rec{alpha, {}};
        for (std::uint32_t n : settings.grid.conf_n_values()) {
            RecommendationRow row;
            row.conf_n = n;
            const Inversion inv = invert_threshold(fit, n, alpha, grid);
            row.min_consistency = inv.min_consistency;
            row.non_monotone = inv.non_monotone;
            if (row.min_consistency) row.fitted_prob = predict_prob(fit, grid_record(*row.min_consistency, n));
            if (fit.separation) {
                // Diverging coefficients make the standard errors meaningless.
                row.ci_low = grid.front();
                row.ci_high = grid.back();
            } else {
                row.ci_low = first_below(grid, alpha, [&](double c) {
                    return linear_ci(fit, grid_record(c, n), settings.level).first;
                });
                row.ci_high = first_below(grid, alpha, [&](double c) {
                    return linear_ci(fit, grid_record(c, n), settings.level).second;
                });
            }
            rec.rows.push_back(row);
        }
        tables.push_back(std::move(rec));
    }
    return tables;
}

RecommendResult recommend(const MarginalProfile& profile, const RecommendSettings& settings) {
    profile.validate();
    settings.validate();

    const auto consistency = settings.grid.consistency_values();
    const auto conf_ns = settings.grid.conf_n_values();
    const std::size_t cells = consistency.size() * conf_ns.size();

    // indicators[i * cells + cell]; cell index = conf_n-major, consistency minor
    std::vector<std::uint8_t> indicators(settings.sims * cells, 0);
    parallel_for(settings.sims, settings.threads, [&](std::size_t i) {
        Rng rng = make_stream(settings.seed, i);
        const CaseMatrix data = generate_dataset(profile, rng);
        const TruthTable table = build_truth_table(data, Thresholds{consistency.front(), conf_ns.front()});
        for (std::size_t a = 0; a < conf_ns.size(); ++a)
            for (std::size_t b = 0; b < consistency.size(); ++b) {
                const TruthTable at = table.reclassified(Thresholds{consistency[b], conf_ns[a]});
                indicators[i * cells + a * consistency.size() + b] = solution_exists(at, settings.mode) ? 1 : 0;
            }
    });

    RecommendResult result;
    result.settings = settings;
    result.profile = profile;

    PredictorFrame frame;
    std::vector<double> cons_col, n_col, y;
    cons_col.reserve(indicators.size());
    n_col.reserve(indicators.size());
    y.reserve(indicators.size());
    std::vector<std::size_t> per_cell(cells, 0);
    for (std::size_t i = 0; i < settings.sims; ++i)
        for (std::size_t a = 0; a < conf_ns.size(); ++a)
            for (std::size_t b = 0; b < consistency.size(); ++b) {
                const std::size_t cell = a * consistency.size() + b;
                const std::uint8_t hit = indicators[i * cells + cell];
                cons_col.push_back(consistency[b]);
                n_col.push_back(static_cast<double>(conf_ns[a]));
                y.push_back(hit);
                per_cell[cell] += hit;
                result.total_results += hit;
            }
    frame.add(kConsistencyTerm, std::move(cons_col));
    frame.add(kConfNTerm, std::move(n_col));
    result.degenerate = result.total_results == 0 || result.total_results == indicators.size();

    DesignSpec spec;
    spec.terms = {kConsistencyTerm, kConfNTerm};
    if (settings.model == RecommendModel::Interaction) spec.interactions = {{kConsistencyTerm, kConfNTerm}};
    spec.labels = {{kConsistencyTerm, "Cons. Threshold"}, {kConfNTerm, "Conf. N Threshold"}};
    result.fit = fit_logistic(y, frame, spec, settings.fit_options);

    for (std::size_t a = 0; a < conf_ns.size(); ++a)
        for (std::size_t b = 0; b < consistency.size(); ++b) {
            GridCell cell;
            cell.consistency = consistency[b];
            cell.conf_n = conf_ns[a];
            cell.results = per_cell[a * consistency.size() + b];
            const Record r = grid_record(cell.consistency, cell.conf_n);
            cell.fitted_prob = predict_prob(result.fit, r);
            std::tie(cell.ci_low, cell.ci_high) = linear_ci(result.fit, r, settings.level);
            result.cells.push_back(cell);
        }
    result.tables = recommendation_tables(result.fit, settings);
    return result;
}

}  // namespace baqca
