#include "baqca/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "baqca/error.hpp"
#include "baqca/parallel.hpp"
#include "baqca/random_gen.hpp"

namespace baqca {

namespace {

constexpr std::uint64_t kBootstrapDomain = 0x626F6F7473747261ULL;  // "bootstra"

void validate(const AssessSettings& s) {
    s.thresholds.validate();
    if (s.sims < 1) throw InputError("sims must be >= 1");
    if (s.boot < 1) throw InputError("boot must be >= 1");
    if (!(s.level > 0.0 && s.level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
}

template <class Generate>
BaqcaReport run(const AssessSettings& settings, Generate&& generate) {
    validate(settings);
    BaqcaReport report;
    report.settings = settings;
    report.indicator_trace.assign(settings.sims, 0);
    parallel_for(settings.sims, settings.threads, [&](std::size_t i) {
        Rng rng = make_stream(settings.seed, i);
        const CaseMatrix data = generate(rng);
        const TruthTable table = build_truth_table(data, settings.thresholds);
        report.indicator_trace[i] = solution_exists(table, settings.mode) ? 1 : 0;
    });
    report.results = static_cast<std::size_t>(
        std::accumulate(report.indicator_trace.begin(), report.indicator_trace.end(), std::size_t{0}));
    report.point_estimate = static_cast<double>(report.results) / static_cast<double>(settings.sims);
    std::tie(report.ci_low, report.ci_high) =
        bootstrap_ci(report.indicator_trace, settings.boot, settings.level, settings.seed);
    if (report.indicator_trace.size() >= 100) report.convergence = convergence_check(report.indicator_trace);
    return report;
}

}  // namespace

BaqcaReport assess(const MarginalProfile& profile, const AssessSettings& settings) {
    profile.validate();
    auto report = run(settings, [&](Rng& rng) { return generate_dataset(profile, rng); });
    report.profile = profile;
    report.null_kind = NullKind::Bernoulli;
    return report;
}

BaqcaReport assess_permutation(const CaseMatrix& observed, const AssessSettings& settings) {
    auto report = run(settings, [&](Rng& rng) { return permute_columns(observed, rng); });
    report.profile = marginal_profile(observed);
    report.null_kind = NullKind::PermuteColumns;
    return report;
}

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw LogicError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> bootstrap_ci(std::span<const std::uint8_t> indicator_trace, std::size_t boot,
                                       double level, std::uint64_t seed) {
    if (indicator_trace.empty()) throw InputError("bootstrap needs a non-empty trace");
    if (boot < 1) throw InputError("boot must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");

    const std::size_t n = indicator_trace.size();
    Rng rng = make_stream(mix_seed(seed, kBootstrapDomain), 0);
    std::vector<double> means(boot);
    for (std::size_t b = 0; b < boot; ++b) {
        std::size_t hits = 0;
        for (std::size_t k = 0; k < n; ++k) hits += indicator_trace[uniform_index(rng, n)];
        means[b] = static_cast<double>(hits) / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double tail = (1.0 - level) / 2.0;
    double low = quantile_sorted(means, tail);
    double high = quantile_sorted(means, 1.0 - tail);

    // The percentile interval can miss the point estimate when boot is tiny;
    // widen to keep low <= R/n <= high.
    const std::size_t r = std::accumulate(indicator_trace.begin(), indicator_trace.end(), std::size_t{0});
    const double point = static_cast<double>(r) / static_cast<double>(n);
    return {std::min(low, point), std::max(high, point)};
}

ConvergenceDiagnostic convergence_check(std::span<const std::uint8_t> indicator_trace) {
    if (indicator_trace.size() < 100) throw InputError("convergence check needs at least 100 draws");
    ConvergenceDiagnostic d;
    const std::size_t m = d.segments;
    const std::size_t len = indicator_trace.size() / m;
    const double L = static_cast<double>(len);

    std::vector<double> vars(m);
    d.segment_means.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        auto seg = indicator_trace.subspan(k * len, len);
        const double ones = static_cast<double>(std::accumulate(seg.begin(), seg.end(), std::size_t{0}));
        const double mean = ones / L;
        d.segment_means[k] = mean;
        // 0/1 draws: sum of squared deviations is ones * (1 - mean)
        vars[k] = ones * (1.0 - mean) / (L - 1.0);
    }
    d.within_variance = std::accumulate(vars.begin(), vars.end(), 0.0) / static_cast<double>(m);
    const double grand = std::accumulate(d.segment_means.begin(), d.segment_means.end(), 0.0) / static_cast<double>(m);
    double spread = 0.0;
    for (double mu : d.segment_means) spread += (mu - grand) * (mu - grand);
    d.between_variance = L * spread / static_cast<double>(m - 1);

    if (d.within_variance == 0.0) {
        d.ratio = d.between_variance == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
        const double pooled = (L - 1.0) / L * d.within_variance + d.between_variance / L;
        d.ratio = std::sqrt(pooled / d.within_variance);
    }
    d.converged = d.ratio <= kConvergenceLimit;
    return d;
}

}  // namespace baqca
