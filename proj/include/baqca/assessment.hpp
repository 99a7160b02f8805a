#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "baqca/dataset.hpp"
#include "baqca/minimize.hpp"
#include "baqca/truth_table.hpp"

namespace baqca {

// Which random data the assessment compares against.
enum class NullKind : std::uint8_t {
    Bernoulli,       // i.i.d. cells at the observed column proportions (default)
    PermuteColumns,  // each observed column shuffled independently
};

struct AssessSettings {
    Thresholds thresholds;
    SolutionMode mode = SolutionMode::Complex;
    std::size_t sims = 2000;
    std::size_t boot = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0 = hardware concurrency; never affects output
};

struct ConvergenceDiagnostic {
    std::size_t segments = 4;
    std::vector<double> segment_means;
    double within_variance = 0.0;
    double between_variance = 0.0;
    double ratio = 1.0;  // potential scale reduction; 1.0 for constant traces
    bool converged = true;
};

struct BaqcaReport {
    double point_estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t results = 0;  // R
    std::vector<std::uint8_t> indicator_trace;
    AssessSettings settings;
    NullKind null_kind = NullKind::Bernoulli;
    MarginalProfile profile;
    std::optional<ConvergenceDiagnostic> convergence;  // absent for traces shorter than 100
};

inline constexpr double kConvergenceLimit = 1.1;

// Simulates settings.sims null datasets and records whether QCA returns a
// result on each.  Iteration i uses stream (seed, i).
BaqcaReport assess(const MarginalProfile& profile, const AssessSettings& settings);

// Same, with the column-permutation null built from observed data.
BaqcaReport assess_permutation(const CaseMatrix& observed, const AssessSettings& settings);

// Percentile bootstrap of the trace's mean: `boot` resamples with replacement,
// then type-7 quantiles at (1-level)/2 and 1-(1-level)/2.  Draws come from
// a stream domain of `seed` disjoint from the per-iteration simulation streams.
std::pair<double, double> bootstrap_ci(std::span<const std::uint8_t> indicator_trace, std::size_t boot,
                                       double level, std::uint64_t seed);

// Four contiguous segments; Gelman–Rubin style ratio of pooled to within
// variance.  Requires at least 100 entries.
ConvergenceDiagnostic convergence_check(std::span<const std::uint8_t> indicator_trace);

// Type-7 sample quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double prob);

}  // namespace baqca
