#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "baqca/dataset.hpp"

namespace baqca {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream): the engine is seeded with a
// SplitMix64 mix of both values, so parallel streams need no coordination.
Rng make_stream(std::uint64_t seed, std::uint64_t stream_index);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_index);

// Portable draws.  The standard distributions are implementation-defined, so
// results would differ between standard libraries.
double uniform01(Rng& rng);  // [0, 1), 53 random bits
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);  // [0, bound)
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);  // [lo, hi]
double uniform_real(Rng& rng, double lo, double hi);
inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Null model: every cell an independent Bernoulli draw at the profile's
// column proportion.  Columns are independent by construction.
struct NullModel {
    MarginalProfile profile;
    std::uint64_t seed = 0;
};

// Deterministic in (model.seed, stream_index).  Condition names are
// C1..Cv unless names are supplied.
CaseMatrix generate_dataset(const NullModel& model, std::uint64_t stream_index,
                            const std::vector<std::string>& names = {});
CaseMatrix generate_dataset(const MarginalProfile& profile, Rng& rng, const std::vector<std::string>& names = {});

// Alternative null for sensitivity analysis: each column of `observed`
// shuffled independently, preserving exact column sums.
CaseMatrix permute_columns(const CaseMatrix& observed, std::uint64_t seed, std::uint64_t stream_index);
CaseMatrix permute_columns(const CaseMatrix& observed, Rng& rng);

template <class T>
struct Range {
    T lo{};
    T hi{};
    bool contains(T x) const { return lo <= x && x <= hi; }
};

struct StructureRanges {
    Range<int> conditions{1, 6};
    Range<int> sample_size{10, 60};
    Range<double> probability{0.1, 0.9};

    void validate() const;
};

struct StructureDescriptor {
    int num_conditions = 0;
    int sample_size = 0;
    double probability = 0.0;  // shared by every condition and the outcome
};

std::pair<CaseMatrix, StructureDescriptor> generate_uniform_structure(const StructureRanges& ranges,
                                                                      std::uint64_t seed,
                                                                      std::uint64_t stream_index);
std::pair<CaseMatrix, StructureDescriptor> generate_uniform_structure(const StructureRanges& ranges, Rng& rng);

std::vector<std::string> default_condition_names(std::size_t v);

}  // namespace baqca
