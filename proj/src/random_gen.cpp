#include "baqca/random_gen.hpp"

#include <fmt/format.h>

#include "baqca/error.hpp"

namespace baqca {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_index) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state = a ^ (stream_index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(state);
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream_index) {
    std::uint64_t state = mix_seed(seed, stream_index);
    std::seed_seq seq{static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32),
                      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(state >> 32)};
    return Rng(seq);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    if (bound == 0) throw LogicError("uniform_index: empty range");
    // Lemire's multiply-shift with rejection; exact and portable.
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InputError(fmt::format("empty integer range [{}, {}]", lo, hi));
    return lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

double uniform_real(Rng& rng, double lo, double hi) {
    if (hi < lo) throw InputError(fmt::format("empty real range [{}, {}]", lo, hi));
    if (hi == lo) return lo;
    return lo + (hi - lo) * uniform01(rng);
}

std::vector<std::string> default_condition_names(std::size_t v) {
    std::vector<std::string> names;
    names.reserve(v);
    for (std::size_t j = 0; j < v; ++j) names.push_back(fmt::format("C{}", j + 1));
    return names;
}

CaseMatrix generate_dataset(const MarginalProfile& profile, Rng& rng, const std::vector<std::string>& names) {
    profile.validate();
    const std::size_t v = profile.num_conditions();
    const std::size_t n = profile.n;
    std::vector<std::uint8_t> cells(n * v);
    std::vector<std::uint8_t> outcome(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < v; ++j) cells[i * v + j] = bernoulli(rng, profile.condition_probs[j]);
        outcome[i] = bernoulli(rng, profile.outcome_prob);
    }
    return CaseMatrix(names.empty() ? default_condition_names(v) : names, std::move(cells), std::move(outcome));
}

CaseMatrix generate_dataset(const NullModel& model, std::uint64_t stream_index, const std::vector<std::string>& names) {
    Rng rng = make_stream(model.seed, stream_index);
    return generate_dataset(model.profile, rng, names);
}

CaseMatrix permute_columns(const CaseMatrix& observed, Rng& rng) {
    const std::size_t n = observed.num_cases();
    const std::size_t v = observed.num_conditions();
    auto shuffle = [&](std::vector<std::uint8_t>& column) {
        for (std::size_t i = column.size(); i > 1; --i)
            std::swap(column[i - 1], column[uniform_index(rng, i)]);
    };
    std::vector<std::uint8_t> cells(n * v);
    std::vector<std::uint8_t> column(n);
    for (std::size_t j = 0; j < v; ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = observed.condition(i, j);
        shuffle(column);
        for (std::size_t i = 0; i < n; ++i) cells[i * v + j] = column[i];
    }
    std::vector<std::uint8_t> outcome(observed.outcome_values().begin(), observed.outcome_values().end());
    shuffle(outcome);
    return CaseMatrix(observed.condition_names(), std::move(cells), std::move(outcome), {}, observed.outcome_name());
}

CaseMatrix permute_columns(const CaseMatrix& observed, std::uint64_t seed, std::uint64_t stream_index) {
    Rng rng = make_stream(seed, stream_index);
    return permute_columns(observed, rng);
}

void StructureRanges::validate() const {
    if (conditions.hi < conditions.lo || sample_size.hi < sample_size.lo || probability.hi < probability.lo)
        throw InputError("empty structure range");
    if (conditions.lo < 1 || conditions.hi > 26) throw InputError("condition count range must lie in 1..26");
    if (sample_size.lo < 1) throw InputError("sample size range must start at >= 1");
    if (probability.lo < 0.0 || probability.hi > 1.0) throw InputError("probability range must lie in [0, 1]");
}

std::pair<CaseMatrix, StructureDescriptor> generate_uniform_structure(const StructureRanges& ranges, Rng& rng) {
    ranges.validate();
    StructureDescriptor d;
    d.num_conditions = static_cast<int>(uniform_int(rng, ranges.conditions.lo, ranges.conditions.hi));
    d.sample_size = static_cast<int>(uniform_int(rng, ranges.sample_size.lo, ranges.sample_size.hi));
    d.probability = uniform_real(rng, ranges.probability.lo, ranges.probability.hi);
    MarginalProfile profile{std::vector<double>(static_cast<std::size_t>(d.num_conditions), d.probability),
                            d.probability, static_cast<std::size_t>(d.sample_size)};
    return {generate_dataset(profile, rng), d};
}

std::pair<CaseMatrix, StructureDescriptor> generate_uniform_structure(const StructureRanges& ranges,
                                                                      std::uint64_t seed,
                                                                      std::uint64_t stream_index) {
    Rng rng = make_stream(seed, stream_index);
    return generate_uniform_structure(ranges, rng);
}

}  // namespace baqca
