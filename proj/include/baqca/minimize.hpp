#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "baqca/dataset.hpp"
#include "baqca/truth_table.hpp"

namespace baqca {

enum class Literal : std::uint8_t { Absent, Present };

// A conjunction of condition literals (a recipe / pathway).
//
// Bit positions follow configuration codes: condition j lives at bit
// (v - 1 - j).  `care` marks constrained conditions and `value` holds their
// required states; value bits outside `care` are always zero.  An empty care
// mask is the tautology.
struct Implicant {
    std::uint32_t value = 0;
    std::uint32_t care = 0;
    std::uint8_t num_conditions = 0;

    static Implicant from_pattern(std::string_view pattern);  // e.g. "1-0"

    bool covers(std::uint32_t code) const { return (code & care) == value; }
    bool is_tautology() const { return care == 0; }
    int literal_count() const;
    std::optional<Literal> literal(std::size_t condition) const;

    // One char per condition: '1' present, '0' absent, '-' unconstrained.
    // Ordering of these strings is the canonical tie-break order.
    std::string pattern() const;

    // True when every literal of `other` also appears here (this is at least as specific).
    bool refines(const Implicant& other) const {
        return (care & other.care) == other.care && (value & other.care) == other.value;
    }

    bool operator==(const Implicant&) const = default;
};

bool canonical_less(const Implicant& a, const Implicant& b);

enum class SolutionMode : std::uint8_t { Complex, Parsimonious };

std::string to_string(SolutionMode mode);
SolutionMode parse_solution_mode(std::string_view text);

// All maximal implicants of pass ∪ dont_care that cover at least one pass row
// (Quine–McCluskey), in canonical order.
std::vector<Implicant> prime_implicants(std::span<const std::uint32_t> pass_rows,
                                        std::span<const std::uint32_t> dont_care_rows,
                                        std::size_t num_conditions);

// Above this many conditions the cover search is greedy plus redundancy removal.
inline constexpr std::size_t kExactCoverMaxConditions = 12;

// A subset of `primes` covering every pass row, minimal by recipe count and
// then total literal count; ties resolve to the lexicographically smallest
// sorted list of patterns.  Returned in canonical order.
std::vector<Implicant> minimal_cover(std::span<const Implicant> primes, std::span<const std::uint32_t> pass_rows);

struct RecipeMetrics {
    double consistency = 0.0;
    double raw_coverage = 0.0;
};

struct SolutionMetrics {
    std::vector<RecipeMetrics> per_recipe;
    double overall_coverage = 0.0;
    double overall_consistency = 0.0;
};

// Throws InputError("coverage undefined") when no case has the outcome.
SolutionMetrics compute_metrics(std::span<const Implicant> recipes, const CaseMatrix& data);

struct SolutionSet {
    std::vector<Implicant> recipes;
    SolutionMode mode = SolutionMode::Complex;
    SolutionMetrics metrics;
    Thresholds thresholds;
    std::vector<std::string> condition_names;
};

enum class NoResultReason : std::uint8_t { NoPassingRows, Tautology };

std::string describe(NoResultReason reason);

struct Minimization {
    std::vector<Implicant> recipes;  // empty when reason is set
    std::optional<NoResultReason> reason;
};

// Pass rows and don't-cares for a mode: COMPLEX treats every non-PASS row as
// negative; PARSIMONIOUS lets REMAINDER rows absorb.
Minimization minimize(const TruthTable& table, SolutionMode mode);

// Whether minimize() would produce a recipe set, without running it: a result
// exists iff some row passes and some row is forced negative.
bool solution_exists(const TruthTable& table, SolutionMode mode);

// nullopt is "no result": empty PASS set or a tautological solution.
std::optional<SolutionSet> solve(const TruthTable& table, SolutionMode mode, const CaseMatrix& data);

std::string render_recipe(const Implicant& recipe, std::span<const std::string> names);
std::string render_solution(std::span<const Implicant> recipes, std::span<const std::string> names);

}  // namespace baqca
