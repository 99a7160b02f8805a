#include "baqca/minimize.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include <fmt/format.h>

#include "baqca/error.hpp"

namespace baqca {

namespace {

std::uint32_t bit_of(std::size_t condition, std::size_t v) {
    return std::uint32_t{1} << (v - 1 - condition);
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct Cube {
    std::uint32_t value;
    std::uint32_t dash;
    bool operator==(const Cube&) const = default;
};

struct CubeHash {
    std::size_t operator()(const Cube& c) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t{c.dash} << 32) | c.value);
    }
};

// Fixed-size bitset over pass-row indices.
class RowSet {
public:
    explicit RowSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    void merge(const RowSet& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    }
    // Rows in `o` not yet in this set.
    std::size_t count_new(const RowSet& o) const {
        std::size_t total = 0;
        for (std::size_t k = 0; k < words_.size(); ++k) total += std::popcount(o.words_[k] & ~words_[k]);
        return total;
    }
    std::size_t count() const {
        std::size_t total = 0;
        for (auto w : words_) total += std::popcount(w);
        return total;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct Cost {
    std::size_t recipes = 0;
    std::size_t literals = 0;
    auto operator<=>(const Cost&) const = default;
};

class CoverSearch {
public:
    CoverSearch(std::span<const Implicant> primes, std::span<const std::uint32_t> rows)
        : primes_(primes), num_rows_(rows.size()), covers_(primes.size(), RowSet(rows.size())),
          coverers_(rows.size()) {
        for (std::size_t p = 0; p < primes.size(); ++p)
            for (std::size_t r = 0; r < rows.size(); ++r)
                if (primes[p].covers(rows[r])) {
                    covers_[p].set(r);
                    coverers_[r].push_back(p);
                }
        last_chance_.resize(primes.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (coverers_[r].empty())
                throw LogicError(fmt::format("pass row {} is not covered by any prime", rows[r]));
            last_chance_[coverers_[r].back()].push_back(r);
        }
        min_literals_ = primes.empty() ? 0 : static_cast<std::size_t>(primes[0].literal_count());
        for (const auto& p : primes)
            min_literals_ = std::min(min_literals_, static_cast<std::size_t>(p.literal_count()));
    }

    std::vector<std::size_t> greedy() const {
        RowSet covered(num_rows_);
        std::vector<std::size_t> chosen;
        while (covered.count() < num_rows_) {
            std::size_t best = primes_.size();
            std::size_t best_gain = 0;
            for (std::size_t p = 0; p < primes_.size(); ++p) {
                const std::size_t gain = covered.count_new(covers_[p]);
                if (gain > best_gain ||
                    (gain == best_gain && gain > 0 &&
                     primes_[p].literal_count() < primes_[best].literal_count())) {
                    best = p;
                    best_gain = gain;
                }
            }
            chosen.push_back(best);
            covered.merge(covers_[best]);
        }
        // Local search: drop recipes whose rows the others already cover,
        // trying the most specific ones first.
        std::vector<std::size_t> order = chosen;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return primes_[a].literal_count() > primes_[b].literal_count();
        });
        for (std::size_t candidate : order) {
            RowSet rest(num_rows_);
            for (std::size_t p : chosen)
                if (p != candidate) rest.merge(covers_[p]);
            if (rest.count() == num_rows_) std::erase(chosen, candidate);
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    std::vector<std::size_t> exact() {
        auto seed = greedy();
        best_ = seed;
        best_cost_ = cost_of(seed);
        best_from_search_ = false;
        RowSet covered(num_rows_);
        std::vector<std::size_t> chosen;
        descend(0, covered, chosen, Cost{});
        return best_;
    }

private:
    Cost cost_of(const std::vector<std::size_t>& set) const {
        Cost c;
        for (std::size_t p : set) {
            ++c.recipes;
            c.literals += static_cast<std::size_t>(primes_[p].literal_count());
        }
        return c;
    }

    // Greedy packing of uncovered rows with pairwise disjoint coverer sets
    // (restricted to primes >= from): each needs its own additional recipe.
    std::size_t lower_bound(std::size_t from, const RowSet& covered) const {
        std::vector<char> used(primes_.size(), 0);
        std::size_t bound = 0;
        for (std::size_t r = 0; r < num_rows_; ++r) {
            if (covered.test(r)) continue;
            bool clash = false;
            for (std::size_t p : coverers_[r])
                if (p >= from && used[p]) {
                    clash = true;
                    break;
                }
            if (clash) continue;
            ++bound;
            for (std::size_t p : coverers_[r])
                if (p >= from) used[p] = 1;
        }
        return bound;
    }

    bool pruned(const Cost& bound) const {
        // Equal-cost covers found later are lexicographically larger, so ties prune.
        return best_from_search_ ? bound >= best_cost_ : bound > best_cost_;
    }

    void descend(std::size_t index, RowSet& covered, std::vector<std::size_t>& chosen, Cost cost) {
        if (++nodes_ > kNodeBudget) return;
        if (covered.count() == num_rows_) {
            if (cost < best_cost_ || (!best_from_search_ && cost == best_cost_)) {
                best_ = chosen;
                best_cost_ = cost;
                best_from_search_ = true;
            }
            return;
        }
        if (index == primes_.size()) return;
        const std::size_t lb = lower_bound(index, covered);
        if (pruned(Cost{cost.recipes + lb, cost.literals + lb * min_literals_})) return;

        if (covered.count_new(covers_[index]) > 0) {
            RowSet next = covered;
            next.merge(covers_[index]);
            chosen.push_back(index);
            descend(index + 1, next, chosen,
                    Cost{cost.recipes + 1,
                         cost.literals + static_cast<std::size_t>(primes_[index].literal_count())});
            chosen.pop_back();
        }
        for (std::size_t r : last_chance_[index])
            if (!covered.test(r)) return;  // excluding this prime strands row r
        descend(index + 1, covered, chosen, cost);
    }

    std::span<const Implicant> primes_;
    std::size_t num_rows_;
    std::vector<RowSet> covers_;
    std::vector<std::vector<std::size_t>> coverers_;
    std::vector<std::vector<std::size_t>> last_chance_;
    std::size_t min_literals_ = 0;

    // Deterministic cap on search effort; the best cover found so far stands.
    static constexpr std::size_t kNodeBudget = 20'000'000;
    std::size_t nodes_ = 0;

    std::vector<std::size_t> best_;
    Cost best_cost_;
    bool best_from_search_ = false;
};

}  // namespace

Implicant Implicant::from_pattern(std::string_view pattern) {
    if (pattern.empty() || pattern.size() > 26) throw InputError("implicant pattern needs 1 to 26 positions");
    Implicant imp;
    imp.num_conditions = static_cast<std::uint8_t>(pattern.size());
    for (std::size_t j = 0; j < pattern.size(); ++j) {
        const std::uint32_t bit = bit_of(j, pattern.size());
        switch (pattern[j]) {
            case '1': imp.care |= bit; imp.value |= bit; break;
            case '0': imp.care |= bit; break;
            case '-': break;
            default: throw InputError(fmt::format("bad implicant pattern '{}'", pattern));
        }
    }
    return imp;
}

int Implicant::literal_count() const { return std::popcount(care); }

std::optional<Literal> Implicant::literal(std::size_t condition) const {
    const std::uint32_t bit = bit_of(condition, num_conditions);
    if (!(care & bit)) return std::nullopt;
    return (value & bit) ? Literal::Present : Literal::Absent;
}

std::string Implicant::pattern() const {
    std::string out(num_conditions, '-');
    for (std::size_t j = 0; j < num_conditions; ++j) {
        const std::uint32_t bit = bit_of(j, num_conditions);
        if (care & bit) out[j] = (value & bit) ? '1' : '0';
    }
    return out;
}

bool canonical_less(const Implicant& a, const Implicant& b) { return a.pattern() < b.pattern(); }

std::string to_string(SolutionMode mode) {
    return mode == SolutionMode::Complex ? "complex" : "parsimonious";
}

SolutionMode parse_solution_mode(std::string_view text) {
    if (text == "complex") return SolutionMode::Complex;
    if (text == "parsimonious") return SolutionMode::Parsimonious;
    throw InputError(fmt::format("unknown solution mode '{}' (complex|parsimonious)", text));
}

std::vector<Implicant> prime_implicants(std::span<const std::uint32_t> pass_rows,
                                        std::span<const std::uint32_t> dont_care_rows,
                                        std::size_t num_conditions) {
    if (num_conditions == 0 || num_conditions > 26)
        throw InputError("prime implicants need 1 to 26 conditions");
    const std::uint32_t full = (std::uint32_t{1} << num_conditions) - 1;

    std::unordered_set<Cube, CubeHash> current;
    for (auto code : pass_rows) current.insert(Cube{code & full, 0});
    for (auto code : dont_care_rows) current.insert(Cube{code & full, 0});

    std::vector<Cube> primes;
    while (!current.empty()) {
        std::unordered_set<Cube, CubeHash> next;
        std::unordered_set<Cube, CubeHash> merged;
        for (const Cube& c : current) {
            for (std::size_t b = 0; b < num_conditions; ++b) {
                const std::uint32_t bit = std::uint32_t{1} << b;
                if ((c.dash & bit) || (c.value & bit)) continue;
                const Cube partner{c.value | bit, c.dash};
                if (current.contains(partner)) {
                    merged.insert(c);
                    merged.insert(partner);
                    next.insert(Cube{c.value, c.dash | bit});
                }
            }
        }
        for (const Cube& c : current)
            if (!merged.contains(c)) primes.push_back(c);
        current = std::move(next);
    }

    std::vector<Implicant> out;
    for (const Cube& c : primes) {
        Implicant imp{c.value, full & ~c.dash, static_cast<std::uint8_t>(num_conditions)};
        if (std::any_of(pass_rows.begin(), pass_rows.end(), [&](std::uint32_t r) { return imp.covers(r); }))
            out.push_back(imp);
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

std::vector<Implicant> minimal_cover(std::span<const Implicant> primes, std::span<const std::uint32_t> pass_rows) {
    if (pass_rows.empty()) return {};
    std::vector<Implicant> ordered(primes.begin(), primes.end());
    std::sort(ordered.begin(), ordered.end(), canonical_less);
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

    CoverSearch search(ordered, pass_rows);
    const std::size_t v = ordered.empty() ? 0 : ordered.front().num_conditions;
    const auto picked = v <= kExactCoverMaxConditions ? search.exact() : search.greedy();

    std::vector<Implicant> out;
    out.reserve(picked.size());
    for (std::size_t p : picked) out.push_back(ordered[p]);
    return out;
}

SolutionMetrics compute_metrics(std::span<const Implicant> recipes, const CaseMatrix& data) {
    if (recipes.empty()) throw LogicError("compute_metrics needs at least one recipe");
    std::size_t positives = 0;
    for (auto y : data.outcome_values()) positives += y;
    if (positives == 0) throw InputError("coverage undefined: no case has the outcome");

    struct Tally {
        std::size_t matched = 0;
        std::size_t matched_positive = 0;
    };
    std::vector<Tally> per(recipes.size());
    Tally any;
    for (std::size_t i = 0; i < data.num_cases(); ++i) {
        const std::uint32_t code = data.configuration(i);
        const bool y = data.outcome(i) != 0;
        bool hit = false;
        for (std::size_t k = 0; k < recipes.size(); ++k) {
            if (!recipes[k].covers(code)) continue;
            hit = true;
            ++per[k].matched;
            per[k].matched_positive += y;
        }
        if (hit) {
            ++any.matched;
            any.matched_positive += y;
        }
    }
    auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : double(a) / double(b); };
    SolutionMetrics m;
    for (const auto& t : per)
        m.per_recipe.push_back({ratio(t.matched_positive, t.matched), ratio(t.matched_positive, positives)});
    m.overall_coverage = ratio(any.matched_positive, positives);
    m.overall_consistency = ratio(any.matched_positive, any.matched);
    return m;
}

std::string describe(NoResultReason reason) {
    switch (reason) {
        case NoResultReason::NoPassingRows: return "no configurations pass thresholds";
        case NoResultReason::Tautology: return "every configuration is included; the solution is a tautology";
    }
    return "no result";
}

Minimization minimize(const TruthTable& table, SolutionMode mode) {
    std::vector<std::uint32_t> pass, dont_care;
    for (const auto& row : table.rows()) {
        if (row.status == RowStatus::Pass)
            pass.push_back(row.code);
        else if (row.status == RowStatus::Remainder && mode == SolutionMode::Parsimonious)
            dont_care.push_back(row.code);
    }
    if (pass.empty()) return {{}, NoResultReason::NoPassingRows};
    const auto primes = prime_implicants(pass, dont_care, table.num_conditions());
    auto cover = minimal_cover(primes, pass);
    if (std::any_of(cover.begin(), cover.end(), [](const Implicant& r) { return r.is_tautology(); }))
        return {{}, NoResultReason::Tautology};
    return {std::move(cover), std::nullopt};
}

bool solution_exists(const TruthTable& table, SolutionMode mode) {
    bool any_pass = false;
    bool any_negative = false;
    for (const auto& row : table.rows()) {
        switch (row.status) {
            case RowStatus::Pass: any_pass = true; break;
            case RowStatus::Fail: any_negative = true; break;
            case RowStatus::Remainder: any_negative |= mode == SolutionMode::Complex; break;
        }
        if (any_pass && any_negative) return true;
    }
    return false;
}

std::optional<SolutionSet> solve(const TruthTable& table, SolutionMode mode, const CaseMatrix& data) {
    if (data.num_conditions() != table.num_conditions())
        throw LogicError("solve: table and data disagree on the number of conditions");
    auto result = minimize(table, mode);
    if (result.reason) return std::nullopt;

    SolutionSet solution;
    solution.mode = mode;
    solution.thresholds = table.thresholds();
    solution.condition_names = table.condition_names();
    std::size_t positives = 0;
    for (auto y : data.outcome_values()) positives += y;
    if (positives > 0) {
        solution.metrics = compute_metrics(result.recipes, data);
    } else {
        // Only reachable with a zero consistency threshold; nothing to cover.
        solution.metrics.per_recipe.assign(result.recipes.size(), RecipeMetrics{});
    }
    solution.recipes = std::move(result.recipes);
    return solution;
}

std::string render_recipe(const Implicant& recipe, std::span<const std::string> names) {
    if (recipe.is_tautology()) return "TRUE";
    if (names.size() != recipe.num_conditions) throw LogicError("render_recipe: name count mismatch");
    std::string out;
    for (std::size_t j = 0; j < names.size(); ++j) {
        auto lit = recipe.literal(j);
        if (!lit) continue;
        if (!out.empty()) out += " * ";
        out += *lit == Literal::Present ? upper(names[j]) : lower(names[j]);
    }
    return out;
}

std::string render_solution(std::span<const Implicant> recipes, std::span<const std::string> names) {
    std::string out;
    for (const auto& r : recipes) {
        if (!out.empty()) out += " + ";
        out += render_recipe(r, names);
    }
    return out;
}

}  // namespace baqca
