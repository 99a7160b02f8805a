#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "baqca/assessment.hpp"
#include "baqca/error.hpp"
#include "oracles.hpp"

using namespace baqca;

namespace {

// Exact probability that QCA returns a result on a null dataset, by
// enumerating every dataset of a tiny profile.  A result needs a pass row and
// a non-empty forbidden set (otherwise the cheapest cover is the empty cube),
// which the exhaustive cover oracle decides independently of the engine.
double exact_result_probability(const MarginalProfile& p, const Thresholds& t, SolutionMode mode) {
    const std::size_t v = p.num_conditions(), n = p.n;
    const std::size_t cells = n * (v + 1);
    double total = 0.0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cells); ++bits) {
        double w = 1.0;
        std::vector<std::uint32_t> count(std::size_t{1} << v, 0), pos(std::size_t{1} << v, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t code = 0;
            for (std::size_t j = 0; j < v; ++j) {
                const bool b = bits >> (i * (v + 1) + j) & 1;
                w *= b ? p.condition_probs[j] : 1.0 - p.condition_probs[j];
                code = (code << 1) | b;
            }
            const bool y = bits >> (i * (v + 1) + v) & 1;
            w *= y ? p.outcome_prob : 1.0 - p.outcome_prob;
            ++count[code];
            pos[code] += y;
        }
        if (w == 0.0) continue;
        std::vector<std::uint32_t> pass, forbidden;
        for (std::uint32_t c = 0; c < count.size(); ++c) {
            if (count[c] == 0) {
                if (mode == SolutionMode::Complex) forbidden.push_back(c);
            } else if (count[c] >= t.conf_n && pos[c] >= t.consistency * count[c] - 1e-12) {
                pass.push_back(c);
            } else {
                forbidden.push_back(c);
            }
        }
        if (pass.empty()) continue;
        const auto cost = oracle::exhaustive_min_cover(pass, forbidden, v);
        if (cost.literals > 0) total += w;
    }
    return total;
}

AssessSettings settings(double c, std::uint32_t n, std::size_t sims, std::uint64_t seed,
                        SolutionMode mode = SolutionMode::Complex) {
    AssessSettings s;
    s.thresholds = {c, n};
    s.mode = mode;
    s.sims = sims;
    s.seed = seed;
    s.boot = 500;
    return s;
}

}  // namespace

TEST_CASE("v=1 analytic case") {
    const MarginalProfile p{{0.5}, 1.0, 10};
    const double analytic = 2.0 * std::pow(0.5, 10);
    CHECK(exact_result_probability(p, {1.0, 1}, SolutionMode::Complex) == doctest::Approx(analytic).epsilon(1e-12));
    const auto r = assess(p, settings(1.0, 1, 20000, 42));
    CHECK(std::abs(r.point_estimate - analytic) < 0.001);
    CHECK(r.point_estimate == static_cast<double>(r.results) / 20000.0);
}

TEST_CASE("estimates agree with exact enumeration on tiny profiles") {
    struct Case {
        MarginalProfile p;
        Thresholds t;
        SolutionMode mode;
    };
    const std::vector<Case> cases{
        {{{0.5}, 0.5, 4}, {0.85, 1}, SolutionMode::Complex},
        {{{0.3}, 0.7, 5}, {0.6, 2}, SolutionMode::Parsimonious},
        {{{0.4, 0.6}, 0.5, 3}, {0.85, 1}, SolutionMode::Complex},
        {{{0.4, 0.6}, 0.5, 3}, {0.85, 1}, SolutionMode::Parsimonious},
        {{{0.2, 0.5}, 0.8, 3}, {0.5, 1}, SolutionMode::Parsimonious},
    };
    for (const auto& c : cases) {
        const double exact = exact_result_probability(c.p, c.t, c.mode);
        const std::size_t sims = 20000;
        const auto r = assess(c.p, settings(c.t.consistency, c.t.conf_n, sims, 17, c.mode));
        const double se = std::sqrt(std::max(exact * (1 - exact), 1e-6) / sims);
        CHECK(std::abs(r.point_estimate - exact) < 4.5 * se);
    }
}

TEST_CASE("zero outcome probability never yields a result") {
    const auto r = assess(MarginalProfile{{0.5, 0.5}, 0.0, 30}, settings(0.85, 1, 500, 1));
    CHECK(r.point_estimate == 0.0);
    CHECK(r.ci_low == 0.0);
    CHECK(r.ci_high == 0.0);
}

TEST_CASE("worker count does not change the report") {
    const MarginalProfile p{{0.4, 0.5, 0.6}, 0.3, 25};
    auto s = settings(0.8, 1, 3000, 555);
    s.threads = 1;
    const auto a = assess(p, s);
    for (std::size_t t : {2, 3, 8}) {
        s.threads = t;
        const auto b = assess(p, s);
        CHECK(a.indicator_trace == b.indicator_trace);
        CHECK(a.ci_low == b.ci_low);
        CHECK(a.ci_high == b.ci_high);
    }
}

TEST_CASE("bootstrap intervals") {
    std::vector<std::uint8_t> zeros(2000, 0), ones(2000, 1);
    CHECK(bootstrap_ci(zeros, 1000, 0.95, 1) == std::pair<double, double>{0.0, 0.0});
    CHECK(bootstrap_ci(ones, 1000, 0.95, 1) == std::pair<double, double>{1.0, 1.0});

    std::vector<std::uint8_t> trace(2000, 0);
    std::mt19937_64 rng(8);
    std::vector<std::size_t> idx(2000);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < 1889; ++k) trace[idx[k]] = 1;
    const auto [lo, hi] = bootstrap_ci(trace, 1000, 0.95, 2);
    CHECK(std::abs(lo - 0.9360) < 0.004);
    CHECK(std::abs(hi - 0.9530) < 0.004);

    CHECK_THROWS_AS(bootstrap_ci(std::vector<std::uint8_t>{}, 10, 0.95, 0), InputError);
    CHECK_THROWS_AS(bootstrap_ci(trace, 10, 1.5, 0), InputError);
}

TEST_CASE("type-7 quantiles") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(quantile_sorted(x, 0.0) == 1.0);
    CHECK(quantile_sorted(x, 0.25) == doctest::Approx(1.75));
    CHECK(quantile_sorted(x, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_sorted(x, 1.0) == 4.0);
}

TEST_CASE("interval sandwiches the point estimate") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<std::uint8_t> t(1 + rng() % 300);
        const double p = (rng() % 100) / 100.0;
        for (auto& x : t) x = (rng() % 10000) / 10000.0 < p;
        const double point = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
        const auto [lo, hi] = bootstrap_ci(t, 1 + rng() % 50, 0.95, rng());
        CHECK(lo <= point);
        CHECK(point <= hi);
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
    }
}

TEST_CASE("convergence diagnostic") {
    std::vector<std::uint8_t> iid(2000);
    std::mt19937_64 rng(12);
    for (auto& x : iid) x = rng() % 10 < 3;
    const auto a = convergence_check(iid);
    CHECK(a.converged);
    CHECK(a.ratio < 1.1);

    std::vector<std::uint8_t> drift(2000, 0);
    std::fill(drift.begin() + 1000, drift.end(), 1);
    CHECK_FALSE(convergence_check(drift).converged);

    const auto c = convergence_check(std::vector<std::uint8_t>(500, 1));
    CHECK(c.ratio == 1.0);
    CHECK(c.converged);

    CHECK_THROWS_AS(convergence_check(std::vector<std::uint8_t>(99, 0)), InputError);
}

TEST_CASE("interval covers the analytic value in repeated assessments") {
    const MarginalProfile p{{0.5}, 1.0, 10};
    const double analytic = 2.0 * std::pow(0.5, 10);
    int covered = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        auto s = settings(1.0, 1, 10000, 1000 + rep);
        s.boot = 400;
        const auto r = assess(p, s);
        covered += r.ci_low <= analytic && analytic <= r.ci_high;
    }
    CHECK(covered >= 90);
}

TEST_CASE("raising the configurational N threshold does not raise the estimate") {
    const MarginalProfile p{{0.4, 0.5, 0.6, 0.5, 0.45}, 19.0 / 67.0, 67};
    double previous = 1.0;
    for (std::uint32_t n = 1; n <= 6; ++n) {
        const auto r = assess(p, settings(0.85, n, 2000, 2010));
        CHECK(r.point_estimate <= previous);
        previous = r.point_estimate;
    }
}

TEST_CASE("permutation null") {
    const CaseMatrix d({"A", "B"}, {1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1, 1}, {1, 0, 0, 1, 1, 0});
    auto s = settings(0.85, 1, 400, 3);
    const auto r = assess_permutation(d, s);
    CHECK(r.null_kind == NullKind::PermuteColumns);
    CHECK(r.indicator_trace == assess_permutation(d, s).indicator_trace);
    CHECK(r.profile.outcome_prob == 0.5);
}
