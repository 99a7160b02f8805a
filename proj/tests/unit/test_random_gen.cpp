#include <doctest.h>

#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "baqca/error.hpp"
#include "baqca/random_gen.hpp"
#include "oracles.hpp"

using namespace baqca;

namespace {

double column_mean(const CaseMatrix& d, std::size_t j) {
    double s = 0;
    for (std::size_t i = 0; i < d.num_cases(); ++i) s += d.condition(i, j);
    return s / static_cast<double>(d.num_cases());
}

double chi_square_critical(std::size_t df) {
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(static_cast<double>(df)), 0.999);
}

}  // namespace

TEST_CASE("degenerate probabilities") {
    const NullModel m{MarginalProfile{{0.0, 1.0}, 1.0, 50}, 7};
    const auto d = generate_dataset(m, 0);
    CHECK(d.num_cases() == 50);
    CHECK(d.condition_names() == std::vector<std::string>{"C1", "C2"});
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(d.condition(i, 0) == 0);
        CHECK(d.condition(i, 1) == 1);
        CHECK(d.outcome(i) == 1);
    }
}

TEST_CASE("column means track the profile") {
    const NullModel m{MarginalProfile{{0.5}, 0.5, 10000}, 99};
    const auto d = generate_dataset(m, 3);
    CHECK(std::abs(column_mean(d, 0) - 0.5) < 0.015);
}

TEST_CASE("streams are reproducible and distinct") {
    const NullModel m{MarginalProfile{{0.3, 0.6, 0.5}, 0.4, 40}, 12345};
    CHECK(generate_dataset(m, 5) == generate_dataset(m, 5));
    CHECK_FALSE(generate_dataset(m, 5) == generate_dataset(m, 6));
    const NullModel other{m.profile, 12346};
    CHECK_FALSE(generate_dataset(m, 5) == generate_dataset(other, 5));

    Rng a = make_stream(1, 2), b = make_stream(1, 2);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("bounded draws") {
    Rng rng = make_stream(4, 4);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto k = uniform_int(rng, 3, 9);
        REQUIRE(k >= 3);
        REQUIRE(k <= 9);
        ++hits[static_cast<std::size_t>(k - 3)];
        const double u = uniform01(rng);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    double chi = 0;
    for (int h : hits) chi += (h - 10000.0) * (h - 10000.0) / 10000.0;
    CHECK(chi < chi_square_critical(6));
    CHECK(uniform_int(rng, 5, 5) == 5);
}

TEST_CASE("point-range structure") {
    StructureRanges r;
    r.conditions = {3, 3};
    r.sample_size = {20, 20};
    r.probability = {0.5, 0.5};
    const auto [d, s] = generate_uniform_structure(r, 1, 0);
    CHECK(d.num_cases() == 20);
    CHECK(d.num_conditions() == 3);
    CHECK(s.num_conditions == 3);
    CHECK(s.sample_size == 20);
    CHECK(s.probability == 0.5);

    StructureRanges bad;
    bad.conditions = {4, 2};
    CHECK_THROWS_AS(generate_uniform_structure(bad, 1, 0), InputError);
}

TEST_CASE("structure draws are uniform over the ranges") {
    StructureRanges r;
    std::map<int, int> v_hits, n_hits;
    double p_sum = 0;
    const int draws = 12000;
    for (int i = 0; i < draws; ++i) {
        const auto [d, s] = generate_uniform_structure(r, 77, static_cast<std::uint64_t>(i));
        ++v_hits[s.num_conditions];
        ++n_hits[s.sample_size];
        REQUIRE(s.probability >= 0.1);
        REQUIRE(s.probability <= 0.9);
        p_sum += s.probability;
    }
    CHECK(v_hits.size() == 6);
    CHECK(n_hits.size() == 51);
    double chi = 0;
    for (auto [k, h] : v_hits) chi += (h - draws / 6.0) * (h - draws / 6.0) / (draws / 6.0);
    CHECK(chi < chi_square_critical(5));
    chi = 0;
    for (auto [k, h] : n_hits) chi += (h - draws / 51.0) * (h - draws / 51.0) / (draws / 51.0);
    CHECK(chi < chi_square_critical(50));
    CHECK(std::abs(p_sum / draws - 0.5) < 0.01);
}

TEST_CASE("shared p gives expected column sums") {
    StructureRanges r;
    r.conditions = {2, 2};
    r.sample_size = {60, 60};
    r.probability = {0.1, 0.1};
    double total = 0;
    for (int i = 0; i < 500; ++i) {
        const auto [d, s] = generate_uniform_structure(r, 5, static_cast<std::uint64_t>(i));
        total += column_mean(d, 0) + column_mean(d, 1);
        for (auto y : d.outcome_values()) total += y / 60.0;
    }
    CHECK(total / 1500 == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("columns are independent") {
    const NullModel m{MarginalProfile{{0.5, 0.3}, 0.7, 100}, 2718};
    double sum_r = 0;
    const int reps = 10000;
    for (int k = 0; k < reps; ++k) {
        const auto d = generate_dataset(m, static_cast<std::uint64_t>(k));
        double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
        for (std::size_t i = 0; i < d.num_cases(); ++i) {
            const double a = d.condition(i, 0), b = d.outcome(i);
            sa += a, sb += b, sab += a * b, saa += a * a, sbb += b * b;
        }
        const double n = static_cast<double>(d.num_cases());
        const double cov = sab / n - sa / n * sb / n;
        const double va = saa / n - (sa / n) * (sa / n), vb = sbb / n - (sb / n) * (sb / n);
        if (va > 0 && vb > 0) sum_r += cov / std::sqrt(va * vb);
    }
    CHECK(std::abs(sum_r / reps) < 0.01);
}

TEST_CASE("column sums fit the binomial") {
    const int n = 20;
    const double p = 0.3;
    const NullModel m{MarginalProfile{{p}, p, static_cast<std::size_t>(n)}, 31337};
    std::vector<int> counts(n + 1, 0);
    const int reps = 1000;
    for (int k = 0; k < reps; ++k) {
        const auto d = generate_dataset(m, static_cast<std::uint64_t>(k));
        int s = 0;
        for (std::size_t i = 0; i < d.num_cases(); ++i) s += d.condition(i, 0);
        ++counts[static_cast<std::size_t>(s)];
    }
    // Pool tails until each bin expects at least 5.
    std::vector<std::pair<double, int>> bins;  // expected, observed
    double e = 0;
    int o = 0;
    for (int k = 0; k <= n; ++k) {
        e += reps * oracle::binom_pmf(n, k, p);
        o += counts[static_cast<std::size_t>(k)];
        if (e >= 5 && k < n) {
            bins.push_back({e, o});
            e = 0;
            o = 0;
        }
    }
    bins.back().first += e;
    bins.back().second += o;
    double chi = 0;
    for (auto [ex, ob] : bins) chi += (ob - ex) * (ob - ex) / ex;
    CHECK(chi < chi_square_critical(bins.size() - 1));
}

TEST_CASE("column permutation keeps margins") {
    const CaseMatrix d({"A", "B"}, {1, 0, 1, 1, 0, 0, 1, 0, 0, 1}, {1, 0, 0, 1, 1});
    const auto a = permute_columns(d, 9, 0);
    CHECK(a == permute_columns(d, 9, 0));
    const auto pa = marginal_profile(a), pd = marginal_profile(d);
    CHECK(pa.condition_probs == pd.condition_probs);
    CHECK(pa.outcome_prob == pd.outcome_prob);
    CHECK(a.case_ids() == d.case_ids());
}
