#include <doctest.h>

#include <random>

#include "baqca/error.hpp"
#include "baqca/truth_table.hpp"
#include "oracles.hpp"

using namespace baqca;

TEST_CASE("single-condition table") {
    // {A=1,Y=1} x3, {A=0,Y=0} x2
    const CaseMatrix d({"A"}, {1, 1, 1, 0, 0}, {1, 1, 1, 0, 0});
    const auto t = build_truth_table(d, {0.85, 1});
    REQUIRE(t.rows().size() == 2);
    CHECK(t.row(1).case_count == 3);
    CHECK(t.row(1).consistency() == 1.0);
    CHECK(t.row(1).status == RowStatus::Pass);
    CHECK(t.row(0).case_count == 2);
    CHECK(t.row(0).consistency() == 0.0);
    CHECK(t.row(0).status == RowStatus::Fail);

    const auto pass = passing_rows(t);
    REQUIRE(pass.size() == 1);
    CHECK(pass[0].code == 1);
}

TEST_CASE("row shape and counts") {
    const CaseMatrix d({"A", "B", "C", "D", "E"}, std::vector<std::uint8_t>(15, 1), {1, 1, 0});
    const auto t = build_truth_table(d, {0.5, 1});
    CHECK(t.rows().size() == 32);
    CHECK(t.row(31).consistency() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(t.bits_string(0b10110) == "10110");
    std::size_t total = 0;
    for (const auto& r : t.rows()) {
        total += r.case_count;
        CHECK(r.outcome_count <= r.case_count);
        CHECK((r.status == RowStatus::Remainder) == (r.case_count == 0));
    }
    CHECK(total == 3);
}

TEST_CASE("threshold validation and tolerance") {
    const CaseMatrix d({"A"}, {1}, {1});
    CHECK_THROWS_AS(build_truth_table(d, {1.2, 1}), InputError);
    CHECK_THROWS_AS(build_truth_table(d, {-0.1, 1}), InputError);
    CHECK_THROWS_AS(build_truth_table(d, {0.5, 0}), InputError);

    // 6 of 7 against a rounded threshold entry.
    CHECK(classify(7, 6, {6.0 / 7.0, 1}) == RowStatus::Pass);
    CHECK(classify(7, 6, {0.857142857, 1}) == RowStatus::Pass);
    CHECK(classify(7, 6, {0.8572, 1}) == RowStatus::Fail);
    CHECK(classify(2, 2, {1.0, 3}) == RowStatus::Fail);
    CHECK(classify(0, 0, {0.0, 1}) == RowStatus::Remainder);
}

TEST_CASE("no row meets the configurational N threshold") {
    const CaseMatrix d({"A"}, {1, 0}, {1, 1});
    CHECK(passing_rows(build_truth_table(d, {0.5, 2})).empty());
    CHECK(passing_rows(build_truth_table(d, {0.0, 1})).size() == 2);
}

TEST_CASE("csv export") {
    const CaseMatrix d({"A", "B"}, {1, 0, 1, 0, 0, 1}, {1, 0, 0});
    const auto csv = build_truth_table(d, {0.85, 1}).to_csv();
    CHECK(csv ==
          "A,B,n,outcome_n,consistency,status\n"
          "0,0,0,0,NA,REMAINDER\n"
          "0,1,1,0,0.000000,FAIL\n"
          "1,0,2,1,0.500000,FAIL\n"
          "1,1,0,0,NA,REMAINDER\n");
}

TEST_CASE("properties over random data") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t v = 1 + rng() % 5, n = 1 + rng() % 60;
        std::vector<std::uint8_t> cells(n * v), y(n);
        for (auto& c : cells) c = rng() % 3 == 0;
        for (auto& c : y) c = rng() & 1;
        std::vector<std::string> names;
        for (std::size_t j = 0; j < v; ++j) names.push_back("c" + std::to_string(j));
        const CaseMatrix d(names, cells, y);

        const double c1 = (rng() % 101) / 100.0, c2 = std::min(1.0, c1 + (rng() % 30) / 100.0);
        const std::uint32_t n1 = 1 + rng() % 4, n2 = n1 + rng() % 3;
        const auto loose = build_truth_table(d, {c1, n1});
        const auto tight = build_truth_table(d, {c2, n2});
        std::size_t total = 0;
        for (std::uint32_t code = 0; code < loose.rows().size(); ++code) {
            total += loose.row(code).case_count;
            // Monotone filtering.
            if (tight.row(code).status == RowStatus::Pass) CHECK(loose.row(code).status == RowStatus::Pass);
        }
        CHECK(total == n);

        // Negation flips consistency of observed rows.
        const auto neg = build_truth_table(negate_outcome(d), {c1, n1});
        for (std::uint32_t code = 0; code < loose.rows().size(); ++code)
            if (loose.row(code).case_count > 0)
                CHECK(neg.row(code).consistency() == doctest::Approx(1.0 - loose.row(code).consistency()));

        // Reclassification matches a fresh build.
        const auto re = loose.reclassified({c2, n2});
        for (std::uint32_t code = 0; code < loose.rows().size(); ++code)
            CHECK(re.row(code).status == tight.row(code).status);
    }
}

TEST_CASE("noiseless data just above one half passes exactly the positive rows") {
    // Every configuration's cases agree on the outcome.
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t v = 1 + rng() % 4, n = 1 + rng() % 30;
        std::vector<std::uint8_t> truth(std::size_t{1} << v);
        for (auto& t : truth) t = rng() & 1;
        std::vector<std::uint8_t> cells(n * v), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t code = 0;
            for (std::size_t j = 0; j < v; ++j) {
                cells[i * v + j] = rng() & 1;
                code = (code << 1) | cells[i * v + j];
            }
            y[i] = truth[code];
        }
        std::vector<std::string> names;
        for (std::size_t j = 0; j < v; ++j) names.push_back("c" + std::to_string(j));
        const CaseMatrix d(names, cells, y);
        const auto t = build_truth_table(d, {0.5 + 1e-9, 1});
        for (const auto& r : t.rows())
            CHECK((r.status == RowStatus::Pass) == (r.case_count > 0 && truth[r.code] == 1));
    }
}
