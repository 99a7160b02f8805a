#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "baqca/dataset.hpp"

namespace baqca {

enum class RowStatus : std::uint8_t { Pass, Fail, Remainder };

std::string to_string(RowStatus status);

struct Thresholds {
    double consistency = 0.85;
    std::uint32_t conf_n = 1;

    void validate() const;
};

// Absolute slack on the integer comparison outcome_count >= threshold * case_count.
inline constexpr double kConsistencyTolerance = 1e-12;

// PASS iff case_count >= conf_n and outcome_count >= consistency * case_count.
// Observed rows that miss either threshold are FAIL; unobserved rows are REMAINDER.
RowStatus classify(std::uint32_t case_count, std::uint32_t outcome_count, const Thresholds& t);

struct TruthRow {
    std::uint32_t code = 0;  // condition 0 is the most significant bit
    std::uint32_t case_count = 0;
    std::uint32_t outcome_count = 0;
    RowStatus status = RowStatus::Remainder;

    // outcome_count / case_count, or 0 for remainders
    double consistency() const {
        return case_count == 0 ? 0.0 : static_cast<double>(outcome_count) / case_count;
    }
    bool bit(std::size_t condition, std::size_t v) const { return (code >> (v - 1 - condition)) & 1u; }
};

// Dense truth table: 2^v rows in ascending binary order, row index == code.
class TruthTable {
public:
    TruthTable(std::vector<std::string> condition_names, std::vector<std::uint32_t> case_counts,
               std::vector<std::uint32_t> outcome_counts, Thresholds thresholds);

    std::size_t num_conditions() const { return names_.size(); }
    std::size_t num_cases() const { return num_cases_; }
    const std::vector<std::string>& condition_names() const { return names_; }
    const Thresholds& thresholds() const { return thresholds_; }
    const std::vector<TruthRow>& rows() const { return rows_; }
    const TruthRow& row(std::uint32_t code) const { return rows_[code]; }

    // Same counts, new thresholds.
    TruthTable reclassified(const Thresholds& thresholds) const;

    std::string bits_string(std::uint32_t code) const;

    // Columns: condition names, n, outcome_n, consistency, status.
    std::string to_csv() const;

private:
    std::vector<std::string> names_;
    std::vector<TruthRow> rows_;
    Thresholds thresholds_;
    std::size_t num_cases_ = 0;
};

TruthTable build_truth_table(const CaseMatrix& data, const Thresholds& thresholds);

std::vector<TruthRow> passing_rows(const TruthTable& table);

}  // namespace baqca
