#include "baqca/truth_table.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "baqca/error.hpp"
#include "csv.hpp"

namespace baqca {

std::string to_string(RowStatus status) {
    switch (status) {
        case RowStatus::Pass: return "PASS";
        case RowStatus::Fail: return "FAIL";
        case RowStatus::Remainder: return "REMAINDER";
    }
    return "?";
}

void Thresholds::validate() const {
    if (!(consistency >= 0.0 && consistency <= 1.0))
        throw InputError(fmt::format("consistency threshold {} outside [0, 1]", consistency));
    if (conf_n < 1) throw InputError("configurational N threshold must be >= 1");
}

RowStatus classify(std::uint32_t case_count, std::uint32_t outcome_count, const Thresholds& t) {
    if (case_count == 0) return RowStatus::Remainder;
    if (case_count < t.conf_n) return RowStatus::Fail;
    const double needed = t.consistency * static_cast<double>(case_count);
    return static_cast<double>(outcome_count) + kConsistencyTolerance >= needed ? RowStatus::Pass
                                                                                : RowStatus::Fail;
}

TruthTable::TruthTable(std::vector<std::string> condition_names, std::vector<std::uint32_t> case_counts,
                       std::vector<std::uint32_t> outcome_counts, Thresholds thresholds)
    : names_(std::move(condition_names)), thresholds_(thresholds) {
    thresholds_.validate();
    const std::size_t v = names_.size();
    if (v == 0 || v > 26) throw InputError("truth tables support 1 to 26 conditions");
    const std::size_t size = std::size_t{1} << v;
    if (case_counts.size() != size || outcome_counts.size() != size)
        throw LogicError("truth table count vectors must have 2^v entries");
    rows_.resize(size);
    for (std::size_t r = 0; r < size; ++r) {
        if (outcome_counts[r] > case_counts[r]) throw LogicError("outcome count exceeds case count");
        rows_[r] = TruthRow{static_cast<std::uint32_t>(r), case_counts[r], outcome_counts[r],
                            classify(case_counts[r], outcome_counts[r], thresholds_)};
        num_cases_ += case_counts[r];
    }
}

TruthTable TruthTable::reclassified(const Thresholds& thresholds) const {
    thresholds.validate();
    TruthTable copy = *this;
    copy.thresholds_ = thresholds;
    for (auto& row : copy.rows_) row.status = classify(row.case_count, row.outcome_count, thresholds);
    return copy;
}

std::string TruthTable::bits_string(std::uint32_t code) const {
    const std::size_t v = names_.size();
    std::string out(v, '0');
    for (std::size_t j = 0; j < v; ++j)
        if ((code >> (v - 1 - j)) & 1u) out[j] = '1';
    return out;
}

std::string TruthTable::to_csv() const {
    std::ostringstream out;
    for (const auto& name : names_) out << csv::escape(name) << ',';
    out << "n,outcome_n,consistency,status\n";
    const std::size_t v = names_.size();
    for (const auto& row : rows_) {
        for (std::size_t j = 0; j < v; ++j) out << (row.bit(j, v) ? '1' : '0') << ',';
        out << row.case_count << ',' << row.outcome_count << ',';
        if (row.case_count > 0)
            out << fmt::format("{:.6f}", row.consistency());
        else
            out << "NA";
        out << ',' << to_string(row.status) << '\n';
    }
    return out.str();
}

TruthTable build_truth_table(const CaseMatrix& data, const Thresholds& thresholds) {
    thresholds.validate();
    const std::size_t v = data.num_conditions();
    if (v > 26) throw InputError("truth tables support at most 26 conditions");
    const std::size_t size = std::size_t{1} << v;
    std::vector<std::uint32_t> cases(size, 0), outcomes(size, 0);
    for (std::size_t i = 0; i < data.num_cases(); ++i) {
        const std::uint32_t code = data.configuration(i);
        ++cases[code];
        outcomes[code] += data.outcome(i);
    }
    return TruthTable(data.condition_names(), std::move(cases), std::move(outcomes), thresholds);
}

std::vector<TruthRow> passing_rows(const TruthTable& table) {
    std::vector<TruthRow> out;
    for (const auto& row : table.rows())
        if (row.status == RowStatus::Pass) out.push_back(row);
    return out;
}

}  // namespace baqca
