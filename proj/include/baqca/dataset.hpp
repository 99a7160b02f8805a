#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace baqca {

// Binary case-by-condition data plus a binary outcome.
//
// Conditions are stored row-major: cell (case i, condition j) lives at
// conditions[i * num_conditions() + j].  Every cell is exactly 0 or 1.
class CaseMatrix {
public:
    CaseMatrix() = default;

    // Validates all invariants; throws InputError on violation.  An empty
    // case_ids vector is replaced by 1-based row numbers.
    CaseMatrix(std::vector<std::string> condition_names, std::vector<std::uint8_t> conditions,
               std::vector<std::uint8_t> outcome, std::vector<std::string> case_ids = {},
               std::string outcome_name = "OUTCOME");

    std::size_t num_cases() const { return outcome_.size(); }
    std::size_t num_conditions() const { return names_.size(); }

    std::uint8_t condition(std::size_t case_index, std::size_t cond) const {
        return conditions_[case_index * names_.size() + cond];
    }
    std::uint8_t outcome(std::size_t case_index) const { return outcome_[case_index]; }

    // Configuration code of a case: condition 0 is the most significant bit,
    // so ascending codes enumerate configurations in ascending binary order.
    std::uint32_t configuration(std::size_t case_index) const;

    const std::vector<std::string>& condition_names() const { return names_; }
    const std::string& outcome_name() const { return outcome_name_; }
    const std::vector<std::string>& case_ids() const { return ids_; }
    std::span<const std::uint8_t> condition_cells() const { return conditions_; }
    std::span<const std::uint8_t> outcome_values() const { return outcome_; }

    bool operator==(const CaseMatrix&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<std::uint8_t> conditions_;
    std::vector<std::uint8_t> outcome_;
    std::vector<std::string> ids_;
    std::string outcome_name_ = "OUTCOME";
};

// Per-column Bernoulli proportions plus the case count.
struct MarginalProfile {
    std::vector<double> condition_probs;
    double outcome_prob = 0.0;
    std::size_t n = 0;

    std::size_t num_conditions() const { return condition_probs.size(); }
    void validate() const;
};

// How to turn raw numeric columns into set memberships when loading.
struct CodingRules {
    std::vector<std::string> dichotomize_at_mean;
    // column -> threshold; value >= threshold codes as 1
    std::vector<std::pair<std::string, double>> presence;
};

CaseMatrix load_csv(const std::filesystem::path& path, const std::string& outcome_label,
                    const std::optional<std::string>& id_label = std::nullopt,
                    const CodingRules& rules = {});

// Writes the same layout load_csv reads: optional id column, conditions, outcome.
void write_csv(const CaseMatrix& data, const std::filesystem::path& path, bool include_ids = true);
std::string to_csv(const CaseMatrix& data, bool include_ids = true);

// 1 iff value >= mean(values).  Ties at the mean code as 1.
std::vector<std::uint8_t> dichotomize_at_mean(std::span<const double> values);

// 1 iff value >= threshold.
std::vector<std::uint8_t> code_presence(std::span<const double> values, double threshold);

MarginalProfile marginal_profile(const CaseMatrix& data);

CaseMatrix negate_outcome(const CaseMatrix& data);

}  // namespace baqca
