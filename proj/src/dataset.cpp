#include "baqca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "baqca/error.hpp"
#include "csv.hpp"

namespace baqca {

CaseMatrix::CaseMatrix(std::vector<std::string> condition_names, std::vector<std::uint8_t> conditions,
                       std::vector<std::uint8_t> outcome, std::vector<std::string> case_ids,
                       std::string outcome_name)
    : names_(std::move(condition_names)),
      conditions_(std::move(conditions)),
      outcome_(std::move(outcome)),
      ids_(std::move(case_ids)),
      outcome_name_(std::move(outcome_name)) {
    if (outcome_.empty()) throw InputError("case matrix needs at least one case");
    if (names_.empty()) throw InputError("case matrix needs at least one condition");
    if (names_.size() > 26) throw InputError("at most 26 conditions are supported");
    if (conditions_.size() != outcome_.size() * names_.size())
        throw InputError(fmt::format("condition cells ({}) do not match {} cases x {} conditions",
                                     conditions_.size(), outcome_.size(), names_.size()));
    std::set<std::string> seen;
    for (const auto& name : names_) {
        if (name == outcome_name_)
            throw InputError(fmt::format("condition '{}' duplicates the outcome label", name));
        if (!seen.insert(name).second)
            throw InputError(fmt::format("duplicate condition name '{}'", name));
    }
    for (std::size_t k = 0; k < conditions_.size(); ++k)
        if (conditions_[k] > 1)
            throw InputError(fmt::format("non-binary condition value at case {}, condition '{}'",
                                         k / names_.size() + 1, names_[k % names_.size()]));
    for (std::size_t i = 0; i < outcome_.size(); ++i)
        if (outcome_[i] > 1) throw InputError(fmt::format("non-binary outcome at case {}", i + 1));
    if (ids_.empty()) {
        ids_.reserve(outcome_.size());
        for (std::size_t i = 0; i < outcome_.size(); ++i) ids_.push_back(std::to_string(i + 1));
    } else if (ids_.size() != outcome_.size()) {
        throw InputError("case id count does not match case count");
    }
}

std::uint32_t CaseMatrix::configuration(std::size_t case_index) const {
    const std::size_t v = names_.size();
    const std::uint8_t* row = conditions_.data() + case_index * v;
    std::uint32_t code = 0;
    for (std::size_t j = 0; j < v; ++j) code = (code << 1) | row[j];
    return code;
}

void MarginalProfile::validate() const {
    if (n == 0) throw InputError("profile needs n >= 1");
    if (condition_probs.empty()) throw InputError("profile needs at least one condition");
    if (condition_probs.size() > 26) throw InputError("at most 26 conditions are supported");
    auto bad = [](double p) { return !(p >= 0.0 && p <= 1.0); };
    if (bad(outcome_prob) || std::any_of(condition_probs.begin(), condition_probs.end(), bad))
        throw InputError("profile probabilities must lie in [0, 1]");
}

std::vector<std::uint8_t> dichotomize_at_mean(std::span<const double> values) {
    if (values.empty()) throw InputError("cannot dichotomize an empty vector");
    // Summing in long double keeps a*x+b rescalings from moving values across the mean.
    long double sum = 0;
    for (double x : values) {
        if (!std::isfinite(x)) throw InputError("cannot dichotomize non-finite values");
        sum += x;
    }
    const long double mean = sum / static_cast<long double>(values.size());
    std::vector<std::uint8_t> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = static_cast<long double>(values[i]) >= mean ? 1 : 0;
    return out;
}

std::vector<std::uint8_t> code_presence(std::span<const double> values, double threshold) {
    if (!std::isfinite(threshold)) throw InputError("presence threshold must be finite");
    std::vector<std::uint8_t> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] >= threshold ? 1 : 0;
    return out;
}

MarginalProfile marginal_profile(const CaseMatrix& data) {
    const std::size_t n = data.num_cases();
    const std::size_t v = data.num_conditions();
    MarginalProfile profile;
    profile.n = n;
    std::vector<std::size_t> sums(v, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < v; ++j) sums[j] += data.condition(i, j);
    profile.condition_probs.resize(v);
    for (std::size_t j = 0; j < v; ++j)
        profile.condition_probs[j] = static_cast<double>(sums[j]) / static_cast<double>(n);
    auto y = data.outcome_values();
    profile.outcome_prob =
        static_cast<double>(std::accumulate(y.begin(), y.end(), std::size_t{0})) / static_cast<double>(n);
    return profile;
}

CaseMatrix negate_outcome(const CaseMatrix& data) {
    std::vector<std::uint8_t> flipped(data.outcome_values().begin(), data.outcome_values().end());
    for (auto& y : flipped) y ^= 1;
    return CaseMatrix(data.condition_names(),
                      {data.condition_cells().begin(), data.condition_cells().end()},
                      std::move(flipped), data.case_ids(), data.outcome_name());
}

namespace {

bool is_binary(const std::vector<double>& column) {
    return std::all_of(column.begin(), column.end(), [](double x) { return x == 0.0 || x == 1.0; });
}

std::vector<std::uint8_t> as_binary(const std::vector<double>& column) {
    std::vector<std::uint8_t> out(column.size());
    std::transform(column.begin(), column.end(), out.begin(),
                   [](double x) { return static_cast<std::uint8_t>(x); });
    return out;
}

}  // namespace

CaseMatrix load_csv(const std::filesystem::path& path, const std::string& outcome_label,
                    const std::optional<std::string>& id_label, const CodingRules& rules) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot open data file '{}'", path.string()));
    auto rows = csv::read_all(in);
    if (rows.empty()) throw InputError(fmt::format("'{}' has no header row", path.string()));

    const csv::Row header = rows.front();
    auto find_column = [&](const std::string& label) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), label);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };

    const auto outcome_col = find_column(outcome_label);
    if (!outcome_col) throw InputError(fmt::format("outcome column '{}' not found", outcome_label));
    std::optional<std::size_t> id_col;
    if (id_label) {
        id_col = find_column(*id_label);
        if (!id_col) throw InputError(fmt::format("id column '{}' not found", *id_label));
    }
    for (const auto& name : rules.dichotomize_at_mean)
        if (!find_column(name)) throw InputError(fmt::format("coding rule names unknown column '{}'", name));
    for (const auto& [name, threshold] : rules.presence)
        if (!find_column(name)) throw InputError(fmt::format("coding rule names unknown column '{}'", name));

    const std::size_t n = rows.size() - 1;
    if (n == 0) throw InputError(fmt::format("'{}' has no data rows", path.string()));

    std::vector<std::vector<double>> numeric(header.size());
    std::vector<std::string> ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw InputError(fmt::format("row {} has {} fields, header has {}", r + 1, row.size(),
                                         header.size()));
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (id_col && c == *id_col) {
                ids.push_back(row[c]);
                continue;
            }
            if (csv::is_missing(row[c]))
                throw InputError(fmt::format("missing value at row {}, column '{}'", r + 1, header[c]));
            auto value = csv::parse_number(row[c]);
            if (!value)
                throw InputError(fmt::format("non-numeric value '{}' at row {}, column '{}'", row[c],
                                             r + 1, header[c]));
            numeric[c].push_back(*value);
        }
    }

    auto code_column = [&](std::size_t c) -> std::vector<std::uint8_t> {
        const std::string& name = header[c];
        for (const auto& [rule_name, threshold] : rules.presence)
            if (rule_name == name) return code_presence(numeric[c], threshold);
        if (std::find(rules.dichotomize_at_mean.begin(), rules.dichotomize_at_mean.end(), name) !=
            rules.dichotomize_at_mean.end())
            return dichotomize_at_mean(numeric[c]);
        if (!is_binary(numeric[c])) {
            if (c == *outcome_col) throw InputError(fmt::format("non-binary outcome column '{}'", name));
            throw InputError(fmt::format("non-binary column '{}' (supply a coding rule)", name));
        }
        return as_binary(numeric[c]);
    };

    std::vector<std::string> names;
    std::vector<std::vector<std::uint8_t>> coded;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == *outcome_col || (id_col && c == *id_col)) continue;
        names.push_back(header[c]);
        coded.push_back(code_column(c));
    }
    std::vector<std::uint8_t> outcome = code_column(*outcome_col);

    std::vector<std::uint8_t> cells(n * names.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < names.size(); ++j) cells[i * names.size() + j] = coded[j][i];
    return CaseMatrix(std::move(names), std::move(cells), std::move(outcome), std::move(ids),
                      outcome_label);
}

std::string to_csv(const CaseMatrix& data, bool include_ids) {
    std::ostringstream out;
    if (include_ids) out << "id,";
    for (const auto& name : data.condition_names()) out << csv::escape(name) << ',';
    out << csv::escape(data.outcome_name()) << '\n';
    for (std::size_t i = 0; i < data.num_cases(); ++i) {
        if (include_ids) out << csv::escape(data.case_ids()[i]) << ',';
        for (std::size_t j = 0; j < data.num_conditions(); ++j) out << int(data.condition(i, j)) << ',';
        out << int(data.outcome(i)) << '\n';
    }
    return out.str();
}

void write_csv(const CaseMatrix& data, const std::filesystem::path& path, bool include_ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out << to_csv(data, include_ids);
}

}  // namespace baqca
