#include "csv.hpp"

#include <charconv>
#include <cmath>

namespace baqca::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<Row> read_row(std::istream& in) {
    Row row;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    bool first_char = in.tellg() == std::streampos(0);

    for (;;) {
        int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            if (!any && field.empty() && row.empty()) return std::nullopt;
            row.push_back(std::move(field));
            return row;
        }
        if (first_char) {
            first_char = false;
            // UTF-8 byte order mark
            if (c == 0xEF && in.peek() == 0xBB) {
                in.get();
                if (in.peek() == 0xBF) in.get();
                continue;
            }
        }
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (ch == '\r') {
            // swallowed; the following '\n' ends the record
        } else if (ch == '\n') {
            if (row.empty() && field.empty()) {
                any = false;
                continue;
            }
            row.push_back(std::move(field));
            return row;
        } else {
            field.push_back(ch);
        }
    }
}

std::vector<Row> read_all(std::istream& in) {
    std::vector<Row> rows;
    while (auto row = read_row(in)) rows.push_back(std::move(*row));
    return rows;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

bool is_missing(std::string_view text) {
    text = trim(text);
    return text.empty() || text == "NA" || text == "NaN" || text == "nan" || text == ".";
}

}  // namespace baqca::csv
