#pragma once

// Minimal RFC 4180-style reader shared by the loaders.  Handles quoted
// fields, doubled quotes, CRLF line endings and a leading UTF-8 BOM.

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace baqca::csv {

using Row = std::vector<std::string>;

// Returns the next record, or nullopt at end of input.  Blank lines are skipped.
std::optional<Row> read_row(std::istream& in);

std::vector<Row> read_all(std::istream& in);

// Quotes a field only when it contains a delimiter, quote or newline.
std::string escape(std::string_view field);

std::optional<double> parse_number(std::string_view text);

bool is_missing(std::string_view text);

}  // namespace baqca::csv
