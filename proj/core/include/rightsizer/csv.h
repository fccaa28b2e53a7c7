#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rightsizer {

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

// Splits one CSV line on commas. Fields never contain commas or quotes in any
// file this project reads or writes.
std::vector<std::string> SplitCsvLine(std::string_view line);

std::string_view Trim(std::string_view s);

// Strict numeric parsers; throw InputError naming `what` on failure.
double ParseDouble(std::string_view text, std::string_view what);
int64_t ParseInt(std::string_view text, std::string_view what);
bool ParseBool(std::string_view text, std::string_view what);

}  // namespace rightsizer
