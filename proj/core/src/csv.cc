#include "rightsizer/csv.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include "rightsizer/error.h"

namespace rightsizer {

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view Trim(std::string_view s) {
  const char* ws = " \t\r\n";
  size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double ParseDouble(std::string_view text, std::string_view what) {
  text = Trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InputError("invalid number for " + std::string(what) + ": '" +
                     std::string(text) + "'");
  }
  return value;
}

int64_t ParseInt(std::string_view text, std::string_view what) {
  text = Trim(text);
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InputError("invalid integer for " + std::string(what) + ": '" +
                     std::string(text) + "'");
  }
  return value;
}

bool ParseBool(std::string_view text, std::string_view what) {
  text = Trim(text);
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw InputError("invalid boolean for " + std::string(what) + ": '" +
                   std::string(text) + "'");
}

}  // namespace rightsizer
