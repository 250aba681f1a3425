#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecodispatch::csv {

std::vector<std::string> split_line(std::string_view line);
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

// Shortest representation that parses back to the same double.
std::string format_double(double x);

double parse_double(std::string_view s, std::string_view what);
std::int64_t parse_int(std::string_view s, std::string_view what);
std::optional<double> parse_optional_double(std::string_view s, std::string_view what);
std::optional<std::int64_t> parse_optional_int(std::string_view s, std::string_view what);

std::string trim(std::string_view s);
std::string lower(std::string_view s);

// Header-aware reader. Blank lines and lines starting with '#' are skipped.
class Reader {
 public:
  explicit Reader(std::istream& in);

  const std::vector<std::string>& header() const { return header_; }
  bool has_header() const { return !header_.empty(); }
  std::optional<std::size_t> column(std::string_view name) const;

  // Next data row; false at end of input. line_number() is 1-based.
  bool next(std::vector<std::string>& row);
  std::size_t line_number() const { return line_; }

 private:
  bool read_record(std::string& out);

  std::istream& in_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t line_ = 0;
};

}  // namespace ecodispatch::csv
