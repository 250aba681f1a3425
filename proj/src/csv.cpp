#include "ecodispatch/csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "ecodispatch/errors.hpp"

namespace ecodispatch::csv {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

std::string format_double(double x) {
  if (x == 0.0) return "0";  // folds -0
  return fmt::format("{}", x);
}

std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw RowError("unparsable " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw RowError("unparsable " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::optional<double> parse_optional_double(std::string_view s, std::string_view what) {
  if (trim(s).empty()) return std::nullopt;
  return parse_double(s, what);
}

std::optional<std::int64_t> parse_optional_int(std::string_view s, std::string_view what) {
  if (trim(s).empty()) return std::nullopt;
  return parse_int(s, what);
}

Reader::Reader(std::istream& in) : in_(in) {
  std::string line;
  if (read_record(line)) {
    header_ = split_line(line);
    if (!header_.empty() && header_[0].rfind("\xEF\xBB\xBF", 0) == 0) header_[0].erase(0, 3);
    for (std::size_t i = 0; i < header_.size(); ++i) {
      header_[i] = trim(header_[i]);
      index_.emplace(header_[i], i);
    }
  }
}

std::optional<std::size_t> Reader::column(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Reader::read_record(std::string& out) {
  while (std::getline(in_, out)) {
    ++line_;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    if (trim(out).empty() || out.front() == '#') continue;
    return true;
  }
  return false;
}

bool Reader::next(std::vector<std::string>& row) {
  std::string line;
  if (!read_record(line)) return false;
  row = split_line(line);
  return true;
}

}  // namespace ecodispatch::csv
