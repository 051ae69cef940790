#include "artemis/data/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "artemis/error.hpp"

namespace artemis::data {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::ranges::transform(out, out.begin(),
                         [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Reads one logical row; quoted fields may span physical lines.
bool read_logical_row(std::istream& in, std::string& row) {
  row.clear();
  std::string line;
  bool in_quotes = false;
  bool got_any = false;
  while (std::getline(in, line)) {
    got_any = true;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!row.empty()) row += '\n';
    row += line;
    for (char c : line) {
      if (c == '"') in_quotes = !in_quotes;
    }
    if (!in_quotes) return true;
  }
  return got_any;
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string quote_if_needed(const std::string& field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

constexpr std::string_view kPain = "pain";
constexpr std::string_view kAcuity = "acuity";
constexpr std::string_view kComplaint = "chiefcomplaint";

}  // namespace

std::vector<std::string> split_row(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

LoadResult parse_records(std::istream& in, char delimiter) {
  std::string row;
  if (!read_logical_row(in, row)) throw DataError("empty input: no header row");

  const auto header = split_row(row, delimiter);
  std::array<std::optional<std::size_t>, kNumVitals> vital_col;
  std::optional<std::size_t> pain_col;
  std::optional<std::size_t> acuity_col;
  std::optional<std::size_t> complaint_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower(trim(header[i]));
    if (auto f = feature_from_name(name)) {
      vital_col[static_cast<std::size_t>(*f)] = i;
    } else if (name == kPain) {
      pain_col = i;
    } else if (name == kAcuity) {
      acuity_col = i;
    } else if (name == kComplaint) {
      complaint_col = i;
    }
  }
  if (!acuity_col) throw DataError("missing mandatory column 'acuity'");

  LoadResult result;
  std::size_t row_number = 0;
  while (read_logical_row(in, row)) {
    ++row_number;
    if (trim(row).empty()) continue;
    const auto fields = split_row(row, delimiter);
    auto field = [&](std::optional<std::size_t> col) -> std::string_view {
      if (!col || *col >= fields.size()) return {};
      return trim(fields[*col]);
    };

    TriageRecord record;
    bool ok = true;
    auto reject = [&](std::string column, std::string message) {
      result.diagnostics.push_back({row_number, std::move(column), std::move(message)});
      ok = false;
    };

    for (Feature f : kAllFeatures) {
      const auto text = field(vital_col[static_cast<std::size_t>(f)]);
      if (text.empty()) continue;
      if (auto v = parse_number(text)) {
        record.vitals[f] = *v;
      } else {
        reject(std::string(feature_name(f)), "non-numeric value '" + std::string(text) + "'");
      }
    }

    // Free-text pain entries ("unable", "uta") are common; they load as absent.
    if (auto v = parse_number(field(pain_col)); v && *v == std::floor(*v)) {
      record.vitals.pain = static_cast<int>(*v);
    }

    if (const auto text = field(acuity_col); !text.empty()) {
      const auto v = parse_number(text);
      if (!v || *v != std::floor(*v) || *v < 1 || *v > 5) {
        reject(std::string(kAcuity), "invalid acuity '" + std::string(text) + "'");
      } else {
        record.acuity = static_cast<Acuity>(static_cast<int>(*v));
      }
    }

    if (const auto text = field(complaint_col); !text.empty()) {
      record.chief_complaint = std::string(text);
    }
    if (ok) result.records.push_back(std::move(record));
  }
  return result;
}

LoadResult load_records(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file '" + path.string() + "'");
  return parse_records(in, delimiter);
}

void write_records(std::ostream& out, std::span<const TriageRecord> records, char delimiter) {
  for (Feature f : kAllFeatures) out << feature_name(f) << delimiter;
  out << kPain << delimiter << kAcuity << delimiter << kComplaint << '\n';
  for (const auto& r : records) {
    for (Feature f : kAllFeatures) {
      const double v = r.vitals[f];
      if (!is_missing(v)) out << format_number(v);
      out << delimiter;
    }
    if (r.vitals.pain) out << *r.vitals.pain;
    out << delimiter;
    if (r.acuity) out << level(*r.acuity);
    out << delimiter;
    if (r.chief_complaint) out << quote_if_needed(*r.chief_complaint, delimiter);
    out << '\n';
  }
}

void write_records(const std::filesystem::path& path, std::span<const TriageRecord> records,
                   char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_records(out, records, delimiter);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace artemis::data
