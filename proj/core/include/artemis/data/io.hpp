#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "artemis/data/vitals.hpp"

namespace artemis::data {

struct RowDiagnostic {
  std::size_t row = 0;  // 1-based data row number (header excluded)
  std::string column;
  std::string message;
};

struct LoadResult {
  std::vector<TriageRecord> records;
  std::vector<RowDiagnostic> diagnostics;
};

// Reads a delimiter-separated triage table. Header names are matched
// case-insensitively; unknown columns are ignored. Blank fields load as
// missing. A row with a non-numeric vital or an invalid acuity is excluded and
// reported. Throws DataError when the file is absent or lacks an acuity column.
LoadResult load_records(const std::filesystem::path& path, char delimiter = ',');
LoadResult parse_records(std::istream& in, char delimiter = ',');

void write_records(const std::filesystem::path& path, std::span<const TriageRecord> records,
                   char delimiter = ',');
void write_records(std::ostream& out, std::span<const TriageRecord> records, char delimiter = ',');

// Splits one logical row honouring double-quote escaping.
std::vector<std::string> split_row(std::string_view line, char delimiter);

}  // namespace artemis::data
