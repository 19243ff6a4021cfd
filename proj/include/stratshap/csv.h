#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stratshap/core.h"

namespace stratshap {

// Numeric CSV with a header row. Blank lines and lines starting with '#' are
// skipped. Every cell must parse as a finite number.
Dataset read_csv(std::istream& in, const std::string& source = "<stream>");
Dataset read_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Raw string table, for report files with text columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Lines starting with '#' seen before the header, without the '#'.
  std::vector<std::string> comments;
};
CsvTable read_csv_table(const std::filesystem::path& path);
std::vector<std::string> split_csv_line(const std::string& line);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& context);

}  // namespace stratshap
