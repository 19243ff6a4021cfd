#include "stratshap/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace stratshap {
namespace {

bool skippable(const std::string& line) {
  return line.empty() || line == "\r" || line.front() == '#';
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(std::move(cell)));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(trim(std::move(cell)));
  return cells;
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw InvalidInput(context + ": '" + text + "' is not a number");
  }
  if (!std::isfinite(v)) throw InvalidInput(context + ": value is not finite");
  return v;
}

Dataset read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::vector<std::string> names;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    names = split_csv_line(line);
    break;
  }
  if (names.empty()) throw InvalidInput(source + ": missing header row");
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != names.size()) {
      throw InvalidInput(source + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(names.size()) + " cells, got " +
                         std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      values.push_back(
          parse_double(cells[j], source + ":" + std::to_string(line_no) + ", column " + names[j]));
    }
  }
  return Dataset(std::move(names), std::move(values));
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.num_features(); ++j) {
    out << (j ? "," : "") << data.names()[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    for (std::size_t j = 0; j < data.num_features(); ++j) {
      out << (j ? "," : "") << format_double(data.at(i, j));
    }
    out << '\n';
  }
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(out, data);
  if (!out) throw IoError("failed writing " + path.string());
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') {
      if (table.header.empty()) table.comments.push_back(line.substr(1));
      continue;
    }
    if (skippable(line)) continue;
    auto cells = split_csv_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) {
        throw InvalidInput(path.string() + ": row has " + std::to_string(cells.size()) +
                           " cells, header has " + std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw InvalidInput(path.string() + ": missing header row");
  return table;
}

}  // namespace stratshap
