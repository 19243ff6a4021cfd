#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stratshap/core.h"

namespace stratshap {

struct ReportRow {
  std::size_t instance = 0;
  AttributionReport report;
};

// Wide CSV, one row per instance:
//   instance,method,prediction,phi0,phi_<f>...,se_phi0,se_<f>...,efficiency_residual
// Missing standard errors are empty cells. A non-empty `provenance` is written
// first as a "# config: ..." comment line.
void write_reports_csv(std::ostream& out, std::span<const ReportRow> rows,
                       const std::vector<std::string>& feature_names,
                       const std::string& provenance = {});
std::vector<ReportRow> read_reports_csv(const std::filesystem::path& path);

// With `trace`, v(S) values (when kept) are listed by coalition members.
nlohmann::json report_to_json(const ReportRow& row, const std::vector<std::string>& feature_names,
                              bool trace);

}  // namespace stratshap
