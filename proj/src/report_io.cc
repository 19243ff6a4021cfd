#include "stratshap/report_io.h"

#include <cmath>
#include <ostream>

#include "stratshap/csv.h"

namespace stratshap {
namespace {

std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

}  // namespace

void write_reports_csv(std::ostream& out, std::span<const ReportRow> rows,
                       const std::vector<std::string>& feature_names, const std::string& provenance) {
  if (!provenance.empty()) out << "# config: " << provenance << '\n';
  out << "instance,method,prediction,phi0";
  for (const auto& name : feature_names) out << ",phi_" << name;
  out << ",se_phi0";
  for (const auto& name : feature_names) out << ",se_" << name;
  out << ",efficiency_residual\n";
  for (const ReportRow& row : rows) {
    const AttributionReport& r = row.report;
    if (r.phi.size() != feature_names.size()) throw InvalidArgument("report width does not match names");
    out << row.instance << ',' << method_label(r.method) << ',' << format_double(r.prediction) << ','
        << format_double(r.phi0);
    for (double p : r.phi) out << ',' << format_double(p);
    out << ',' << (r.phi0_std_error ? cell(*r.phi0_std_error) : std::string());
    for (std::size_t j = 0; j < r.phi.size(); ++j) {
      out << ',' << (r.std_error ? cell((*r.std_error)[j]) : std::string());
    }
    out << ',' << format_double(r.efficiency_residual) << '\n';
  }
}

std::vector<ReportRow> read_reports_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv_table(path);
  const auto& h = table.header;
  const std::string where = path.string();
  if (h.size() < 6 || h[0] != "instance" || h[1] != "method" || h[2] != "prediction" ||
      h[3] != "phi0" || h.back() != "efficiency_residual") {
    throw InvalidInput(where + ": not an attribution report file");
  }
  const std::size_t m = (h.size() - 6) / 2;
  if (h.size() != 2 * m + 6 || h[4 + m] != "se_phi0") throw InvalidInput(where + ": malformed report header");
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) {
    if (h[4 + j].rfind("phi_", 0) != 0) throw InvalidInput(where + ": malformed report header");
    names.push_back(h[4 + j].substr(4));
  }
  std::vector<ReportRow> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& c = table.rows[i];
    const std::string ctx = where + " row " + std::to_string(i + 1);
    ReportRow row;
    row.instance = static_cast<std::size_t>(parse_double(c[0], ctx));
    AttributionReport& r = row.report;
    r.method = parse_method_label(c[1]);
    r.prediction = parse_double(c[2], ctx);
    r.phi0 = parse_double(c[3], ctx);
    for (std::size_t j = 0; j < m; ++j) r.phi.push_back(parse_double(c[4 + j], ctx));
    if (!c[4 + m].empty()) r.phi0_std_error = parse_double(c[4 + m], ctx);
    bool any_se = false;
    std::vector<double> se(m, std::nan(""));
    for (std::size_t j = 0; j < m; ++j) {
      if (c[5 + m + j].empty()) continue;
      se[j] = parse_double(c[5 + m + j], ctx);
      any_se = true;
    }
    if (any_se) r.std_error = std::move(se);
    r.efficiency_residual = parse_double(c.back(), ctx);
    r.feature_names = names;
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json report_to_json(const ReportRow& row, const std::vector<std::string>& feature_names,
                              bool trace) {
  const AttributionReport& r = row.report;
  nlohmann::json doc;
  doc["instance"] = row.instance;
  doc["method"] = std::string(method_label(r.method));
  doc["prediction"] = r.prediction;
  doc["phi0"] = r.phi0;
  nlohmann::json phi = nlohmann::json::object();
  for (std::size_t j = 0; j < r.phi.size(); ++j) phi[feature_names[j]] = r.phi[j];
  doc["phi"] = std::move(phi);
  if (r.std_error) {
    nlohmann::json se = nlohmann::json::object();
    for (std::size_t j = 0; j < r.phi.size(); ++j) {
      se[feature_names[j]] = std::isnan((*r.std_error)[j]) ? nlohmann::json() : nlohmann::json((*r.std_error)[j]);
    }
    doc["std_error"] = std::move(se);
  }
  if (r.phi0_std_error) doc["phi0_std_error"] = *r.phi0_std_error;
  doc["efficiency_residual"] = r.efficiency_residual;
  if (!r.warnings.empty()) doc["warnings"] = r.warnings;
  if (trace && !r.coalition_values.empty()) {
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t mask = 0; mask < r.coalition_values.size(); ++mask) {
      // NaN marks coalitions the method never evaluates.
      if (std::isnan(r.coalition_values[mask])) continue;
      nlohmann::json members = nlohmann::json::array();
      for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if ((mask >> j) & 1u) members.push_back(feature_names[j]);
      }
      values.push_back({{"coalition", std::move(members)}, {"value", r.coalition_values[mask]}});
    }
    doc["trace"] = std::move(values);
  }
  return doc;
}

}  // namespace stratshap
