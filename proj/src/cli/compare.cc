#include <ostream>
#include <sstream>

#include "commands.h"
#include "stratshap/csv.h"
#include "stratshap/engine.h"
#include "stratshap/report_io.h"

namespace stratshap::cli {

int cmd_compare(const CompareConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const std::vector<ReportRow> a = read_reports_csv(config.a);
    const std::vector<ReportRow> b = read_reports_csv(config.b);
    // Pair by instance id; both files must cover the same instances.
    if (a.size() != b.size()) {
      throw InvalidArgument("report files cover different instance sets (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + " rows)");
    }
    std::vector<AttributionReport> ra, rb;
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].instance != b[i].instance) {
        throw InvalidArgument("report files cover different instance sets (row " + std::to_string(i) +
                              ": instance " + std::to_string(a[i].instance) + " vs " +
                              std::to_string(b[i].instance) + ")");
      }
      ids.push_back(a[i].instance);
      ra.push_back(a[i].report);
      rb.push_back(b[i].report);
    }
    const Comparison cmp = compare_reports(ra, rb);
    const std::vector<std::string>& names = ra.front().feature_names;

    std::ostringstream paired;
    paired << "instance,feature,phi_a,phi_b,difference\n";
    for (const ComparisonRow& row : cmp.rows) {
      paired << ids[row.instance] << ',' << names[row.feature] << ',' << format_double(row.phi_a) << ','
             << format_double(row.phi_b) << ',' << format_double(row.difference) << '\n';
    }
    write_output(config.out, paired.str(), out);

    std::ostringstream summary;
    summary << "feature,count,slope,intercept\n";
    for (const FeatureFit& fit : cmp.fits) {
      summary << fit.feature << ',' << fit.count << ',' << format_double(fit.slope) << ','
              << format_double(fit.intercept) << '\n';
    }
    if (!config.summary.empty()) write_output(config.summary, summary.str(), out);
    out << summary.str();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  return kOk;
}

}  // namespace stratshap::cli
