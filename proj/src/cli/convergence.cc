#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "commands.h"
#include "stratshap/csv.h"
#include "stratshap/engine.h"
#include "stratshap/parallel.h"
#include "summation.h"

namespace stratshap::cli {

int cmd_convergence(const ConvergenceConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.schedule.empty() || config.seeds.empty()) {
      throw ConfigError("--schedule and --seeds must be non-empty");
    }
    for (int p : config.schedule) {
      if (p < 1) throw ConfigError("--schedule entries must be at least 1");
    }
    if (config.threads < 1) throw ConfigError("--threads must be at least 1");

    auto model = std::make_shared<const Model>(load_model(config.model));
    const Dataset data = select_model_columns(read_csv(config.data), *model, "--data");
    const Dataset instances = config.instances.empty()
                                  ? data
                                  : select_model_columns(read_csv(config.instances), *model, "--instances");
    if (config.instance >= instances.num_rows()) {
      throw ConfigError("--instance " + std::to_string(config.instance) + " is out of range");
    }
    auto background =
        std::make_shared<const Dataset>(subsample_rows(data, config.subsample, config.background_seed));
    const MarginalProvider v(model, instances.feature_vector(config.instance), background);
    ExactOptions exact_opts;
    exact_opts.threads = config.threads;
    const AttributionReport exact = exact_shapley(v, exact_opts);

    std::ostringstream text;
    text << "permutations,runs,mean_max_abs_error,rms_error,mean_std_error\n";
    for (int p : config.schedule) {
      const std::size_t runs = config.seeds.size();
      std::vector<AttributionReport> reports(runs);
      parallel_for(runs, config.threads, [&](std::size_t r) {
        PermutationOptions o;
        o.permutations = p;
        o.seed = config.seeds[r];
        o.antithetic = !config.no_antithetic;
        reports[r] = permutation_shapley(v, o);
      });
      internal::CompensatedSum max_err, sq_err, se;
      std::size_t se_count = 0;
      for (const AttributionReport& r : reports) {
        double worst = 0.0;
        for (std::size_t j = 0; j < exact.phi.size(); ++j) {
          const double e = r.phi[j] - exact.phi[j];
          worst = std::max(worst, std::abs(e));
          sq_err.add(e * e);
          if (r.std_error) {
            se.add((*r.std_error)[j]);
            ++se_count;
          }
        }
        max_err.add(worst);
      }
      const double cells = static_cast<double>(runs * exact.phi.size());
      text << p << ',' << runs << ',' << format_double(max_err.total() / static_cast<double>(runs)) << ','
           << format_double(std::sqrt(sq_err.total() / cells)) << ','
           << (se_count > 0 ? format_double(se.total() / static_cast<double>(se_count)) : std::string())
           << '\n';
    }
    write_output(config.out, text.str(), out);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  return kOk;
}

}  // namespace stratshap::cli
