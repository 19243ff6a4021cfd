#include <ostream>
#include <sstream>

#include "commands.h"
#include "stratshap/csv.h"
#include "stratshap/oracle.h"
#include "stratshap/synth.h"

namespace stratshap::cli {

int cmd_simulate(const SimulateConfig& config, std::ostream& out, std::ostream& err) {
  try {
    Dataset data;
    std::optional<Model> model;
    if (config.scenario == "spline") {
      if (config.beta.size() != 3) throw ConfigError("--beta needs three values");
      const SplineParams p{config.beta[0], config.beta[1], config.beta[2]};
      data = oracle::sample_spline_data(config.n, config.seed, p);
      if (config.model_kind == "spline_constant") {
        model.emplace(SplineConstantModel{p});
      } else {
        model.emplace(SplineLinearModel{p});
      }
    } else {
      if (config.rows_per_age < 1) throw ConfigError("--rows-per-age must be at least 1");
      data = synth::sample_age_bm(config.rows_per_age, config.seed);
      model.emplace(synth::age_bm_model());
    }
    std::ostringstream text;
    write_csv(text, data);
    write_output(config.out, text.str(), out);
    if (!config.model_out.empty()) save_model(*model, config.model_out);
    err << "wrote " << data.num_rows() << " rows to " << config.out << '\n';
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  return kOk;
}

}  // namespace stratshap::cli
