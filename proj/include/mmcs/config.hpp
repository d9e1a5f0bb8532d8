#ifndef MMCS_CONFIG_HPP
#define MMCS_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mmcs/eval.hpp"

namespace mmcs {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Full run description.  The two sub-configs carry the experiment-specific
// defaults; shared keys (antennas, grids, solver knobs, ...) are applied to
// both so the selected experiment always sees the override.
struct RunConfig {
    std::string experiment = "mse";  // mse | rate | complexity
    MseExperimentConfig mse;
    RateExperimentConfig rate;
    std::string out = "results.csv";
    std::string format = "csv";  // csv | json
    std::string plot_out;        // optional long-format plot table
};

// Ordered key=value pairs; later entries override earlier ones.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat key=value file; '#' comments and blank lines skipped.
KeyValues read_config_file(const std::string& path);

// defaults -> file values -> flag values, then validation.  Unknown keys and
// constraint violations throw std::invalid_argument naming the field.
RunConfig parse_config(const KeyValues& file_values, const KeyValues& flag_values);

void validate_config(const RunConfig& cfg);

// Canonical, parseable key=value echo of the effective configuration.
KeyValues config_echo(const RunConfig& cfg);

void write_results_csv(std::ostream& os, const RunConfig& cfg,
                       const std::vector<ExperimentRecord>& records,
                       const std::vector<ComplexityRow>& complexity, const std::string& status);

void write_results_json(std::ostream& os, const RunConfig& cfg,
                        const std::vector<ExperimentRecord>& records,
                        const std::vector<ComplexityRow>& complexity, const std::string& status);

// Long-format plot tables: MSE -> {m, estimator, scenario, mse_db},
// rate -> {snr_db, estimator, m, n, rate}.
void emit_plotdata(std::ostream& os, const RunConfig& cfg,
                   const std::vector<ExperimentRecord>& records);

void print_summary(std::ostream& os, const RunConfig& cfg,
                   const std::vector<ExperimentRecord>& records,
                   const std::vector<ComplexityRow>& complexity);

// Executes the configured experiment, writes the result file (and plot table
// when requested) and a summary to `summary_out`.  A cancelled run still
// writes whatever realizations completed, marked status=partial.
int run_experiment(const RunConfig& cfg, std::ostream& summary_out,
                   const std::atomic<bool>* cancel = nullptr);

// Shortest round-trip decimal formatting (byte-stable across runs).
std::string format_double(double v);

}  // namespace mmcs

#endif
