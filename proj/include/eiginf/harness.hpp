#pragma once

#include "eiginf/estimators.hpp"
#include "eiginf/model.hpp"
#include "eiginf/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eiginf {

// Flat key = value configuration. Lists are comma separated. Every field
// below is one key with the same name; unknown keys are rejected.
struct experiment_config {
    std::string scenario = "a";  // a, b or custom
    int scenario_n = 6;          // n for scenario a
    std::vector<double> powers;  // overrides; empty keeps the scenario's
    std::vector<int> mults;
    int N = 0;                   // 0 keeps the scenario's
    int M = 0;
    std::optional<double> sigma2;  // fixed noise level; otherwise snr_db drives it
    std::string constellation = "qpsk";
    std::vector<std::string> estimators{"stieltjes", "classical", "moment"};
    std::vector<double> snr_db{20.0};
    int trials = 500;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;   // empty: stdout
    std::string dump;  // per-trial estimates, nmse only

    // density
    double grid_lo = 0.0;
    double grid_hi = 0.0;  // 0: automatic
    int grid_points = 2000;
    double y_offset = 0.0;  // 0: automatic
    bool histogram = false;
    int hist_bins = 80;

    // separability
    std::string sweep = "sigma2";  // sigma2 or ratio
    std::vector<double> sweep_values{0.1, 0.5, 1.0, 2.0};
    double c0 = 0.0;  // 0: from the shape

    // rci
    int k_max = 3;
    bool even_sizes = false;
    double tau = -1.0;
    bool blind_sigma2 = false;

    bool operator==(const experiment_config&) const = default;
};

experiment_config parse_config(const std::string& text);
experiment_config load_config(const std::string& path);
std::string serialize_config(const experiment_config& cfg);
// Sets one key from its textual value; throws config_error on unknown keys.
void set_config_value(experiment_config& cfg, const std::string& key, const std::string& value);
void validate_config(const experiment_config& cfg);

scenario_spec resolve_spec(const experiment_config& cfg, double snr_db);

std::string format_double(double v);

struct density_result {
    std::string csv;          // x,density[,empirical]
    std::string support_csv;  // interval,lo,hi
    std::vector<std::array<double, 2>> support;
};
density_result run_density(const experiment_config& cfg);

// Support intervals of F plus the per-power separability report.
std::string run_support(const experiment_config& cfg);
std::string run_separability(const experiment_config& cfg);
std::string run_estimate(const experiment_config& cfg, const std::vector<double>* eigenvalues = nullptr);

struct nmse_record {
    double snr_db = 0.0;
    std::string estimator;
    int k = 0;  // 1-based
    double power = 0.0;
    double nmse = 0.0;
    double mean_estimate = 0.0;
    int trials = 0;
    int excluded = 0;
};

struct trial_estimate {
    double snr_db = 0.0;
    int trial = 0;
    std::string estimator;
    int k = 0;
    double estimate = 0.0;
};

struct nmse_result {
    std::vector<nmse_record> records;
    std::vector<trial_estimate> per_trial;
    std::string csv;
    std::string dump_csv;
};
nmse_result run_nmse(const experiment_config& cfg);

// Sorted per-trial estimates at the first SNR of the grid.
std::string run_estimator_cdf(const experiment_config& cfg);

struct rci_row {
    double snr_db = 0.0;
    double rci = 0.0;
    int trials = 0;
    int excluded = 0;
};
struct rci_result {
    std::vector<rci_row> rows;
    std::string csv;
};
rci_result run_rci(const experiment_config& cfg);

// Recompute NMSE summaries from a per-trial dump.
std::vector<nmse_record> nmse_from_dump(const std::vector<trial_estimate>& rows,
                                        const power_profile& truth);

} // namespace eiginf
