#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "equiboot/dataset.hpp"
#include "equiboot/fairness.hpp"
#include "equiboot/glm.hpp"
#include "equiboot/odds.hpp"
#include "equiboot/resample.hpp"
#include "equiboot/simgen.hpp"

namespace equiboot {

/// Raised for malformed configuration (file or flags); the CLI maps it to
/// exit code 1, all other failures to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { simulate, dataset };

struct ExperimentConfig {
    RunMode mode = RunMode::simulate;
    std::vector<std::string> scenarios; // empty = all ten presets
    int replications = 100;
    std::uint64_t master_seed = 1;
    std::string output_dir = ".";

    SimConfig sim;          // n/p apply to every scenario; other fields used by `gen`
    BootstrapSpec bootstrap;
    Eigen::Index m_max = 100000; // cap for the automatic per-cell M in dataset mode
    FitOptions fit;

    double target_spec = 0.56;
    Eigen::Index mclor_nu = 20000;
    bool mad_diagonal = true; // convention reported in table4.csv

    std::array<double, 3> split_fractions{0.6, 0.2, 0.2};
    CsvSchema schema; // dataset mode
};

// The ten scenario presets: {discrete, continuous zero/random mean x
// uncorrelated/correlated} for 3 and 10 groups.
const std::vector<std::string>& scenario_names();

// Applies a preset name to cfg.sim (num_groups, z_mode, mean_mode,
// cov_mode). Throws ConfigError for unknown names.
SimConfig resolve_scenario(const std::string& name, const ExperimentConfig& cfg);

// Flat key=value file with [section] headers; unknown keys are errors.
// Values already set on the returned config can be overridden by CLI flags
// afterwards.
ExperimentConfig parse_config_file(const std::string& path);

// Worker count: EQUIBOOT_THREADS if set, else 1.
int worker_threads();

/// Mean (over replications) mad-from-one of the seven per-replication odds
/// ratio matrices, under both diagonal conventions.
struct ScenarioStats {
    std::string name;
    // order: EOR, LOR, MCLOR (original data/model), then EOR, LOR, MCLOR,
    // INTADJ (equity-adjusted)
    std::array<double, 7> mean_excl{}; // diagonal excluded from the mean
    std::array<double, 7> mean_incl{}; // diagonal included
};

struct Table4Report {
    std::vector<ScenarioStats> scenarios;
    int replications = 0;
    Eigen::Index n = 0;
    int p = 0;
    Eigen::Index m_per_cell = 0;
    Eigen::Index mclor_nu = 0;
    std::uint64_t master_seed = 0;
    bool mad_diagonal = true;
};

// For each scenario and replication: generate data, measure EOR/LOR/MCLOR
// on the raw data and model, equity-bootstrap (M = bootstrap.m_per_cell),
// re-measure, and measure the intercept-adjusted original model via MCLOR.
// Replication r of scenario s runs on the stream derive_seed(master, s, r),
// so results do not depend on execution order or worker count.
Table4Report run_simulation(const ExperimentConfig& cfg);

struct HistogramSeries {
    std::string model; // "logistic" or "naive_bayes"
    int group = 0;
    int label = 0;
    std::array<std::int64_t, 20> counts{}; // 20 bins over [0, 1]
};

struct ModelEval {
    std::string model;
    bool fitted = false;
    std::string skip_reason;
    double threshold = 0.5;
    GroupMetrics metrics; // on the frozen test cells
    double gap = 0.0;     // equal_odds_gap(metrics)
};

struct RegimeResult {
    std::string regime; // "blind" or "equity"
    double train_eor_mad = 0.0;
    ModelEval logistic;
    ModelEval naive_bayes;
    std::string logistic_model_text;
    std::vector<HistogramSeries> histograms;
};

struct PipelineReport {
    std::vector<std::string> group_names;
    RegimeResult blind;
    RegimeResult equity;
};

// 60/20/20 split (configurable), blind and equity bootstrap arms, logistic
// and naive Bayes fits with thresholds calibrated to target_spec on each
// training set, group metrics on the frozen test cells, and 20-bin test
// probability histograms per (model, group, label).
PipelineReport run_dataset_pipeline(const ExperimentConfig& cfg, const Dataset& data);

// table4.csv plus an aligned-text summary.
void write_table4(const Table4Report& report, const std::string& output_dir);
void render_table4(const Table4Report& report, std::ostream& out);

// metrics_<regime>.csv, histograms_<regime>.csv, models_<regime>.txt plus a
// text summary.
void write_pipeline(const PipelineReport& report, const std::string& output_dir);
void render_pipeline(const PipelineReport& report, std::ostream& out);

} // namespace equiboot
