#pragma once

#include "tphd/estimator.hpp"
#include "tphd/metrics.hpp"
#include "tphd/simulator.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace tphd {

/// Which model space the filter runs with. The PHD variant is the trajectory
/// filter with a window of one step; the point/extended variants drop the
/// other class's birth components.
enum class FilterVariant { g_tphd, g_phd, p_tphd, e_tphd };

std::string to_string(FilterVariant v);
FilterVariant variant_from_string(const std::string& s);

/// Configuration problems carry the offending field path in what().
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

/// The shipped default experiment (traffic scene with two extended and three
/// point targets and the standard filter parameter set).
ScenarioConfig default_config();

struct RunManifest {
    std::string config_path;
    FilterVariant variant = FilterVariant::g_tphd;
    int lscan = 0;  ///< 0: use the config value (g_phd forces 1)
    int runs = 1;
    std::uint64_t seed = 0;  ///< 0: use the config value
    std::string out_dir = ".";
    int threads = 1;
    bool emit_diagnostics = false;
};

/// Output of one Monte-Carlo run.
struct RunResult {
    MetricResult metric;
    std::vector<int> cardinality;  ///< per step
    std::vector<double> mass;      ///< per step
    std::vector<std::vector<TrajectoryEstimate>> estimates;  ///< per step
};

/// Runs the filter variant over one simulated measurement sequence.
RunResult run_single(const ScenarioConfig& cfg, FilterVariant variant, int lscan,
                     std::uint64_t run_seed);

struct ExperimentSummary {
    FilterVariant variant = FilterVariant::g_tphd;
    int runs = 0;
    MetricResult rms;
    double mean_cardinality_error = 0.0;
    double wall_seconds = 0.0;
};

/// Runs the Monte-Carlo experiment described by the manifest, writing
/// estimates.csv, metrics.csv, cardinality.csv and summary.csv into
/// manifest.out_dir. All data files are deterministic given the seed.
ExperimentSummary run_experiment(const RunManifest& manifest);

/// In-memory variant of run_experiment for library callers (no file output).
std::vector<RunResult> run_monte_carlo(const ScenarioConfig& cfg, FilterVariant variant,
                                       int lscan, int runs, std::uint64_t master_seed,
                                       int threads);

/// Truth position tracks of a scenario, keyed for the trajectory metric.
std::vector<TimedTrack> truth_tracks(const std::vector<TruthTrajectory>& truth);

/// Position tracks stitched from per-step extracted estimates by component
/// identity (contiguous runs of the same track id).
std::vector<TimedTrack> estimate_tracks(
    const std::vector<std::vector<TrajectoryEstimate>>& per_step);

}  // namespace tphd
