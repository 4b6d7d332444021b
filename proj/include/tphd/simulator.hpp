#pragma once

#include "tphd/metrics.hpp"
#include "tphd/model.hpp"
#include "tphd/predictor.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace tphd {

struct Region {
    double x_min = -25.0, x_max = 25.0;
    double y_min = 0.0, y_max = 300.0;
    [[nodiscard]] double area() const { return (x_max - x_min) * (y_max - y_min); }
};

struct GroundTruthTarget {
    TargetClass target_class = TargetClass::point;
    Vec initial_state;  ///< [x, y, vx, vy]
    int birth = 1;
    int death = 1;
    double rate = 0.0;        ///< expected measurements per scan (extended only)
    Vec extent_axes;          ///< [along-track, cross-track] axis std devs (m)
};

/// Declarative experiment description: scenario, sensor/dynamic parameters
/// and the full filter parameter set.
struct ScenarioConfig {
    Region region;
    int duration = 100;
    double dt = 1.0;
    double process_noise_intensity = 0.1;  ///< acceleration PSD (m^2 s^-4)
    double meas_noise_var = 1.0;           ///< position noise variance (m^2)
    double survival_prob = 0.99;
    double detection_prob = 0.98;
    double clutter_rate = 5.0;  ///< expected clutter count per scan
    std::vector<GroundTruthTarget> targets;
    bool truth_process_noise = false;

    double prune_threshold = 1e-5;
    double absorb_threshold = 4.0;
    int max_components = 100;
    int lscan = 5;
    int extent_dim = 2;
    double rate_forgetting = 1.05;
    double extent_decay_time = 5.48;
    Mat extent_transform;  ///< d x d
    double dbscan_step = 0.1;
    double dbscan_min = 0.1;
    double dbscan_max = 8.0;
    BirthModel birth;

    MetricConfig metric;
    std::uint64_t seed = 1;
};

/// Constant-velocity transition and discretized white-acceleration noise.
Mat make_transition(double dt);
Mat make_process_noise(double dt, double intensity);
Mat make_observation();

MotionModel make_motion_model(const ScenarioConfig& cfg);
MeasurementModel make_measurement_model(const ScenarioConfig& cfg);

struct TruthTrajectory {
    TargetClass target_class = TargetClass::point;
    int birth = 1;
    int death = 1;
    std::vector<Vec> states;  ///< one per step from birth to death
    Mat extent;               ///< true extent matrix (extended only)
    double rate = 0.0;

    [[nodiscard]] bool alive_at(int t) const { return t >= birth && t <= death; }
    [[nodiscard]] const Vec& state_at(int t) const {
        return states[static_cast<std::size_t>(t - birth)];
    }
};

/// Noise-free constant-velocity truth by default; with
/// cfg.truth_process_noise the per-step process noise is drawn from the
/// given generator.
std::vector<TruthTrajectory> generate_truth(const ScenarioConfig& cfg, std::mt19937_64* rng = nullptr);

/// Per-step measurement matrices (2 x m_k), steps 1..duration at indices
/// 0..duration-1. Point targets are detected with probability p^D and give
/// one noisy position; extended targets, when detected, give a Poisson
/// number of position samples spread by their extent; clutter is Poisson
/// with uniform positions over the region.
std::vector<Mat> generate_measurements(const std::vector<TruthTrajectory>& truth,
                                       const ScenarioConfig& cfg, std::uint64_t seed);

/// Line-oriented record per step: "step,x1,y1,x2,y2,...".
void write_measurement_records(std::ostream& os, const std::vector<Mat>& steps);
std::vector<Mat> read_measurement_records(std::istream& is);

}  // namespace tphd
