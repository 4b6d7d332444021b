#pragma once

#include "tphd/spd.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace tphd {

enum class TargetClass { point, extended };

/// Weighted Gaussian over a trajectory (birth time + stacked state sequence).
///
/// The mean always holds the full history, length() * state_dim entries.
/// The covariance may cover only the trailing `active_length()` time steps
/// (the window the filter still updates); the leading part of the mean is
/// then a frozen point estimate. A freshly built component has
/// active_length() == length().
struct TrajectoryGaussian {
    double weight = 0.0;
    int birth_time = 1;
    int state_dim = 4;
    Vec mean;
    Mat cov;
    std::uint64_t track_id = 0;

    [[nodiscard]] int length() const { return static_cast<int>(mean.size()) / state_dim; }
    [[nodiscard]] int active_length() const { return static_cast<int>(cov.rows()) / state_dim; }
    [[nodiscard]] int end_time() const { return birth_time + length() - 1; }

    /// Mean of the state at the trajectory's last time step.
    [[nodiscard]] Vec current_mean() const { return mean.tail(state_dim); }
    /// Covariance block of the last time step.
    [[nodiscard]] Mat current_cov() const {
        return cov.bottomRightCorner(state_dim, state_dim);
    }
    /// Cross-covariance of the whole active window with the last time step
    /// (the right block column).
    [[nodiscard]] Mat cross_cov_with_current() const { return cov.rightCols(state_dim); }

    /// Mean of the state at absolute time t (birth_time <= t <= end_time()).
    [[nodiscard]] Vec state_mean_at(int t) const {
        return mean.segment(static_cast<Eigen::Index>(t - birth_time) * state_dim, state_dim);
    }
};

/// Throws std::invalid_argument if dimensions or the active-window invariant
/// are violated.
void validate(const TrajectoryGaussian& c);

/// Gamma x Gaussian x inverse Wishart component for an extended target
/// trajectory. Only the latest extent/rate law is kept.
struct GgiwComponent {
    TrajectoryGaussian traj;
    double gamma_shape = 1.0;  ///< measurement-rate Gamma shape
    double gamma_rate = 1.0;   ///< measurement-rate Gamma rate
    double iw_dof = 7.0;       ///< extent inverse-Wishart degrees of freedom
    Mat iw_scale;              ///< extent inverse-Wishart scale matrix

    [[nodiscard]] int extent_dim() const { return static_cast<int>(iw_scale.rows()); }
    /// Expected extent matrix iw_scale / (iw_dof - 2d - 2); requires
    /// iw_dof > 2d + 2.
    [[nodiscard]] Mat extent_mean() const;
    [[nodiscard]] double mean_rate() const { return gamma_shape / gamma_rate; }
};

void validate(const GgiwComponent& c);

/// PHD over the coexisting point/extended trajectory space: two component
/// lists sharing a common current time. Every component is alive, i.e.
/// ends at `time`.
struct PhdMixture {
    int time = 0;
    int state_dim = 4;
    int extent_dim = 2;
    std::vector<TrajectoryGaussian> point;
    std::vector<GgiwComponent> extended;
};

/// Sum of all component weights (the expected number of alive trajectories).
double total_mass(const PhdMixture& mix);

/// Marginal (mean, covariance) of the state at the component's last time
/// step.
std::pair<Vec, Mat> current_state_marginal(const TrajectoryGaussian& c);

/// Sensor model: linear Gaussian single-measurement likelihood plus PPP
/// clutter.
struct MeasurementModel {
    Mat H;
    Mat R;
    double detection_prob = 0.98;
    double clutter_rate = 5.0;  ///< expected clutter count per scan
    std::function<double(const Vec&)> clutter_density;

    [[nodiscard]] int meas_dim() const { return static_cast<int>(H.rows()); }
    [[nodiscard]] double clutter_at(const Vec& z) const { return clutter_density(z); }
};

/// Constant-rate uniform clutter intensity over an axis-aligned box.
std::function<double(const Vec&)> uniform_clutter_density(double rate, double area);

/// Dynamics: linear Gaussian kinematics plus the extended-target rate and
/// extent transition (rate forgetting and exponential extent decay).
struct MotionModel {
    Mat F;
    Mat Q;
    double survival_prob = 0.99;
    double rate_forgetting = 1.05;  ///< divisor applied to both Gamma parameters
    double extent_decay_time = 5.48;
    double dt = 1.0;
    Mat extent_transform;  ///< d x d matrix applied to the extent scale
};

/// Versioned JSON snapshot of a mixture, for debugging and round-trip tests.
nlohmann::json snapshot(const PhdMixture& mix);
PhdMixture mixture_from_snapshot(const nlohmann::json& j);

}  // namespace tphd
