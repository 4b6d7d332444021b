#pragma once

#include "tphd/model.hpp"
#include "tphd/partition.hpp"

#include <json.hpp>

#include <utility>
#include <vector>

namespace tphd {

/// Sufficient statistics of one measurement cell for one GGIW component.
struct CellStatistics {
    Vec centroid;           ///< cell mean measurement
    Mat scatter;            ///< spread around the centroid
    Mat extent;             ///< expected extent matrix of the component
    Vec innovation;         ///< centroid minus predicted measurement
    Mat innovation_cov;     ///< position covariance plus extent/|w|
    Mat gain;               ///< full-active-window Kalman gain
    Mat whitened_outer;     ///< extent-whitened innovation outer product
    double log_likelihood;  ///< log predictive likelihood of the cell
};

/// Throws std::domain_error if the component's extent mean is undefined
/// (iw_dof <= 2d + 2).
CellStatistics cell_statistics(const Mat& cell_z, const GgiwComponent& comp,
                               const MeasurementModel& model);

/// log predictive density of a singleton cell under a Gaussian trajectory
/// component: N(z; H m, H P H^T + R) at the current time step.
double log_cell_likelihood_point(const Mat& cell_z, const TrajectoryGaussian& comp,
                                 const MeasurementModel& model);

/// log predictive likelihood of a cell under a GGIW component (closed-form
/// Gamma/Gaussian/inverse-Wishart predictive; the detection probability is
/// not included).
double log_cell_likelihood_extended(const Mat& cell_z, const GgiwComponent& comp,
                                    const MeasurementModel& model);

struct UpdateOptions {
    /// Keep the two misdetection Gamma branches of each extended component as
    /// separate components rather than moment-matching them to one Gamma.
    bool split_misdetection_gamma = false;
    /// Detected components with weight at or below this are not materialized
    /// (their weight still enters the evidence terms exactly).
    double min_weight = 0.0;
};

struct UpdateDiagnostics {
    std::vector<Cell> cells;                ///< unique cells of the proposals
    std::vector<double> log_cell_evidence;  ///< log d_w per cell
    std::vector<double> partition_weights;  ///< aligned with the proposals
    double misdetection_mass = 0.0;
    double posterior_mass = 0.0;  ///< exact, independent of min_weight
    bool degenerate = false;      ///< every proposal had zero likelihood

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Measurement update of the predicted mixture: misdetection terms for every
/// component plus, for each unique cell of the proposals, detection-updated
/// components weighted by the partition-marginal cell probabilities.
/// Throws std::invalid_argument if z is non-empty and proposals are empty or
/// not partitions of the measurement index set.
std::pair<PhdMixture, UpdateDiagnostics> update(const PhdMixture& pred, const Mat& z,
                                                const std::vector<Partition>& proposals,
                                                const MeasurementModel& model,
                                                const UpdateOptions& opts = {});

}  // namespace tphd
