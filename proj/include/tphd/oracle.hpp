#pragma once

#include "tphd/model.hpp"
#include "tphd/partition.hpp"

#include <vector>

namespace tphd::oracle {

/// Both sides of one of the partition identities, each evaluated by
/// exhaustive enumeration.
struct LemmaCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Identity between the clutter-augmented partition sum and the
/// subset-times-partition double sum:
///   sum_{y subset z} lambda^{z\y} sum_{Q part y} tau^Q
///     = sum_{Q part z} (kappa + tau)^Q,
/// with kappa(w) = [|w|=1] * prod lambda. `per_cell` is indexed by subset
/// bitmask over n = per_element.size() elements (n <= 8).
LemmaCheck check_lemma1(const std::vector<double>& per_element,
                        const std::vector<double>& per_cell);

/// Identity that swaps a subset sum against a partition sum:
///   sum_{w subset z, w nonempty} f(w) sum_{Q part z\w} g^Q
///     = sum_{P part z} g^P sum_{v in P} f(v)/g(v).
/// f and g are bitmask-indexed over n elements (n <= 8); throws
/// std::domain_error if g vanishes on a non-empty subset.
LemmaCheck check_lemma2(const std::vector<double>& f, const std::vector<double>& g, int n);

/// Predictive likelihood of a measurement cell under a single Gaussian
/// trajectory component (unit weight, no detection factor), coded
/// independently of the updater.
double log_cell_predictive_point(const Mat& cell_z, const TrajectoryGaussian& comp,
                                 const MeasurementModel& model);

/// Predictive likelihood of a measurement cell under a single GGIW component
/// (unit weight, no detection factor; the zero-detections Poisson factor is
/// folded into the Gamma term), coded independently of the updater.
double log_cell_predictive_extended(const Mat& cell_z, const GgiwComponent& comp,
                                    const MeasurementModel& model);

/// Exhaustive-enumeration evaluation of the predicted measurement-set
/// density l(z) and of the exact posterior intensity mass, for small
/// measurement sets (|z| <= 6). Used only by tests; independent of the
/// updater's partition machinery.
class MeasurementDensityOracle {
public:
    MeasurementDensityOracle(const Mat& z, const PhdMixture& predicted,
                             const MeasurementModel& model);

    /// log l(z') for the sub-multiset selected by `mask` (bit i selects
    /// measurement column i).
    [[nodiscard]] double log_density(std::uint32_t mask) const;

    /// log l(z) of the full measurement set.
    [[nodiscard]] double log_density_full() const { return log_density(full_mask_); }

    /// Integral of the exact posterior intensity over the current state
    /// space, via the decomposition into a misdetection term plus subset
    /// terms weighted by densities of the complementary measurements.
    [[nodiscard]] double posterior_mass() const;

    [[nodiscard]] double tau_empty() const { return tau_empty_; }
    [[nodiscard]] double log_tau(std::uint32_t mask) const { return log_tau_[mask]; }

private:
    int count_ = 0;
    std::uint32_t full_mask_ = 0;
    double prior_mass_ = 0.0;
    double clutter_rate_ = 0.0;
    double tau_empty_ = 0.0;
    std::vector<double> log_tau_;         // per non-empty subset mask
    std::vector<double> log_kappa_tau_;   // log(kappa_w + tau_w) per mask
};

}  // namespace tphd::oracle
