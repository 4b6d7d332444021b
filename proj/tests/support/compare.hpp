#pragma once

#include "tphd/model.hpp"

#include <doctest.h>

#include <vector>

namespace tphd::test {

inline bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool close(const Mat& a, const Mat& b, double rel) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!close(a(i), b(i), rel)) return false;
    return true;
}

inline bool traj_close(const TrajectoryGaussian& a, const TrajectoryGaussian& b, double rel) {
    return a.birth_time == b.birth_time && a.mean.size() == b.mean.size() &&
           close(a.weight, b.weight, rel) && close(Mat(a.mean), Mat(b.mean), rel) &&
           close(a.cov, b.cov, rel);
}

inline bool ggiw_close(const GgiwComponent& a, const GgiwComponent& b, double rel) {
    return traj_close(a.traj, b.traj, rel) && close(a.gamma_shape, b.gamma_shape, rel) &&
           close(a.gamma_rate, b.gamma_rate, rel) && close(a.iw_dof, b.iw_dof, rel) &&
           close(a.iw_scale, b.iw_scale, rel);
}

/// Greedy one-to-one matching of components between two mixtures at a
/// relative tolerance; order-insensitive.
template <typename Comp, typename Close>
bool lists_match(std::vector<Comp> a, std::vector<Comp> b, Close is_close) {
    if (a.size() != b.size()) return false;
    for (const auto& ca : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (is_close(ca, b[j])) {
                b.erase(b.begin() + static_cast<std::ptrdiff_t>(j));
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

inline bool mixtures_match(const PhdMixture& a, const PhdMixture& b, double rel) {
    return lists_match(a.point, b.point,
                       [rel](const auto& x, const auto& y) { return traj_close(x, y, rel); }) &&
           lists_match(a.extended, b.extended,
                       [rel](const auto& x, const auto& y) { return ggiw_close(x, y, rel); });
}

}  // namespace tphd::test
