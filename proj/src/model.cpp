#include "tphd/model.hpp"

#include "tphd/json_util.hpp"

#include <stdexcept>

namespace tphd {

using nlohmann::json;

json vec_to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vec vec_from_json(const json& j) {
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

json mat_to_json(const Mat& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Mat mat_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    return m;
}

void validate(const TrajectoryGaussian& c) {
    if (c.state_dim < 1) throw std::invalid_argument("TrajectoryGaussian: state_dim < 1");
    if (c.weight < 0.0) throw std::invalid_argument("TrajectoryGaussian: negative weight");
    if (c.birth_time < 1) throw std::invalid_argument("TrajectoryGaussian: birth_time < 1");
    if (c.mean.size() == 0 || c.mean.size() % c.state_dim != 0)
        throw std::invalid_argument("TrajectoryGaussian: mean size not a multiple of state_dim");
    if (c.cov.rows() != c.cov.cols() || c.cov.rows() % c.state_dim != 0)
        throw std::invalid_argument("TrajectoryGaussian: covariance shape invalid");
    if (c.active_length() < 1 || c.active_length() > c.length())
        throw std::invalid_argument("TrajectoryGaussian: active window exceeds trajectory");
    if (!is_symmetric(c.cov, 1e-9))
        throw std::invalid_argument("TrajectoryGaussian: covariance not symmetric");
}

Mat GgiwComponent::extent_mean() const {
    const double denom = iw_dof - 2.0 * extent_dim() - 2.0;
    if (!(denom > 0.0))
        throw std::domain_error("GgiwComponent: extent mean undefined (dof <= 2d + 2)");
    return iw_scale / denom;
}

void validate(const GgiwComponent& c) {
    validate(c.traj);
    if (!(c.gamma_shape > 0.0) || !(c.gamma_rate > 0.0))
        throw std::invalid_argument("GgiwComponent: Gamma parameters must be positive");
    if (c.iw_scale.rows() != c.iw_scale.cols() || c.iw_scale.rows() < 1)
        throw std::invalid_argument("GgiwComponent: extent scale must be square");
    if (!(c.iw_dof > 2.0 * c.extent_dim()))
        throw std::invalid_argument("GgiwComponent: iw_dof must exceed 2d");
}

double total_mass(const PhdMixture& mix) {
    double m = 0.0;
    for (const auto& c : mix.point) m += c.weight;
    for (const auto& c : mix.extended) m += c.traj.weight;
    return m;
}

std::pair<Vec, Mat> current_state_marginal(const TrajectoryGaussian& c) {
    return {c.current_mean(), c.current_cov()};
}

std::function<double(const Vec&)> uniform_clutter_density(double rate, double area) {
    const double intensity = rate / area;
    return [intensity](const Vec&) { return intensity; };
}

namespace {

json traj_to_json(const TrajectoryGaussian& c) {
    return json{{"weight", c.weight},
                {"birth_time", c.birth_time},
                {"state_dim", c.state_dim},
                {"track_id", c.track_id},
                {"mean", vec_to_json(c.mean)},
                {"cov", mat_to_json(c.cov)}};
}

TrajectoryGaussian traj_from_json(const json& j) {
    TrajectoryGaussian c;
    c.weight = j.at("weight").get<double>();
    c.birth_time = j.at("birth_time").get<int>();
    c.state_dim = j.at("state_dim").get<int>();
    c.track_id = j.at("track_id").get<std::uint64_t>();
    c.mean = vec_from_json(j.at("mean"));
    c.cov = mat_from_json(j.at("cov"));
    return c;
}

}  // namespace

json snapshot(const PhdMixture& mix) {
    json point = json::array();
    for (const auto& c : mix.point) point.push_back(traj_to_json(c));
    json extended = json::array();
    for (const auto& c : mix.extended) {
        json e = traj_to_json(c.traj);
        e["gamma_shape"] = c.gamma_shape;
        e["gamma_rate"] = c.gamma_rate;
        e["iw_dof"] = c.iw_dof;
        e["iw_scale"] = mat_to_json(c.iw_scale);
        extended.push_back(std::move(e));
    }
    return json{{"schema_version", 1},
                {"time", mix.time},
                {"state_dim", mix.state_dim},
                {"extent_dim", mix.extent_dim},
                {"point", std::move(point)},
                {"extended", std::move(extended)}};
}

PhdMixture mixture_from_snapshot(const json& j) {
    if (j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("mixture_from_snapshot: unsupported schema version");
    PhdMixture mix;
    mix.time = j.at("time").get<int>();
    mix.state_dim = j.at("state_dim").get<int>();
    mix.extent_dim = j.at("extent_dim").get<int>();
    for (const auto& c : j.at("point")) mix.point.push_back(traj_from_json(c));
    for (const auto& e : j.at("extended")) {
        GgiwComponent c;
        c.traj = traj_from_json(e);
        c.gamma_shape = e.at("gamma_shape").get<double>();
        c.gamma_rate = e.at("gamma_rate").get<double>();
        c.iw_dof = e.at("iw_dof").get<double>();
        c.iw_scale = mat_from_json(e.at("iw_scale"));
        mix.extended.push_back(std::move(c));
    }
    return mix;
}

}  // namespace tphd
