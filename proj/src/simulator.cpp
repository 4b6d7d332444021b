#include "tphd/simulator.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tphd {

Mat make_transition(double dt) {
    Mat f = Mat::Identity(4, 4);
    f(0, 2) = dt;
    f(1, 3) = dt;
    return f;
}

Mat make_process_noise(double dt, double intensity) {
    const double dt2 = dt * dt;
    Mat q = Mat::Zero(4, 4);
    q(0, 0) = q(1, 1) = dt2 * dt2 / 4.0;
    q(2, 2) = q(3, 3) = dt2;
    q(0, 2) = q(2, 0) = dt2 * dt / 2.0;
    q(1, 3) = q(3, 1) = dt2 * dt / 2.0;
    return intensity * q;
}

Mat make_observation() {
    Mat h = Mat::Zero(2, 4);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    return h;
}

MotionModel make_motion_model(const ScenarioConfig& cfg) {
    MotionModel m;
    m.F = make_transition(cfg.dt);
    m.Q = make_process_noise(cfg.dt, cfg.process_noise_intensity);
    m.survival_prob = cfg.survival_prob;
    m.rate_forgetting = cfg.rate_forgetting;
    m.extent_decay_time = cfg.extent_decay_time;
    m.dt = cfg.dt;
    m.extent_transform = cfg.extent_transform.size() > 0
                             ? cfg.extent_transform
                             : Mat::Identity(cfg.extent_dim, cfg.extent_dim);
    return m;
}

MeasurementModel make_measurement_model(const ScenarioConfig& cfg) {
    MeasurementModel m;
    m.H = make_observation();
    m.R = cfg.meas_noise_var * Mat::Identity(2, 2);
    m.detection_prob = cfg.detection_prob;
    m.clutter_rate = cfg.clutter_rate;
    m.clutter_density = uniform_clutter_density(cfg.clutter_rate, cfg.region.area());
    return m;
}

namespace {

/// True extent matrix: axis variances aligned with the target heading.
Mat heading_aligned_extent(const GroundTruthTarget& target) {
    const double vx = target.initial_state(2);
    const double vy = target.initial_state(3);
    const double heading = (vx == 0.0 && vy == 0.0) ? 0.0 : std::atan2(vy, vx);
    Mat rot(2, 2);
    rot << std::cos(heading), -std::sin(heading), std::sin(heading), std::cos(heading);
    Mat axes = Mat::Zero(2, 2);
    axes(0, 0) = target.extent_axes(0) * target.extent_axes(0);
    axes(1, 1) = target.extent_axes(1) * target.extent_axes(1);
    return symmetrize(rot * axes * rot.transpose());
}

Vec draw_gaussian(const Vec& mean, const Mat& cov, std::mt19937_64& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    Vec noise(mean.size());
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = unit(rng);
    const Eigen::LLT<Mat> llt(cov);
    return mean + llt.matrixL() * noise;
}

}  // namespace

std::vector<TruthTrajectory> generate_truth(const ScenarioConfig& cfg, std::mt19937_64* rng) {
    std::vector<TruthTrajectory> out;
    const Mat f = make_transition(cfg.dt);
    const Mat q = make_process_noise(cfg.dt, cfg.process_noise_intensity);
    for (const auto& target : cfg.targets) {
        if (target.birth >= target.death)
            throw std::invalid_argument("generate_truth: birth must precede death");
        TruthTrajectory tt;
        tt.target_class = target.target_class;
        tt.birth = target.birth;
        tt.death = std::min(target.death, cfg.duration);
        tt.rate = target.rate;
        if (target.target_class == TargetClass::extended)
            tt.extent = heading_aligned_extent(target);
        Vec x = target.initial_state;
        for (int t = tt.birth; t <= tt.death; ++t) {
            tt.states.push_back(x);
            x = f * x;
            if (cfg.truth_process_noise && rng) x = draw_gaussian(x, q, *rng);
        }
        out.push_back(std::move(tt));
    }
    return out;
}

std::vector<Mat> generate_measurements(const std::vector<TruthTrajectory>& truth,
                                       const ScenarioConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution detect(cfg.detection_prob);
    std::poisson_distribution<int> clutter_count(cfg.clutter_rate);
    std::uniform_real_distribution<double> ux(cfg.region.x_min, cfg.region.x_max);
    std::uniform_real_distribution<double> uy(cfg.region.y_min, cfg.region.y_max);
    const Mat h = make_observation();
    const Mat r = cfg.meas_noise_var * Mat::Identity(2, 2);

    std::vector<Mat> steps;
    steps.reserve(static_cast<std::size_t>(cfg.duration));
    for (int t = 1; t <= cfg.duration; ++t) {
        std::vector<Vec> zs;
        for (const auto& target : truth) {
            if (!target.alive_at(t)) continue;
            if (target.target_class == TargetClass::point) {
                if (cfg.detection_prob > 0.0 && detect(rng))
                    zs.push_back(draw_gaussian(h * target.state_at(t), r, rng));
            } else {
                if (cfg.detection_prob > 0.0 && detect(rng)) {
                    std::poisson_distribution<int> count(target.rate);
                    const int n = count(rng);
                    for (int i = 0; i < n; ++i)
                        zs.push_back(draw_gaussian(h * target.state_at(t), target.extent, rng));
                }
            }
        }
        const int n_clutter = cfg.clutter_rate > 0.0 ? clutter_count(rng) : 0;
        for (int i = 0; i < n_clutter; ++i) {
            Vec z(2);
            z << ux(rng), uy(rng);
            zs.push_back(std::move(z));
        }
        Mat step(2, static_cast<Eigen::Index>(zs.size()));
        for (std::size_t i = 0; i < zs.size(); ++i) step.col(static_cast<Eigen::Index>(i)) = zs[i];
        steps.push_back(std::move(step));
    }
    return steps;
}

void write_measurement_records(std::ostream& os, const std::vector<Mat>& steps) {
    os.precision(17);
    for (std::size_t k = 0; k < steps.size(); ++k) {
        os << (k + 1);
        const Mat& z = steps[k];
        for (Eigen::Index i = 0; i < z.cols(); ++i) os << ',' << z(0, i) << ',' << z(1, i);
        os << '\n';
    }
}

std::vector<Mat> read_measurement_records(std::istream& is) {
    std::vector<Mat> steps;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(ss, field, ',')) values.push_back(std::stod(field));
        if (values.empty() || (values.size() - 1) % 2 != 0)
            throw std::invalid_argument("read_measurement_records: malformed record");
        const auto step = static_cast<std::size_t>(values[0]);
        if (step != steps.size() + 1)
            throw std::invalid_argument("read_measurement_records: steps out of order");
        const auto m = (values.size() - 1) / 2;
        Mat z(2, static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            z(0, static_cast<Eigen::Index>(i)) = values[1 + 2 * i];
            z(1, static_cast<Eigen::Index>(i)) = values[2 + 2 * i];
        }
        steps.push_back(std::move(z));
    }
    return steps;
}

}  // namespace tphd
