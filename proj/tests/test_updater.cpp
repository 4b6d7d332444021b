#include <doctest.h>

#include "tphd/updater.hpp"

#include "tphd/oracle.hpp"
#include "tphd/reference.hpp"
#include "tphd/stats.hpp"

#include "support/builders.hpp"
#include "support/compare.hpp"
#include "support/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace tphd;

namespace {

PhdMixture alive_mixture(std::mt19937_64& rng, int n_point, int n_ext, int time, int state_dim,
                         int extent_dim) {
    PhdMixture mix;
    mix.time = time;
    mix.state_dim = state_dim;
    mix.extent_dim = extent_dim;
    std::uniform_real_distribution<double> w(0.2, 1.2);
    std::uniform_int_distribution<int> len(1, std::min(3, time));
    for (int i = 0; i < n_point; ++i) {
        const int length = len(rng);
        mix.point.push_back(test::random_point_component(state_dim, length, rng, w(rng),
                                                         time - length + 1));
    }
    for (int i = 0; i < n_ext; ++i) {
        const int length = len(rng);
        mix.extended.push_back(test::random_ggiw_component(state_dim, extent_dim, length, rng,
                                                           w(rng), time - length + 1));
    }
    return mix;
}

std::vector<Partition> exhaustive_proposals(int m) { return enumerate_partitions(m).partitions; }

}  // namespace

TEST_CASE("cell statistics: singleton cell has the measurement as centroid, zero scatter") {
    std::mt19937_64 rng(400);
    const auto comp = test::random_ggiw_component(2, 2, 1, rng);
    const auto model = test::simple_model(2, 2);
    Mat z(2, 1);
    z << 0.3, -0.7;
    const auto cs = cell_statistics(z, comp, model);
    CHECK((cs.centroid - z.col(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cs.scatter.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cell statistics: zero innovation gives zero whitened outer product") {
    std::mt19937_64 rng(401);
    const auto comp = test::random_ggiw_component(2, 2, 1, rng);
    const auto model = test::simple_model(2, 2);
    Mat z(2, 2);
    const Vec predicted = model.H * comp.traj.current_mean();
    z.col(0) = predicted + Vec::Ones(2);
    z.col(1) = predicted - Vec::Ones(2);  // centroid exactly at the prediction
    const auto cs = cell_statistics(z, comp, model);
    CHECK(cs.innovation.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(cs.whitened_outer.cwiseAbs().maxCoeff() < 1e-25);
}

TEST_CASE("cell scatter equals the naive two-pass sum") {
    std::mt19937_64 rng(402);
    const auto comp = test::random_ggiw_component(2, 2, 1, rng);
    const auto model = test::simple_model(2, 2);
    Mat z(2, 3);
    for (int i = 0; i < 3; ++i) z.col(i) = test::random_vec(2, rng, 2.0);
    const auto cs = cell_statistics(z, comp, model);

    Vec mean = Vec::Zero(2);
    for (int i = 0; i < 3; ++i) mean += z.col(i);
    mean /= 3.0;
    Mat scatter = Mat::Zero(2, 2);
    for (int i = 0; i < 3; ++i) scatter += (z.col(i) - mean) * (z.col(i) - mean).transpose();
    CHECK((cs.scatter - scatter).cwiseAbs().maxCoeff() < 1e-12);

    // Extent-mean domain guard.
    auto shallow = comp;
    shallow.iw_dof = 5.0;
    CHECK_THROWS_AS(cell_statistics(z, shallow, model), std::domain_error);
}

TEST_CASE("point cell likelihood: mode value, translation invariance, quadrature") {
    std::mt19937_64 rng(403);
    auto model = test::simple_model(2, 2);

    // Make the innovation covariance the identity.
    TrajectoryGaussian comp = test::random_point_component(2, 1, rng);
    comp.cov = 0.5 * Mat::Identity(2, 2);
    model.R = 0.5 * Mat::Identity(2, 2);
    Mat z(2, 1);
    z = comp.current_mean();
    CHECK(std::exp(log_cell_likelihood_point(z, comp, model)) ==
          doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-13));

    // Shifting measurement and mean together changes nothing.
    auto shifted = comp;
    Vec shift(2);
    shift << 13.0, -4.0;
    shifted.mean += shift;
    Mat z2 = z;
    z2.col(0) += shift;
    CHECK(log_cell_likelihood_point(z2, shifted, model) ==
          doctest::Approx(log_cell_likelihood_point(z, comp, model)).epsilon(1e-12));

    // Against direct integration of l(z | x) over the prior at n_x = 2.
    const auto prior = test::random_point_component(2, 1, rng);
    Mat z3(2, 1);
    z3.col(0) = prior.current_mean() + test::random_vec(2, rng, 1.0);
    const SymPosDef p(prior.cov), r(model.R);
    auto integrand = [&](double x, double y) {
        Vec xs(2);
        xs << x, y;
        return std::exp(log_gaussian(z3.col(0), xs, r) + log_gaussian(xs, prior.mean, p));
    };
    const double s0 = std::sqrt(prior.cov(0, 0)), s1 = std::sqrt(prior.cov(1, 1));
    const double numeric =
        test::simpson_2d(integrand, prior.mean(0) - 9 * s0, prior.mean(0) + 9 * s0,
                         prior.mean(1) - 9 * s1, prior.mean(1) + 9 * s1, 500, 500);
    CHECK(numeric ==
          doctest::Approx(std::exp(log_cell_likelihood_point(z3, prior, model))).epsilon(1e-6));
}

TEST_CASE("extended cell likelihood is positive and matches the independent evaluation") {
    std::mt19937_64 rng(404);
    const auto model = test::simple_model(2, 2);
    for (int trial = 0; trial < 25; ++trial) {
        const auto comp = test::random_ggiw_component(2, 2, 1 + trial % 3, rng);
        const int n = 1 + trial % 4;
        Mat z(2, n);
        for (int i = 0; i < n; ++i) z.col(i) = test::random_vec(2, rng, 3.0);
        const double lq = log_cell_likelihood_extended(z, comp, model);
        CHECK(std::isfinite(lq));  // exp(lq) > 0 always
        const double dup = oracle::log_cell_predictive_extended(z, comp, model);
        CHECK(lq == doctest::Approx(dup).epsilon(1e-12));
    }

    // Two coincident measurements exercise the zero-scatter path.
    const auto comp = test::random_ggiw_component(2, 2, 1, rng);
    Mat z(2, 2);
    z.col(0) = test::random_vec(2, rng, 1.0);
    z.col(1) = z.col(0);
    CHECK(log_cell_likelihood_extended(z, comp, model) ==
          doctest::Approx(oracle::log_cell_predictive_extended(z, comp, model)).epsilon(1e-12));
}

TEST_CASE("extended cell likelihood against a 3-D quadrature at d = 1") {
    // Scalar state, scalar extent, two measurements. The extent prior is
    // sharp, where the closed form's moment-matched extent is accurate.
    MeasurementModel model;
    model.H = Mat::Identity(1, 1);
    model.R = Mat::Identity(1, 1);
    model.detection_prob = 1.0;
    model.clutter_rate = 1.0;
    model.clutter_density = [](const Vec&) { return 1.0; };

    GgiwComponent comp;
    comp.traj.weight = 1.0;
    comp.traj.birth_time = 1;
    comp.traj.state_dim = 1;
    comp.traj.mean = Vec::Zero(1);
    comp.traj.cov = 0.4 * Mat::Identity(1, 1);
    comp.gamma_shape = 7.0;
    comp.gamma_rate = 1.3;
    const double extent0 = 1.1;
    comp.iw_dof = 4000.0;
    comp.iw_scale = (comp.iw_dof - 4.0) * extent0 * Mat::Identity(1, 1);

    Mat z(1, 2);
    z << -0.4, 0.9;

    const SymPosDef prior_cov(comp.traj.cov);
    const SymPosDef iw_scale(comp.iw_scale);
    const double sigma_extent = extent0 * std::sqrt(2.0 / comp.iw_dof);
    auto integrand = [&](double gamma, double extent, double x) {
        const SymPosDef ext(extent * Mat::Identity(1, 1));
        Vec xs(1), z0(1), z1(1);
        xs << x;
        z0 << z(0, 0);
        z1 << z(0, 1);
        return gamma * gamma * std::exp(-gamma) *
               std::exp(log_gamma_pdf(gamma, comp.gamma_shape, comp.gamma_rate) +
                        log_gaussian(z0, xs, ext) + log_gaussian(z1, xs, ext) +
                        log_gaussian(xs, comp.traj.mean, prior_cov) +
                        log_inverse_wishart_pdf(ext, comp.iw_dof, iw_scale));
    };
    const double numeric = test::simpson_3d(
        integrand, 1e-6, 40.0, extent0 - 8 * sigma_extent, extent0 + 8 * sigma_extent, -7.0,
        7.0, 220, 160, 220);

    const double closed = std::exp(log_cell_likelihood_extended(z, comp, model));
    CHECK(numeric == doctest::Approx(closed).epsilon(1e-3));
}

TEST_CASE("empty measurement set: misdetection-only posterior") {
    std::mt19937_64 rng(405);
    auto pred = alive_mixture(rng, 2, 1, 3, 2, 2);
    auto model = test::simple_model(2, 2, 0.98);
    auto [post, diag] = update(pred, Mat(2, 0), {}, model);
    REQUIRE(post.point.size() == pred.point.size());
    for (std::size_t i = 0; i < post.point.size(); ++i)
        CHECK(post.point[i].weight == pred.point[i].weight * (1.0 - 0.98));
    CHECK(post.extended.size() == pred.extended.size());
    CHECK(diag.posterior_mass == doctest::Approx(total_mass(post)).epsilon(1e-13));
}

TEST_CASE("misdetected extended component: the zero-draw branch carries (b/(b+1))^a") {
    std::mt19937_64 rng(406);
    auto pred = alive_mixture(rng, 0, 1, 1, 2, 2);
    pred.extended[0].gamma_shape = 8.0;
    pred.extended[0].gamma_rate = 1.0;
    pred.extended[0].traj.weight = 1.0;
    const auto model = test::simple_model(2, 2, 0.98);

    UpdateOptions split;
    split.split_misdetection_gamma = true;
    auto [post, diag] = update(pred, Mat(2, 0), {}, model, split);
    REQUIRE(post.extended.size() == 2);
    CHECK(post.extended[0].traj.weight == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(post.extended[1].traj.weight ==
          doctest::Approx(0.98 * 0.00390625).epsilon(1e-12));
    CHECK(post.extended[1].gamma_rate == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(post.extended[1].gamma_shape == doctest::Approx(8.0).epsilon(1e-15));

    // Moment matching preserves the total misdetection weight and the mean.
    auto [matched, diag2] = update(pred, Mat(2, 0), {}, model);
    REQUIRE(matched.extended.size() == 1);
    const double w_split = post.extended[0].traj.weight + post.extended[1].traj.weight;
    CHECK(matched.extended[0].traj.weight == doctest::Approx(w_split).epsilon(1e-13));
    const double mean_split =
        (post.extended[0].traj.weight * 8.0 / 1.0 + post.extended[1].traj.weight * 8.0 / 2.0) /
        w_split;
    CHECK(matched.extended[0].gamma_shape / matched.extended[0].gamma_rate ==
          doctest::Approx(mean_split).epsilon(1e-12));
}

TEST_CASE("single measurement with the single partition gets unit partition weight") {
    std::mt19937_64 rng(407);
    const auto pred = alive_mixture(rng, 1, 1, 2, 2, 2);
    const auto model = test::simple_model(2, 2);
    Mat z(2, 1);
    z.col(0) = test::random_vec(2, rng, 1.0);
    auto [post, diag] = update(pred, z, {Partition{{0}}}, model);
    REQUIRE(diag.partition_weights.size() == 1);
    CHECK(diag.partition_weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("partition weights sum to one on random scenes") {
    std::mt19937_64 rng(408);
    const auto model = test::simple_model(2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pred = alive_mixture(rng, 2, 2, 2, 2, 2);
        const int m = 1 + trial % 5;
        Mat z(2, m);
        for (int i = 0; i < m; ++i) z.col(i) = test::random_vec(2, rng, 3.0);
        auto [post, diag] = update(pred, z, exhaustive_proposals(m), model);
        double sum = 0.0;
        for (double w : diag.partition_weights) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("conjugate parameter increments are exact") {
    std::mt19937_64 rng(409);
    auto pred = alive_mixture(rng, 0, 1, 1, 2, 2);
    pred.extended[0].gamma_shape = 8.0;
    pred.extended[0].gamma_rate = 1.5;
    pred.extended[0].iw_dof = 25.0;
    const auto model = test::simple_model(2, 2);
    Mat z(2, 3);
    for (int i = 0; i < 3; ++i)
        z.col(i) = model.H * pred.extended[0].traj.current_mean() + test::random_vec(2, rng, 1.0);
    auto [post, diag] = update(pred, z, {Partition{{0, 1, 2}}}, model);
    REQUIRE(post.extended.size() == 2);  // misdetection + one detected
    const auto& det = post.extended[1];
    CHECK(det.gamma_shape - pred.extended[0].gamma_shape == 3.0);
    CHECK(det.gamma_rate - pred.extended[0].gamma_rate == 1.0);
    CHECK(det.iw_dof - pred.extended[0].iw_dof == 3.0);
    CHECK(min_eigenvalue(det.traj.cov) > -1e-10);
    CHECK(min_eigenvalue(det.iw_scale) > 0.0);
}

TEST_CASE("posterior covariances stay positive definite") {
    std::mt19937_64 rng(410);
    const auto model = test::simple_model(2, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pred = alive_mixture(rng, 2, 2, 3, 2, 2);
        const int m = 2 + trial % 3;
        Mat z(2, m);
        for (int i = 0; i < m; ++i) z.col(i) = test::random_vec(2, rng, 3.0);
        auto [post, diag] = update(pred, z, exhaustive_proposals(m), model);
        for (const auto& c : post.point) CHECK(min_eigenvalue(c.cov) > -1e-10);
        for (const auto& c : post.extended) CHECK(min_eigenvalue(c.traj.cov) > -1e-10);
    }
}

TEST_CASE("empty proposal list with measurements present is rejected") {
    std::mt19937_64 rng(411);
    const auto pred = alive_mixture(rng, 1, 0, 1, 2, 2);
    const auto model = test::simple_model(2, 2);
    Mat z(2, 1);
    z.col(0) = test::random_vec(2, rng, 1.0);
    CHECK_THROWS_AS(update(pred, z, {}, model), std::invalid_argument);
    CHECK_THROWS_AS(update(pred, z, {Partition{{0, 1}}}, model), std::invalid_argument);
}

TEST_CASE("point-only scenes reduce to the standard point TPHD update") {
    std::mt19937_64 rng(412);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = test::simple_model(2, 2, 0.9, 2.0, 0.05);
        const auto pred = alive_mixture(rng, 1 + trial % 3, 0, 2, 2, 2);
        const int m = 1 + trial % 4;
        Mat z(2, m);
        for (int i = 0; i < m; ++i) z.col(i) = test::random_vec(2, rng, 3.0);

        auto [post, diag] = update(pred, z, exhaustive_proposals(m), model);
        const auto ref = reference::point_tphd_update(pred, z, model);
        CHECK(test::mixtures_match(post, ref, 1e-12));

        // Multi-measurement cells carry no point mass: the all-singletons
        // partition takes all the weight.
        double singleton_weight = 0.0;
        const auto proposals = exhaustive_proposals(m);
        for (std::size_t p = 0; p < proposals.size(); ++p) {
            bool all_single = true;
            for (const auto& cell : proposals[p]) all_single &= cell.size() == 1;
            if (all_single) singleton_weight = diag.partition_weights[p];
        }
        CHECK(singleton_weight == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("extended-only scenes reduce to the standard extended TPHD update") {
    std::mt19937_64 rng(413);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = test::simple_model(2, 2, 0.9, 2.0, 0.05);
        const auto pred = alive_mixture(rng, 0, 1 + trial % 3, 2, 2, 2);
        const int m = 1 + trial % 4;
        Mat z(2, m);
        for (int i = 0; i < m; ++i) z.col(i) = test::random_vec(2, rng, 3.0);

        auto [post, diag] = update(pred, z, exhaustive_proposals(m), model);
        const auto ref = reference::extended_tphd_update(pred, z, exhaustive_proposals(m), model);
        CHECK(test::mixtures_match(post, ref, 1e-12));
    }
}

TEST_CASE("posterior mass matches the exhaustive measurement-density oracle") {
    std::mt19937_64 rng(414);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = test::simple_model(2, 2, 0.85, 2.0, 0.02);
        const auto pred = alive_mixture(rng, 2, 2, 2, 2, 2);
        const int m = 1 + trial % 5;
        Mat z(2, m);
        for (int i = 0; i < m; ++i) z.col(i) = test::random_vec(2, rng, 3.0);

        auto [post, diag] = update(pred, z, exhaustive_proposals(m), model);
        const oracle::MeasurementDensityOracle o(z, pred, model);
        const double expected = o.posterior_mass();
        CHECK(std::abs(total_mass(post) - expected) <= 1e-9 * expected);
        CHECK(std::abs(diag.posterior_mass - expected) <= 1e-9 * expected);
    }
}
