#include <doctest.h>

#include "tphd/reducer.hpp"

#include "support/builders.hpp"

#include <random>

using namespace tphd;

namespace {

PhdMixture point_mixture(std::mt19937_64& rng, int n, int time = 1) {
    PhdMixture mix;
    mix.time = time;
    mix.state_dim = 4;
    mix.extent_dim = 2;
    std::uniform_real_distribution<double> w(0.01, 1.0);
    for (int i = 0; i < n; ++i)
        mix.point.push_back(test::random_point_component(4, time, rng, w(rng), 1));
    return mix;
}

}  // namespace

TEST_CASE("weights at or below the pruning threshold are removed") {
    std::mt19937_64 rng(500);
    auto mix = point_mixture(rng, 2);
    mix.point[0].weight = 1e-6;
    mix.point[1].weight = 0.5;
    mix.point[1].mean += Vec::Constant(4, 100.0);  // far away, no absorption
    const auto out = prune_absorb(mix, 1e-5, 4.0, 100);
    REQUIRE(out.point.size() == 1);
    CHECK(out.point[0].weight == 0.5);
}

TEST_CASE("coincident components are absorbed into the heavier one") {
    std::mt19937_64 rng(501);
    auto mix = point_mixture(rng, 1);
    auto a = mix.point[0];
    a.weight = 0.3;
    auto b = a;
    b.weight = 0.4;
    b.track_id = a.track_id + 1;
    b.cov *= 2.0;  // distinguishable parameters, distance still zero
    mix.point = {a, b};
    const auto out = prune_absorb(mix, 1e-5, 4.0, 100);
    REQUIRE(out.point.size() == 1);
    CHECK(out.point[0].weight == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(out.point[0].track_id == b.track_id);
    CHECK((out.point[0].cov - b.cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("component cap keeps the largest weights") {
    std::mt19937_64 rng(502);
    PhdMixture mix;
    mix.time = 1;
    mix.state_dim = 4;
    mix.extent_dim = 2;
    for (int i = 0; i < 150; ++i) {
        auto c = test::random_point_component(4, 1, rng, 0.001 * (i + 1), 1);
        c.mean = Vec::Constant(4, 10.0 * i);  // spread out, no absorption
        c.cov = Mat::Identity(4, 4);
        mix.point.push_back(std::move(c));
    }
    const auto out = prune_absorb(mix, 1e-5, 4.0, 100);
    REQUIRE(out.point.size() == 100);
    double min_kept = 1.0;
    for (const auto& c : out.point) min_kept = std::min(min_kept, c.weight);
    CHECK(min_kept == doctest::Approx(0.001 * 51).epsilon(1e-12));
}

TEST_CASE("mass changes only by what pruning removes") {
    std::mt19937_64 rng(503);
    for (int trial = 0; trial < 20; ++trial) {
        auto mix = point_mixture(rng, 12);
        const double prune_threshold = 0.05;
        double pruned = 0.0;
        for (const auto& c : mix.point)
            if (c.weight <= prune_threshold) pruned += c.weight;
        const auto out = prune_absorb(mix, prune_threshold, 4.0, 100);
        CHECK(std::abs(total_mass(out) - total_mass(mix)) <= pruned + 1e-12);
        CHECK(out.point.size() <= mix.point.size());
    }
}

TEST_CASE("components with different birth times are never merged") {
    std::mt19937_64 rng(504);
    PhdMixture mix;
    mix.time = 3;
    mix.state_dim = 2;
    mix.extent_dim = 2;
    auto young = test::random_point_component(2, 1, rng, 0.4, 3);
    auto old = test::random_point_component(2, 3, rng, 0.5, 1);
    old.mean.tail(2) = young.mean;  // identical current state
    mix.point = {young, old};
    const auto out = prune_absorb(mix, 1e-5, 100.0, 10);
    CHECK(out.point.size() == 2);
}

TEST_CASE("extended components absorb on kinematics only, keeping survivor factors") {
    std::mt19937_64 rng(505);
    PhdMixture mix;
    mix.time = 1;
    mix.state_dim = 2;
    mix.extent_dim = 2;
    auto a = test::random_ggiw_component(2, 2, 1, rng, 0.3);
    auto b = a;
    b.traj.weight = 0.6;
    b.gamma_shape = a.gamma_shape + 5.0;  // very different rate law
    b.iw_dof = a.iw_dof + 7.0;
    mix.extended = {a, b};
    const auto out = prune_absorb(mix, 1e-5, 4.0, 10);
    REQUIRE(out.extended.size() == 1);
    CHECK(out.extended[0].traj.weight == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(out.extended[0].gamma_shape == b.gamma_shape);
    CHECK(out.extended[0].iw_dof == b.iw_dof);
}

TEST_CASE("lscan: window at or above the trajectory length is the identity") {
    std::mt19937_64 rng(506);
    PhdMixture mix;
    mix.time = 4;
    mix.state_dim = 2;
    mix.extent_dim = 2;
    mix.point.push_back(test::random_point_component(2, 4, rng, 0.5, 1));
    mix.extended.push_back(test::random_ggiw_component(2, 2, 3, rng, 0.5, 2));

    const auto same = lscan_apply(mix, 4);
    CHECK((same.point[0].cov - mix.point[0].cov).cwiseAbs().maxCoeff() == 0.0);
    CHECK((same.extended[0].traj.cov - mix.extended[0].traj.cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lscan truncates the active window and keeps the frozen mean") {
    std::mt19937_64 rng(507);
    PhdMixture mix;
    mix.time = 5;
    mix.state_dim = 2;
    mix.extent_dim = 2;
    mix.point.push_back(test::random_point_component(2, 5, rng, 0.5, 1));
    const auto before = mix.point[0];

    const auto out = lscan_apply(mix, 2);
    const auto& c = out.point[0];
    CHECK(c.active_length() == 2);
    CHECK(c.length() == 5);
    CHECK((c.mean - before.mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c.cov - before.cov.bottomRightCorner(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    const auto current = lscan_apply(mix, 1);
    CHECK(current.point[0].active_length() == 1);
    CHECK_THROWS_AS(lscan_apply(mix, 0), std::invalid_argument);
}
