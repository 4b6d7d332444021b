#include <doctest.h>

#include "tphd/assignment.hpp"
#include "tphd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace tphd;

namespace {

TimedTrack straight_track(int start, int len, double x0, double y0, double vy,
                          std::uint64_t id) {
    TimedTrack t;
    t.start = start;
    t.id = id;
    for (int i = 0; i < len; ++i) t.positions.emplace_back(x0, y0 + vy * i);
    return t;
}

}  // namespace

TEST_CASE("perfect estimates score zero") {
    const auto truth = straight_track(1, 10, 0.0, 0.0, 2.0, 0);
    const auto r = trajectory_metric({truth}, {truth}, 10, MetricConfig{});
    CHECK(r.total == 0.0);
    CHECK(r.localization == 0.0);
    CHECK(r.missed == 0.0);
    CHECK(r.false_alarm == 0.0);
    CHECK(r.track_switch == 0.0);
}

TEST_CASE("all-missed truth accumulates half cutoff cost per step") {
    const auto truth = straight_track(1, 10, 0.0, 0.0, 2.0, 0);
    const auto r = trajectory_metric({truth}, {}, 10, MetricConfig{});
    CHECK(r.missed == doctest::Approx(std::sqrt(10.0 * 100.0 * 100.0 / 2.0)).epsilon(1e-12));
    CHECK(r.missed == doctest::Approx(223.606797749979).epsilon(1e-10));
    CHECK(r.total == doctest::Approx(r.missed).epsilon(1e-13));
    CHECK(r.localization == 0.0);
    CHECK(r.false_alarm == 0.0);
}

TEST_CASE("a constant one-meter offset accumulates localization error only") {
    const auto truth = straight_track(1, 10, 0.0, 0.0, 2.0, 0);
    const auto est = straight_track(1, 10, 1.0, 0.0, 2.0, 7);
    const auto r = trajectory_metric({truth}, {est}, 10, MetricConfig{});
    CHECK(r.localization == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK(r.total == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK(r.track_switch == 0.0);
}

TEST_CASE("an estimate identity change pays the switch penalty once") {
    const auto truth = straight_track(1, 10, 0.0, 0.0, 2.0, 0);
    auto first = straight_track(1, 5, 0.0, 0.0, 2.0, 1);
    auto second = straight_track(6, 5, 0.0, 10.0, 2.0, 2);
    const auto r = trajectory_metric({truth}, {first, second}, 10, MetricConfig{});
    CHECK(r.track_switch == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.localization == 0.0);

    // Decomposition additivity.
    const double total_p = r.localization * r.localization + r.missed * r.missed +
                           r.false_alarm * r.false_alarm + r.track_switch * r.track_switch;
    CHECK(r.total * r.total == doctest::Approx(total_p).epsilon(1e-12));
}

TEST_CASE("normalization divides accumulated cost by the window") {
    const auto truth = straight_track(1, 10, 0.0, 0.0, 2.0, 0);
    MetricConfig cfg;
    cfg.normalize_by_window = true;
    const auto r = trajectory_metric({truth}, {}, 10, cfg);
    CHECK(r.missed == doctest::Approx(std::sqrt(100.0 * 100.0 / 2.0)).epsilon(1e-12));
}

TEST_CASE("spurious estimates never decrease the false component") {
    std::mt19937_64 rng(700);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<TimedTrack> truth, est;
        const int n_truth = 1 + trial % 3;
        for (int i = 0; i < n_truth; ++i)
            truth.push_back(straight_track(1 + trial % 4, 8, u(rng), u(rng), 1.0,
                                           static_cast<std::uint64_t>(i)));
        for (int i = 0; i < trial % 3; ++i)
            est.push_back(straight_track(1, 10, u(rng), u(rng), 1.0,
                                         static_cast<std::uint64_t>(100 + i)));
        const auto base = trajectory_metric(truth, est, 12, MetricConfig{});
        est.push_back(straight_track(2, 9, u(rng), u(rng), 1.0, 999));
        const auto more = trajectory_metric(truth, est, 12, MetricConfig{});
        CHECK(more.false_alarm >= base.false_alarm - 1e-12);
    }
}

TEST_CASE("swapping the arguments swaps miss and false and keeps the total") {
    std::mt19937_64 rng(701);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    MetricConfig cfg;
    cfg.switch_penalty = 0.0;  // switch handling is truth-sided, so neutralize it
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TimedTrack> a, b;
        for (int i = 0; i < 1 + trial % 3; ++i)
            a.push_back(straight_track(1 + i, 6, u(rng), u(rng), 1.0,
                                       static_cast<std::uint64_t>(i)));
        for (int i = 0; i < 1 + (trial + 1) % 3; ++i)
            b.push_back(straight_track(1 + i, 7, u(rng), u(rng), 1.0,
                                       static_cast<std::uint64_t>(50 + i)));
        const auto ab = trajectory_metric(a, b, 10, cfg);
        const auto ba = trajectory_metric(b, a, 10, cfg);
        CHECK(ab.total == doctest::Approx(ba.total).epsilon(1e-12));
        CHECK(ab.missed == doctest::Approx(ba.false_alarm).epsilon(1e-12));
        CHECK(ab.false_alarm == doctest::Approx(ba.missed).epsilon(1e-12));
        CHECK(ab.localization == doctest::Approx(ba.localization).epsilon(1e-12));
    }
}

TEST_CASE("rms over runs") {
    MetricResult a;
    a.total = 3.0;
    MetricResult b;
    b.total = 4.0;
    CHECK(rms_over_runs({a}).total == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(rms_over_runs({a, b}).total == doctest::Approx(std::sqrt(12.5)).epsilon(1e-14));
    CHECK(rms_over_runs({a, b}).total == doctest::Approx(3.536).epsilon(1e-3));
    CHECK_THROWS_AS(rms_over_runs({}), std::invalid_argument);
}

TEST_CASE("assignment solver matches brute force on small matrices") {
    std::mt19937_64 rng(702);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + trial % 5;  // up to 6x6
        Mat cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = u(rng);

        const auto sol = solve_assignment(cost);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double c = 0.0;
            for (int i = 0; i < n; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(sol.total_cost == doctest::Approx(best).epsilon(1e-12));

        std::vector<bool> used(static_cast<std::size_t>(n), false);
        for (int c : sol.row_to_col) {
            REQUIRE(c >= 0);
            CHECK_FALSE(used[static_cast<std::size_t>(c)]);
            used[static_cast<std::size_t>(c)] = true;
        }
    }
}
