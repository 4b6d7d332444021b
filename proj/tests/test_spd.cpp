#include <doctest.h>

#include "tphd/spd.hpp"

#include <cmath>
#include <stdexcept>

using namespace tphd;

TEST_CASE("SymPosDef validates its input") {
    Mat good(2, 2);
    good << 4.0, 1.0, 1.0, 3.0;
    const SymPosDef spd(good);
    CHECK(spd.dim() == 2);
    CHECK(spd.log_det() == doctest::Approx(std::log(11.0)).epsilon(1e-12));

    Mat asym(2, 2);
    asym << 4.0, 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(SymPosDef{asym}, std::domain_error);

    Mat indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(SymPosDef{indef}, std::domain_error);
}

TEST_CASE("symmetric square root reproduces the matrix") {
    Mat m(2, 2);
    m << 2.5, 0.7, 0.7, 1.2;
    const Mat root = symmetric_sqrt(m);
    CHECK((root * root - m).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(is_symmetric(root, 1e-10));
    CHECK_THROWS_AS(symmetric_sqrt(-Mat::Identity(2, 2)), std::domain_error);
}

TEST_CASE("ensure_spd repairs marginal matrices") {
    Mat singular = Mat::Zero(2, 2);
    singular(0, 0) = 1.0;
    const Mat fixed = ensure_spd(singular);
    CHECK(min_eigenvalue(fixed) > 0.0);

    Mat fine(2, 2);
    fine << 3.0, 0.5, 0.5, 2.0;
    CHECK((ensure_spd(fine) - fine).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve matches explicit inverse") {
    Mat m(3, 3);
    m << 4, 1, 0, 1, 3, 1, 0, 1, 5;
    const SymPosDef spd(m);
    Vec b(3);
    b << 1, 2, 3;
    CHECK((spd.solve(b) - m.inverse() * b).cwiseAbs().maxCoeff() < 1e-12);
}
