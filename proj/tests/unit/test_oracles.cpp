#include <doctest.h>

#include <cmath>
#include <limits>

#include "dint/functions.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace testing_helpers;

TEST_SUITE("oracles") {
  TEST_CASE("grid_min examples") {
    const oracle::Grid1D g{-5, 5, 1000};
    const auto a = oracle::grid_min([](double y) { return std::abs(y) + (2 - y) * (2 - y) / 2; }, g);
    CHECK(std::abs(a.argmin - 1.0) <= 2 * a.step);
    const auto b = oracle::grid_min([](double y) { return (y - 3) * (y - 3); }, g);
    CHECK(std::abs(b.argmin - 3.0) <= 2 * b.step);
    const auto c = oracle::grid_min(
        [](double y) { return (y < 0 || y > 1) ? std::numeric_limits<double>::infinity() : y; }, g);
    CHECK(std::abs(c.argmin) <= 2 * c.step);
  }

  TEST_CASE("grid_min errors") {
    const auto inf = [](double) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(oracle::grid_min(inf, {-1, 1, 100}), oracle::OracleError);
    CHECK_THROWS_AS(oracle::grid_min([](double y) { return y; }, {1, -1, 100}), oracle::OracleError);
    CHECK_THROWS_AS(oracle::grid_min([](double y) { return y; }, {-1, 1, 10}), oracle::OracleError);
  }

  TEST_CASE("grid_min agrees with analytic minimizers of library prox problems") {
    // argmin f(y) + (x - y)^2 / 2 for 1-D library atoms
    const oracle::Grid1D g{-10, 10, 2000};
    for (double x : {-4.0, -0.3, 0.7, 3.5}) {
      const auto a = dint::l1_norm(1);
      const auto m = oracle::grid_min([&](double y) { return a.eval(vec({y})) + (x - y) * (x - y) / 2; }, g);
      CHECK(std::abs(m.argmin - a.prox(1.0, vec({x}))(0)) <= 2 * m.step);
    }
  }

  TEST_CASE("fd_grad examples") {
    const auto half = [](const oracle::Vec& v) { return 0.5 * v.squaredNorm(); };
    CHECK(std::abs(oracle::fd_grad(half, vec({3}), 1e-5)(0) - 3.0) <= 1e-6);
    const auto constant = [](const oracle::Vec&) { return 4.0; };
    CHECK(oracle::fd_grad(constant, vec({1, 2}), 1e-5).norm() == 0.0);
    const dint::DirectIntegralFunction f(scalar_field({1}), {dint::l1_norm(1)});
    const auto env = [&](const oracle::Vec& v) { return dint::di_envelope(f, 1.0, dint::BlockVector({v})); };
    CHECK(std::abs(oracle::fd_grad(env, vec({2}), 1e-5)(0) - 1.0) <= 1e-5);
    const auto inf = [](const oracle::Vec&) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(oracle::fd_grad(inf, vec({0}), 1e-5), oracle::OracleError);
  }

  TEST_CASE("quad_solve examples") {
    using M = oracle::Mat;
    oracle::QuadInstance a{M::Identity(1, 1), vec({-1}), {1.0}, {M::Identity(1, 1)}, {M::Identity(1, 1)}, {vec({0})}};
    CHECK(oracle::quad_solve(a)(0) == doctest::Approx(0.5));
    oracle::QuadInstance b{M::Identity(1, 1), vec({0}), {1.0}, {M::Identity(1, 1)}, {M::Zero(1, 1)}, {vec({0})}};
    CHECK(oracle::quad_solve(b)(0) == doctest::Approx(0.0));
    oracle::QuadInstance c{M::Zero(1, 1),
                           vec({0}),
                           {1.0, 2.0},
                           {M::Identity(1, 1), M::Identity(1, 1)},
                           {M::Identity(1, 1), M::Identity(1, 1)},
                           {vec({-3}), vec({0})}};
    CHECK(oracle::quad_solve(c)(0) == doctest::Approx(1.0));
    oracle::QuadInstance s{M::Zero(1, 1), vec({0}), {1.0}, {M::Identity(1, 1)}, {M::Zero(1, 1)}, {vec({0})}};
    CHECK_THROWS_AS(oracle::quad_solve(s), oracle::OracleError);
  }
}
