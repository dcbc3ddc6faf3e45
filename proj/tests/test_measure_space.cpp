#include "equifact/measure_space.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <random>

using namespace equifact;

namespace {

L0Vector phi3142() {
  L0Vector phi(4);
  phi << 3, 1, 4, 2;
  return phi;
}

}  // namespace

TEST_CASE("space validation") {
  CHECK_THROWS_AS(FiniteProbSpace{Vector(Vector::Zero(0))}, std::invalid_argument);
  Vector bad(2);
  bad << 0.5, 0.4;
  CHECK_THROWS_AS(FiniteProbSpace{bad}, std::invalid_argument);
  bad << 1.5, -0.5;
  CHECK_THROWS_AS(FiniteProbSpace{bad}, std::invalid_argument);
  CHECK_NOTHROW(FiniteProbSpace::uniform(7));
}

TEST_CASE("rearrangement on the worked vector") {
  const auto space = FiniteProbSpace::uniform(4);
  const L0Vector phi = phi3142();
  CHECK(rearrangement(phi, space, 0.25) == doctest::Approx(3.0));
  CHECK(rearrangement(phi, space, 0.5) == doctest::Approx(2.0));
  CHECK(rearrangement(phi, space, 0.0) == doctest::Approx(4.0));
  CHECK(rearrangement(L0Vector::Zero(4), space, 0.3) == 0.0);
  CHECK_THROWS_AS(rearrangement(phi, space, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(rearrangement(L0Vector::Zero(3), space, 0.5), std::invalid_argument);
}

TEST_CASE("rearrangement is non-increasing and positively homogeneous") {
  std::mt19937_64 rng(7);
  const auto space = FiniteProbSpace::uniform(9);
  for (int rep = 0; rep < 50; ++rep) {
    const L0Vector phi = testing::random_vector(9, rng);
    double previous = rearrangement(phi, space, 0.0);
    for (int k = 1; k <= 20; ++k) {
      const double t = static_cast<double>(k) / 20.0;
      const double value = rearrangement(phi, space, t);
      CHECK(value <= previous);
      previous = value;
    }
    const double c = 2.5;
    for (double t : {0.1, 0.35, 0.72}) {
      CHECK(rearrangement(c * phi, space, t) == doctest::Approx(c * rearrangement(phi, space, t)));
    }
  }
}

TEST_CASE("tail measure") {
  const auto space = FiniteProbSpace::uniform(4);
  const L0Vector phi = phi3142();
  CHECK(tail_measure(phi, space, 2.0) == doctest::Approx(0.5));
  CHECK(tail_measure(phi, space, 4.0) == 0.0);  // strict inequality at the max
  CHECK_THROWS_AS(tail_measure(phi, space, -1.0), std::invalid_argument);
}

TEST_CASE("tail_measure(phi, phi*(delta)) <= delta on a grid") {
  std::mt19937_64 rng(11);
  const auto space = FiniteProbSpace::uniform(12);
  for (int rep = 0; rep < 20; ++rep) {
    const L0Vector phi = testing::random_vector(12, rng);
    for (int k = 1; k <= 100; ++k) {
      const double delta = static_cast<double>(k) / 100.0;
      CHECK(tail_measure(phi, space, rearrangement(phi, space, delta)) <= delta);
    }
  }
}

TEST_CASE("boundedness profile of small maps") {
  SUBCASE("single atom scalar") {
    const auto space = FiniteProbSpace::uniform(1);
    Matrix T(1, 1);
    T << 2.0;
    Vector grid(4);
    grid << 0.5, 1.5, 2.0, 2.5;
    const auto profile = boundedness_profile(T, space, grid);
    CHECK(profile.masses[0] == 1.0);
    CHECK(profile.masses[1] == 1.0);
    CHECK(profile.masses[2] == 1.0);  // row norm 2 >= 2
    CHECK(profile.masses[3] == 0.0);
  }
  SUBCASE("identity on two atoms") {
    const auto space = FiniteProbSpace::uniform(2);
    const Matrix T = Matrix::Identity(2, 2);
    Vector grid(2);
    grid << 0.5, 1.5;
    const auto profile = boundedness_profile(T, space, grid);
    CHECK(profile.masses[0] == 1.0);
    CHECK(profile.masses[1] == 0.0);
  }
  SUBCASE("zero map") {
    const auto space = FiniteProbSpace::uniform(3);
    const Matrix T = Matrix::Zero(3, 2);
    const auto profile = boundedness_profile(T, space, default_lambda_grid(T));
    CHECK(profile.masses.maxCoeff() == 0.0);
  }
}

TEST_CASE("profile masses are non-increasing and vanish above the max row norm") {
  std::mt19937_64 rng(3);
  const auto space = FiniteProbSpace::uniform(10);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix T(10, 3);
    for (Index i = 0; i < T.size(); ++i) {
      T.data()[i] = testing::random_vector(1, rng)[0];
    }
    const auto profile = boundedness_profile(T, space, default_lambda_grid(T));
    for (Index k = 1; k < profile.masses.size(); ++k) {
      CHECK(profile.masses[k] <= profile.masses[k - 1]);
    }
    CHECK(profile.masses[profile.masses.size() - 1] == 0.0);
    CHECK(profile.masses.minCoeff() >= 0.0);
    CHECK(profile.masses.maxCoeff() <= 1.0);
  }
}

TEST_CASE("profile dominates sampled tails and k_of_t bounds the rearrangement") {
  std::mt19937_64 rng(19);
  const auto space = FiniteProbSpace::uniform(8);
  Matrix T(8, 3);
  for (Index i = 0; i < T.size(); ++i) {
    T.data()[i] = testing::random_vector(1, rng)[0];
  }
  const auto profile = boundedness_profile(T, space, default_lambda_grid(T));
  for (int rep = 0; rep < 1000; ++rep) {
    const Vector xi = testing::random_unit(3, rng);
    const L0Vector image = T * xi;
    for (Index k = 0; k < profile.thresholds.size(); ++k) {
      CHECK(tail_measure(image, space, profile.thresholds[k]) <= profile.masses[k]);
    }
    for (double t : {0.1, 0.3, 0.9}) {
      const auto bound = k_of_t(profile, t);
      CHECK(rearrangement(image, space, t) <= bound.value);
    }
  }
}

TEST_CASE("k_of_t") {
  BoundednessProfile profile;
  profile.thresholds = Vector::LinSpaced(5, 1.0, 5.0);  // 1,2,3,4,5
  profile.masses = Vector::Zero(5);
  profile.masses << 1.0, 1.0, 0.4, 0.4, 0.0;

  CHECK(k_of_t(profile, 0.5).value == 3.0);
  CHECK_FALSE(k_of_t(profile, 0.5).extrapolated);
  CHECK(k_of_t(profile, 1.0 + 1e-9).value == 1.0);
  SUBCASE("first zero crossing at t = 1 needs mass strictly below 1") {
    CHECK(k_of_t(profile, 1.0).value == 3.0);
  }
  SUBCASE("profile identically zero returns the smallest grid point") {
    BoundednessProfile zero;
    zero.thresholds = profile.thresholds;
    zero.masses = Vector::Zero(5);
    CHECK(k_of_t(zero, 0.01).value == 1.0);
  }
  SUBCASE("extrapolation doubles the top threshold") {
    BoundednessProfile stuck;
    stuck.thresholds = profile.thresholds;
    stuck.masses = Vector::Constant(5, 0.9);
    const auto bound = k_of_t(stuck, 0.5);
    CHECK(bound.value == 10.0);
    CHECK(bound.extrapolated);
  }
  CHECK_THROWS_AS(k_of_t(profile, 0.0), std::invalid_argument);
}
