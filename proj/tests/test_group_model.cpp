#include "equifact/group_model.hpp"

#include "equifact/builders.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace equifact;

namespace {

GroupSystem z_word_ball(int radius) {
  Matrix gen(2, 2);
  gen << 2.0, 0.0, 0.0, 0.5;
  WordGenerator a{"a", gen, {0}};
  return GroupSystem::word_ball({a}, radius, {}, FiniteProbSpace::uniform(1));
}

}  // namespace

TEST_CASE("group construction validates the tables") {
  const auto space = FiniteProbSpace::uniform(2);
  Matrix pi(2, 2);
  pi << 1, 1, 0, -1;

  SUBCASE("worked Z/2 example is accepted") {
    CHECK_NOTHROW(cyclic_group(2, pi, {1, 0}, space));
  }
  SUBCASE("non-homomorphic rep is rejected") {
    Matrix bad(2, 2);
    bad << 1, 1, 0, -1.001;  // squares away from the identity
    CHECK_THROWS_WITH_AS(cyclic_group(2, bad, {1, 0}, space),
                         doctest::Contains("homomorphism"), std::invalid_argument);
  }
  SUBCASE("weight-breaking action is rejected") {
    Vector w(2);
    w << 0.25, 0.75;
    CHECK_THROWS_WITH_AS(cyclic_group(2, pi, {1, 0}, FiniteProbSpace(w)),
                         doctest::Contains("weight"), std::invalid_argument);
  }
}

TEST_CASE("semidirect multiplication and inverse") {
  testing::Z2Worked fixture;
  const GroupSystem& g = fixture.group;
  const int s = 1;

  SUBCASE("identity acts trivially") {
    Vector xi(2);
    xi << 0.3, -2.0;
    const SemidirectElement a{xi, s};
    const auto left = sd_mul(sd_identity(g), a, g);
    CHECK((left.xi - xi).cwiseAbs().maxCoeff() == 0.0);
    CHECK(left.s == s);
  }
  SUBCASE("one-dimensional sign representation") {
    Matrix minus(1, 1);
    minus << -1.0;
    const auto h = cyclic_group(2, minus, {0}, FiniteProbSpace::uniform(1));
    const SemidirectElement a{Vector::Ones(1), 1};
    const SemidirectElement b{Vector::Ones(1), 0};
    const auto product = sd_mul(a, b, h);
    CHECK(product.xi[0] == doctest::Approx(0.0));
    CHECK(product.s == 1);
    const auto inv = sd_inv(a, h);
    CHECK(inv.xi[0] == doctest::Approx(1.0));
    CHECK(inv.s == 1);
  }
  SUBCASE("conjugation formula (eta + pi(t)xi - pi(t s t^-1)eta, t s t^-1)") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 100; ++rep) {
      const SemidirectElement x{testing::random_vector(2, rng), rep % 2};
      const SemidirectElement h{testing::random_vector(2, rng), (rep / 2) % 2};
      const auto lhs = sd_mul(sd_mul(h, x, g), sd_inv(h, g), g);
      const int conj = g.multiply(g.multiply(h.s, x.s), g.inverse(h.s));
      const Vector expected =
          h.xi + g.rep(h.s) * x.xi - g.rep(conj) * h.xi;
      CHECK(lhs.s == conj);
      CHECK((lhs.xi - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("associativity and two-sided inverses on random triples") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 1000; ++rep) {
      const SemidirectElement a{testing::random_vector(2, rng), rep % 2};
      const SemidirectElement b{testing::random_vector(2, rng), (rep / 2) % 2};
      const SemidirectElement c{testing::random_vector(2, rng), (rep / 4) % 2};
      const auto left = sd_mul(sd_mul(a, b, g), c, g);
      const auto right = sd_mul(a, sd_mul(b, c, g), g);
      CHECK(left.s == right.s);
      CHECK((left.xi - right.xi).cwiseAbs().maxCoeff() < 1e-12);

      const auto product = sd_mul(a, sd_inv(a, g), g);
      CHECK(product.s == g.identity());
      CHECK(product.xi.cwiseAbs().maxCoeff() < 1e-12);
      const auto product2 = sd_mul(sd_inv(a, g), a, g);
      CHECK(product2.s == g.identity());
      CHECK(product2.xi.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("uniform bound") {
  SUBCASE("orthogonal representation has bound 1") {
    Matrix rot(2, 2);
    const double c = std::cos(2.0 * M_PI / 8.0);
    const double s = std::sin(2.0 * M_PI / 8.0);
    rot << c, -s, s, c;
    const auto g = cyclic_group(8, rot, cyclic_shift(8, 1), FiniteProbSpace::uniform(8));
    CHECK(uniform_bound(g) == doctest::Approx(1.0));
  }
  SUBCASE("worked Z/2 matrix has the golden ratio as largest singular value") {
    testing::Z2Worked fixture;
    CHECK(uniform_bound(fixture.group) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
  }
  SUBCASE("Z word ball of radius 5 reaches 2^5") {
    CHECK(uniform_bound(z_word_ball(5)) == doctest::Approx(32.0));
  }
}

TEST_CASE("word balls") {
  const auto g = z_word_ball(5);
  CHECK(g.size() == 11);  // e, a..a^5, A..A^5
  CHECK(g.truncated());
  CHECK(g.identity() == g.index_of("e"));
  CHECK(g.index_of("aaa") >= 0);
  CHECK(g.multiply(g.index_of("aaa"), g.index_of("aaa")) == -1);  // leaves the ball
  CHECK(g.multiply(g.index_of("aaa"), g.index_of("AA")) == g.index_of("a"));
  CHECK(g.inverse(g.index_of("aaa")) == g.index_of("AAA"));
  CHECK(g.word_length(g.index_of("aaa")) == 3);

  SUBCASE("sd ops report products outside the ball") {
    const SemidirectElement a{Vector::Zero(2), g.index_of("aaa")};
    CHECK_THROWS_AS(sd_mul(a, a, g), std::domain_error);
  }
  SUBCASE("relations fold the ball into a finite group") {
    Matrix third(2, 2);
    const double c = std::cos(2.0 * M_PI / 3.0);
    const double s = std::sin(2.0 * M_PI / 3.0);
    third << c, -s, s, c;
    WordGenerator a{"a", third, {0}};
    const auto z3 = GroupSystem::word_ball({a}, 4, {{"aaa", ""}, {"A", "aa"}},
                                           FiniteProbSpace::uniform(1));
    CHECK(z3.size() == 3);
    CHECK(z3.multiply(z3.index_of("aa"), z3.index_of("aa")) == z3.index_of("a"));
  }
}

TEST_CASE("sin_check radii") {
  SUBCASE("unitary rep at eps=1 gives radius 1/2") {
    Matrix rot(2, 2);
    const double c = std::cos(M_PI / 2.0);
    const double s = std::sin(M_PI / 2.0);
    rot << c, -s, s, c;
    const auto g = cyclic_group(4, rot, cyclic_shift(4, 1), FiniteProbSpace::uniform(4));
    const auto report = sin_check(g, {1.0});
    CHECK(report.certified);
    CHECK(report.entries[0].invariant_radius == doctest::Approx(0.5));
    CHECK(report.entries[0].pass);
  }
  SUBCASE("worked rep radius 1/(1+golden)") {
    testing::Z2Worked fixture;
    const auto report = sin_check(fixture.group, {1.0});
    CHECK(report.entries[0].invariant_radius ==
          doctest::Approx(1.0 / (1.0 + (1.0 + std::sqrt(5.0)) / 2.0)));
    CHECK(report.entries[0].pass);
  }
  SUBCASE("unbounded diagonal family flags empirical growth") {
    for (int radius : {3, 4, 5}) {
      const auto report = sin_check(z_word_ball(radius), {1.0});
      CHECK_FALSE(report.certified);
      CHECK(report.growth_detected);
      CHECK(report.entries[0].invariant_radius ==
            doctest::Approx(1.0 / (1.0 + std::pow(2.0, radius))));
      CHECK(report.entries[0].pass);
    }
  }
}

TEST_CASE("gaussian positive definite function") {
  CHECK(pdf_gaussian(Matrix::Identity(3, 3), Vector::Zero(3)) == 1.0);
  Vector e1 = Vector::Zero(3);
  e1[0] = 1.0;
  CHECK(pdf_gaussian(Matrix::Identity(3, 3), e1) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(pdf_gaussian(Matrix::Zero(2, 2), Vector::Ones(2)), std::invalid_argument);

  SUBCASE("invariance under the unitarized worked representation") {
    testing::Z2Worked fixture;
    const Matrix gram = averaged_gram(fixture.group);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Matrix v = eig.operatorSqrt();
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 100; ++rep) {
      const Vector xi = testing::random_vector(2, rng);
      const double direct = pdf_gaussian(v, xi);
      const double moved = pdf_gaussian(v, fixture.group.rep(1) * xi);
      CHECK(std::abs(direct - moved) <= 1e-12);
    }
  }
}

TEST_CASE("extended positive definite function is a class function") {
  testing::Z2Worked fixture;
  const GroupSystem& g = fixture.group;
  const Matrix gram = averaged_gram(g);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Matrix v = eig.operatorSqrt();
  const auto f = [&](const Vector& xi) { return pdf_gaussian(v, xi); };

  CHECK(pdf_extend(f, sd_identity(g), g) == 1.0);
  CHECK(pdf_extend(f, {Vector::Ones(2), 1}, g) == 0.0);

  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 1000; ++rep) {
    const SemidirectElement h{testing::random_vector(2, rng), rep % 2};
    const SemidirectElement x{testing::random_vector(2, rng), (rep / 2) % 2};
    const auto conjugated = sd_mul(sd_mul(h, x, g), sd_inv(h, g), g);
    CHECK(std::abs(pdf_extend(f, conjugated, g) - pdf_extend(f, x, g)) <= 1e-12);
  }
}

TEST_CASE("averaged gram") {
  SUBCASE("unitary rep averages to the identity") {
    Matrix rot(2, 2);
    const double c = std::cos(2.0 * M_PI / 6.0);
    const double s = std::sin(2.0 * M_PI / 6.0);
    rot << c, -s, s, c;
    const auto g = cyclic_group(6, rot, cyclic_shift(6, 1), FiniteProbSpace::uniform(6));
    CHECK((averaged_gram(g) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("worked Z/2 example") {
    testing::Z2Worked fixture;
    Matrix expected(2, 2);
    expected << 1.0, 0.5, 0.5, 1.5;
    CHECK((averaged_gram(fixture.group) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("the representation fixes its averaged gram") {
    testing::Z2Worked fixture;
    const Matrix gram = averaged_gram(fixture.group);
    for (int s = 0; s < fixture.group.size(); ++s) {
      const Matrix& pi = fixture.group.rep(s);
      CHECK((pi.transpose() * gram * pi - gram).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("norm equivalence against the sup norm") {
    testing::Z2Worked fixture;
    const Matrix gram = averaged_gram(fixture.group);
    const double bound = uniform_bound(fixture.group);
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 200; ++rep) {
      const Vector xi = testing::random_vector(2, rng);
      const double quad = xi.dot(gram * xi);
      const double norm2 = xi.squaredNorm();
      CHECK(quad >= norm2 / (bound * bound) - 1e-12);
      CHECK(quad <= bound * bound * norm2 + 1e-12);
      const double sup = sup_norm_oracle(fixture.group, xi);
      CHECK(quad <= sup * sup + 1e-12);
      CHECK(sup <= bound * xi.norm() + 1e-12);
    }
  }
}

TEST_CASE("covariance residual and equivariant averaging") {
  testing::Z2Worked fixture;
  CHECK(covariance_residual(fixture.T, fixture.group) <= 1e-12);

  std::mt19937_64 rng(23);
  Matrix t0(2, 2);
  t0 << 0.7, -0.1, 0.4, 1.3;
  const EquivariantMap averaged = project_equivariant(t0, fixture.group);
  CHECK(covariance_residual(averaged, fixture.group) <= 1e-12);

  SUBCASE("a generic map is not covariant") {
    EquivariantMap generic{t0};
    CHECK(covariance_residual(generic, fixture.group) > 1e-3);
  }
  SUBCASE("averaging is refused for word balls") {
    CHECK_THROWS_AS(project_equivariant(Matrix::Identity(1, 2), z_word_ball(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("complex structure helpers") {
  const Matrix j = standard_complex_structure(4);
  CHECK((j * j + Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  // Real block form of the complex matrix [[i, 0], [0, -i]].
  Matrix m = Matrix::Zero(4, 4);
  m(0, 2) = -1.0;
  m(1, 3) = 1.0;
  m(2, 0) = 1.0;
  m(3, 1) = -1.0;
  CHECK(complex_structure_residual(m, j) == 0.0);
  const Eigen::MatrixXcd mc = complex_from_real(m);
  CHECK(mc(0, 0) == std::complex<double>(0.0, 1.0));
  CHECK(mc(1, 1) == std::complex<double>(0.0, -1.0));
  CHECK(std::abs(mc(0, 1)) == 0.0);

  Vector v(4);
  v << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXcd vc = complex_vector(v);
  CHECK(vc(0) == std::complex<double>(1.0, 3.0));
  CHECK(vc(1) == std::complex<double>(2.0, 4.0));
}
