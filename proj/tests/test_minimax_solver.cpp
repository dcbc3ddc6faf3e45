#include "equifact/minimax_solver.hpp"

#include "equifact/builders.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace equifact;

namespace {

SaddleProblem identity2_problem(double eps = 1.0) {
  const auto space = FiniteProbSpace::uniform(2);
  return {space, trivial_group(space, 2), EquivariantMap{Matrix::Identity(2, 2)}, eps};
}

SaddleProblem scalar_problem(double c, double eps = 1.0) {
  const auto space = FiniteProbSpace::uniform(1);
  Matrix T(1, 1);
  T << c;
  return {space, trivial_group(space, 1), EquivariantMap{T}, eps};
}

L0Vector make_phi(std::initializer_list<double> values) {
  L0Vector phi(static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) {
    phi[i++] = v;
  }
  return phi;
}

}  // namespace

TEST_CASE("eval_F on the two-atom identity instance") {
  const auto p = identity2_problem();
  CHECK(eval_F(make_phi({1.0, 1.0}), p).value == doctest::Approx(0.5));
  CHECK(eval_F(make_phi({0.0, 0.0}), p).value == doctest::Approx(0.0));

  const auto ev = eval_F(make_phi({1.0, 0.0}), p);
  CHECK(ev.value == doctest::Approx(0.5));
  CHECK(std::abs(ev.witness[0]) == doctest::Approx(1.0));
  CHECK(std::abs(ev.witness[1]) == doctest::Approx(0.0));
  CHECK(ev.psi[0] == doctest::Approx(1.0));

  L0Vector bad = make_phi({1.0, 1.0});
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eval_F(bad, p), std::invalid_argument);
}

TEST_CASE("inner_min greedy solutions") {
  const auto space = FiniteProbSpace::uniform(2);
  const BSet b{1.0};

  SUBCASE("constant psi is tight at the mass constraint") {
    const auto result = inner_min(make_phi({3.0, 3.0}), b, space);
    CHECK(result.value == doctest::Approx(3.0 * 0.5));
  }
  SUBCASE("mass goes to the small atom") {
    const auto result = inner_min(make_phi({0.0, 10.0}), b, space);
    CHECK(result.value == doctest::Approx(0.0));
    CHECK(result.argmin[0] == doctest::Approx(1.0));
    CHECK(result.argmin[1] == doctest::Approx(0.0));
  }
  SUBCASE("zero psi") {
    CHECK(inner_min(make_phi({0.0, 0.0}), b, space).value == 0.0);
  }
  SUBCASE("vacuous constraint at eps >= 2") {
    const auto result = inner_min(make_phi({1.0, 2.0}), BSet{2.5}, space);
    CHECK(result.value == 0.0);
    CHECK(result.argmin.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(inner_min(make_phi({-1.0, 0.0}), b, space), std::invalid_argument);
}

TEST_CASE("project_B") {
  const auto space = FiniteProbSpace::uniform(2);
  const BSet b{1.0};

  SUBCASE("points of B are fixed") {
    const L0Vector phi = make_phi({0.75, 0.5});
    CHECK((project_B(phi, b, space) - phi).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("zero projects onto the mass face") {
    const L0Vector projected = project_B(make_phi({0.0, 0.0}), b, space);
    CHECK(projected[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(projected[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.contains(projected, space));
  }
  SUBCASE("box clipping") {
    const L0Vector projected = project_B(make_phi({2.0, 2.0}), b, space);
    CHECK(projected[0] == 1.0);
    CHECK(projected[1] == 1.0);
  }
  SUBCASE("idempotence on random points") {
    std::mt19937_64 rng(3);
    const auto big_space = FiniteProbSpace::uniform(7);
    for (int rep = 0; rep < 100; ++rep) {
      const L0Vector phi = 2.0 * testing::random_vector(7, rng);
      const L0Vector once = project_B(phi, b, big_space);
      const L0Vector twice = project_B(once, b, big_space);
      CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(b.contains(once, big_space));
    }
  }
}

TEST_CASE("solve_saddle on the worked instances") {
  SUBCASE("two-atom identity: f* = 1/4 at phi = (1/2, 1/2)") {
    const auto sol = solve_saddle(identity2_problem(), {});
    CHECK(sol.converged);
    CHECK(sol.duality_gap <= 1e-8);
    CHECK(sol.f_star == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(sol.phi0[0] == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(sol.phi0[1] == doctest::Approx(0.5).epsilon(1e-5));
  }
  SUBCASE("scalar instance: f* = c^2/2 at phi = 1/2") {
    const auto sol = solve_saddle(scalar_problem(2.0), {});
    CHECK(sol.converged);
    CHECK(sol.f_star == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(sol.phi0[0] == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("zero operator") {
    const auto space = FiniteProbSpace::uniform(2);
    const SaddleProblem p{space, trivial_group(space, 2), EquivariantMap{Matrix::Zero(2, 2)}, 1.0};
    const auto sol = solve_saddle(p, {});
    CHECK(sol.converged);
    CHECK(sol.f_star == 0.0);
    CHECK(sol.duality_gap == 0.0);
    // Min-norm element of B: the constant 1 - eps/2.
    CHECK(sol.phi0[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sol.phi0[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("Z/2 swap instance is exactly symmetrized") {
    testing::Z2Worked fixture;
    const SaddleProblem p{fixture.space, fixture.group, fixture.T, 1.0};
    const auto sol = solve_saddle(p, {});
    CHECK(sol.invariance_residual <= 1e-8);
    CHECK(sol.duality_gap <= 1e-8);
    CHECK(sol.phi0[0] == doctest::Approx(sol.phi0[1]));
  }
  SUBCASE("trace emits csv rows") {
    std::ostringstream trace;
    SolveOptions opts;
    opts.trace = &trace;
    solve_saddle(identity2_problem(), opts);
    CHECK(trace.str().substr(0, 28) == "iteration,F,lower_bound,gap\n");
    CHECK(trace.str().find("\n1,") != std::string::npos);
  }
}

TEST_CASE("brute force oracle certifies the solver") {
  SUBCASE("two-atom identity") {
    const auto p = identity2_problem();
    const auto brute = brute_force_saddle(p, 51);
    CHECK(brute.f_star == doctest::Approx(0.25).epsilon(0.03));
    const auto sol = solve_saddle(p, {});
    CHECK(std::abs(sol.f_star - brute.f_star) <= 2.0 / 51.0 + 1e-8);
  }
  SUBCASE("one-atom scalar closed form") {
    const auto p = scalar_problem(2.0);
    const auto brute = brute_force_saddle(p, 51);
    CHECK(brute.f_star == doctest::Approx(2.0).epsilon(0.02));
    CHECK(brute.phi[0] == doctest::Approx(0.5).epsilon(0.03));
  }
  SUBCASE("zero operator") {
    const auto space = FiniteProbSpace::uniform(2);
    const SaddleProblem p{space, trivial_group(space, 2), EquivariantMap{Matrix::Zero(2, 2)}, 1.0};
    CHECK(brute_force_saddle(p, 21).f_star == 0.0);
  }
  SUBCASE("large instances are refused") {
    const auto space = FiniteProbSpace::uniform(5);
    const SaddleProblem p{space, trivial_group(space, 2), EquivariantMap{Matrix::Zero(5, 2)}, 1.0};
    CHECK_THROWS_AS(brute_force_saddle(p, 11), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_saddle(identity2_problem(), 52), std::invalid_argument);
  }
}

TEST_CASE("F is convex and group invariant") {
  testing::Z2Worked fixture;
  const SaddleProblem p{fixture.space, fixture.group, fixture.T, 1.0};
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int rep = 0; rep < 100; ++rep) {
    L0Vector phi1(2), phi2(2);
    phi1 << unif(rng), unif(rng);
    phi2 << unif(rng), unif(rng);
    const double t = unif(rng);
    const L0Vector blend = t * phi1 + (1.0 - t) * phi2;
    CHECK(eval_F(blend, p).value <=
          t * eval_F(phi1, p).value + (1.0 - t) * eval_F(phi2, p).value + 1e-10);

    for (int s = 0; s < fixture.group.size(); ++s) {
      const L0Vector moved = permute(fixture.group.action(s), phi1);
      CHECK(std::abs(eval_F(moved, p).value - eval_F(phi1, p).value) <= 1e-10);
    }
  }
}

TEST_CASE("weak duality and witness feasibility") {
  testing::Z2Worked fixture;
  const SaddleProblem p{fixture.space, fixture.group, fixture.T, 1.0};
  const BSet b = p.feasible_set();
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const auto sol = solve_saddle(p, {});
  CHECK(sol.lower_bound <= sol.f_star + 1e-12);
  CHECK(sol.duality_gap >= 0.0);

  // Witnesses encountered at feasible points: psi = |T xi|^2 with unit gram
  // norm. The indicator of {psi <= M} with M the worst rearrangement bound
  // lies in B (the paper's 1_{E_M(psi)} feasibility).
  std::vector<L0Vector> witnesses;
  double m_bound = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    L0Vector phi(2);
    phi << unif(rng), unif(rng);
    const auto ev = eval_F(project_B(phi, b, p.space()), p);
    witnesses.push_back(ev.psi);
    m_bound = std::max(m_bound, rearrangement(ev.psi, p.space(), p.eps() / 2.0));
    CHECK(inner_min(ev.psi, b, p.space()).value <= sol.f_star + 1e-9);
  }
  for (const auto& psi : witnesses) {
    L0Vector indicator(psi.size());
    for (Index i = 0; i < psi.size(); ++i) {
      indicator[i] = psi[i] <= m_bound ? 1.0 : 0.0;
    }
    CHECK(b.contains(indicator, p.space(), 1e-12));
  }
}
