// Regenerates the bundled instance files under instances/. The outputs are
// committed; rerun after changing the builders or the file format:
//
//   gen_instances [output-dir]

#include "equifact/builders.hpp"
#include "equifact/instance_io.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <random>

using namespace equifact;
using json = nlohmann::json;

namespace {

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
  }
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    out.push_back(row);
  }
  return out;
}

json group_json(const GroupSystem& g, bool complex_h) {
  json elements = json::array();
  json mul = json::array();
  json rep = json::object();
  json action = json::object();
  for (int s = 0; s < g.size(); ++s) {
    elements.push_back(g.id(s));
    json row = json::array();
    for (int t = 0; t < g.size(); ++t) {
      row.push_back(g.id(g.multiply(s, t)));
    }
    mul.push_back(row);
    rep[g.id(s)] = to_json(g.rep(s));
    json perm = json::array();
    for (Index i : g.action(s)) {
      perm.push_back(i);
    }
    action[g.id(s)] = perm;
  }
  json out{{"elements", elements}, {"mul", mul}, {"rep", rep}, {"action", action}};
  if (complex_h) {
    out["complex"] = true;
  }
  return out;
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      out(r, c) = gauss(rng);
    }
  }
  return out;
}

/// Equivariant map from a random seed, rescaled to unit spectral norm.
Matrix averaged_map(const GroupSystem& g, const FiniteProbSpace& space, std::uint64_t seed) {
  const Matrix t0 = random_matrix(space.size(), g.dim(), seed);
  Matrix averaged = project_equivariant(t0, g).matrix;
  const Eigen::JacobiSVD<Matrix> svd(averaged);
  const double top = svd.singularValues()[0];
  const double bottom = svd.singularValues()[svd.singularValues().size() - 1];
  if (bottom < 1e-6 * top) {
    throw std::runtime_error("averaged map lost rank; pick another seed");
  }
  return averaged / top;
}

void write_instance(const std::string& dir, const std::string& name, const json& body) {
  const std::string path = dir + "/" + name + ".json";
  std::ofstream file(path);
  file << body.dump(2) << "\n";
  file.close();
  const Instance check = load_instance(path);
  std::cout << path << ": n=" << check.space.size() << " d=" << check.group.dim()
            << " |G|=" << check.group.size()
            << " covariance=" << covariance_residual(check.T, check.group) << "\n";
}

Matrix rotation2(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Real 2dc x 2dc block form [[X, -Y], [Y, X]] of a complex matrix.
Matrix real_form(const Eigen::MatrixXcd& m) {
  const Index dc = m.rows();
  Matrix out(2 * dc, 2 * dc);
  out.topLeftCorner(dc, dc) = m.real();
  out.topRightCorner(dc, dc) = -m.imag();
  out.bottomLeftCorner(dc, dc) = m.imag();
  out.bottomRightCorner(dc, dc) = m.real();
  return out;
}

Matrix worked_z2_rep() {
  Matrix pi(2, 2);
  pi << 1, 1, 0, -1;
  return pi;
}

json options_json() { return json{{"levels", 8}, {"tol", 1e-8}, {"seed", 0}}; }

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "instances";

  try {
    // 1. Two uniform atoms, trivial group, T = identity.
    {
      const auto space = FiniteProbSpace::uniform(2);
      const auto g = trivial_group(space, 2);
      write_instance(dir, "identity2",
                     json{{"name", "identity2"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(Matrix(Matrix::Identity(2, 2)))},
                          {"options", options_json()}});
    }

    // 2. One atom, scalar T = 2.
    {
      const auto space = FiniteProbSpace::uniform(1);
      const auto g = trivial_group(space, 1);
      Matrix T(1, 1);
      T << 2.0;
      write_instance(dir, "scalar1",
                     json{{"name", "scalar1"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(T)},
                          {"options", options_json()}});
    }

    // 3. Three atoms, trivial group, fixed rectangular T.
    {
      const auto space = FiniteProbSpace::uniform(3);
      const auto g = trivial_group(space, 2);
      Matrix T(3, 2);
      T << 1.0, 0.0, 0.6, 0.4, 0.1, 0.3;
      write_instance(dir, "rect3",
                     json{{"name", "rect3"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(T)},
                          {"options", options_json()}});
    }

    // 4. The worked Z/2 example with its exactly equivariant integer T.
    {
      const auto space = FiniteProbSpace::uniform(2);
      const auto g = cyclic_group(2, worked_z2_rep(), {1, 0}, space);
      Matrix T(2, 2);
      T << 1, 0, 1, 1;
      write_instance(dir, "z2_worked",
                     json{{"name", "z2_worked"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(T)},
                          {"options", options_json()}});
    }

    // 5. Z/2 on four atoms with dyadic non-uniform weights.
    {
      Vector w(4);
      w << 0.125, 0.125, 0.375, 0.375;
      const FiniteProbSpace space(w);
      const auto g = cyclic_group(2, worked_z2_rep(), {1, 0, 3, 2}, space);
      write_instance(dir, "z2_weighted",
                     json{{"name", "z2_weighted"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(averaged_map(g, space, 101))},
                          {"options", options_json()}});
    }

    // 6. Z/8 rotations conjugated by a shear, cyclic action on eight atoms.
    {
      const auto space = FiniteProbSpace::uniform(8);
      Matrix shear(2, 2);
      shear << 1.0, 0.4, 0.0, 1.0;
      const Matrix gen = shear * rotation2(2.0 * M_PI / 8.0) * shear.inverse();
      const auto g = cyclic_group(8, gen, cyclic_shift(8, 1), space);
      write_instance(dir, "c8_rot",
                     json{{"name", "c8_rot"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(averaged_map(g, space, 202))},
                          {"options", options_json()}});
    }

    // 7. S_3 in its natural action, permutation rep conjugated away from unitary.
    {
      const auto space = FiniteProbSpace::uniform(3);
      Matrix a(3, 3);
      a << 1.0, 0.2, 0.0, 0.0, 1.0, 0.3, 0.0, 0.0, 1.0;
      const auto g = symmetric3_group(a, space);
      write_instance(dir, "s3_natural",
                     json{{"name", "s3_natural"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(averaged_map(g, space, 303))},
                          {"options", options_json()}});
    }

    // 8. Z/24 rotations conjugated by a diagonal stretch.
    {
      const auto space = FiniteProbSpace::uniform(24);
      Matrix stretch(2, 2);
      stretch << 1.3, 0.0, 0.0, 0.8;
      const Matrix gen = stretch * rotation2(2.0 * M_PI / 24.0) * stretch.inverse();
      const auto g = cyclic_group(24, gen, cyclic_shift(24, 1), space);
      write_instance(dir, "z24_rot",
                     json{{"name", "z24_rot"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(averaged_map(g, space, 404))},
                          {"options", options_json()}});
    }

    // 9. Z/2 in dimension 8 on 64 atoms: four worked blocks, 32 swapped pairs.
    {
      const auto space = FiniteProbSpace::uniform(64);
      Matrix pi = Matrix::Zero(8, 8);
      for (int b = 0; b < 4; ++b) {
        pi.block<2, 2>(2 * b, 2 * b) = worked_z2_rep();
      }
      Permutation swaps(64);
      for (Index i = 0; i < 64; i += 2) {
        swaps[static_cast<size_t>(i)] = i + 1;
        swaps[static_cast<size_t>(i + 1)] = i;
      }
      const auto g = cyclic_group(2, pi, swaps, space);
      write_instance(dir, "z2_block8",
                     json{{"name", "z2_block8"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, false)},
                          {"T", to_json(averaged_map(g, space, 505))},
                          {"options", options_json()}});
    }

    // 10. Z/4 acting complex-linearly on C^2 (real dimension 4). Eight atoms
    // shifted by two, so every fourth root of unity appears twice in the
    // permutation spectrum and equivariant maps can reach full rank.
    {
      const auto space = FiniteProbSpace::uniform(8);
      Eigen::MatrixXcd a(2, 2);
      a << std::complex<double>(1.0, 0.0), std::complex<double>(0.5, 0.0),
          std::complex<double>(0.0, 0.2), std::complex<double>(1.0, 0.0);
      Eigen::MatrixXcd d(2, 2);
      d << std::complex<double>(0.0, 1.0), std::complex<double>(0.0, 0.0),
          std::complex<double>(0.0, 0.0), std::complex<double>(0.0, -1.0);
      const Matrix gen = real_form(a * d * a.inverse());
      const auto g = cyclic_group(4, gen, cyclic_shift(8, 2), space,
                                  standard_complex_structure(4));
      write_instance(dir, "c4_complex",
                     json{{"name", "c4_complex"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group", group_json(g, true)},
                          {"T", to_json(averaged_map(g, space, 606))},
                          {"options", options_json()}});
    }

    // Word-ball companion: Z truncated at radius 5 with an unbounded rep.
    {
      const auto space = FiniteProbSpace::uniform(1);
      Matrix gen(2, 2);
      gen << 2.0, 0.0, 0.0, 0.5;
      json generators = json::array();
      generators.push_back(json{{"name", "a"}, {"rep", to_json(gen)}, {"action", json::array({0})}});
      write_instance(dir, "word_z5",
                     json{{"name", "word_z5"},
                          {"space", {{"weights", to_json(space.weights())}}},
                          {"group",
                           {{"generators", generators}, {"radius", 5}, {"relations", json::array()}}},
                          {"T", to_json(Matrix(Matrix::Zero(1, 2)))},
                          {"options", options_json()}});
    }
  } catch (const std::exception& err) {
    std::cerr << "generation failed: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
