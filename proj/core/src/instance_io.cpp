#include "equifact/instance_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace equifact {

namespace {

using nlohmann::json;

/// 1-based line of the first occurrence of "fragment" in the raw text, for
/// error messages that point into the file.
int line_of(const std::string& text, const std::string& fragment) {
  const size_t pos = text.find(fragment);
  if (pos == std::string::npos) {
    return 0;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

std::string located(const std::string& path, const std::string& text, const std::string& field) {
  const std::string key = "\"" + field.substr(0, field.find('.')) + "\"";
  const int line = line_of(text, key);
  std::ostringstream out;
  out << path;
  if (line > 0) {
    out << ":" << line;
  }
  out << ": " << field;
  return out.str();
}

Vector parse_vector(const json& node, const std::string& where) {
  if (!node.is_array()) {
    throw InstanceError(where, "expected an array of numbers");
  }
  Vector out(node.size());
  for (size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw InstanceError(where, "entry " + std::to_string(i) + " is not a number");
    }
    out[static_cast<Index>(i)] = node[i].get<double>();
  }
  return out;
}

/// Matrix from nested rows, or from a flat row-major array when the expected
/// shape is square and unambiguous.
Matrix parse_matrix(const json& node, const std::string& where) {
  if (!node.is_array() || node.empty()) {
    throw InstanceError(where, "expected a matrix as nested arrays");
  }
  if (node[0].is_number()) {
    const size_t total = node.size();
    const size_t d = static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(total))));
    if (d * d != total) {
      throw InstanceError(where, "flat matrix of length " + std::to_string(total) +
                                     " is not square; use nested rows");
    }
    Matrix out(static_cast<Index>(d), static_cast<Index>(d));
    for (size_t k = 0; k < total; ++k) {
      if (!node[k].is_number()) {
        throw InstanceError(where, "entry " + std::to_string(k) + " is not a number");
      }
      out(static_cast<Index>(k / d), static_cast<Index>(k % d)) = node[k].get<double>();
    }
    return out;
  }
  const size_t rows = node.size();
  const size_t cols = node[0].size();
  Matrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!node[r].is_array() || node[r].size() != cols) {
      throw InstanceError(where, "row " + std::to_string(r) + " has inconsistent length");
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!node[r][c].is_number()) {
        throw InstanceError(where, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                       ") is not a number");
      }
      out(static_cast<Index>(r), static_cast<Index>(c)) = node[r][c].get<double>();
    }
  }
  return out;
}

Permutation parse_permutation(const json& node, const std::string& where) {
  if (!node.is_array()) {
    throw InstanceError(where, "expected a permutation as an array of atom indices");
  }
  Permutation out(node.size());
  for (size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number_integer()) {
      throw InstanceError(where, "entry " + std::to_string(i) + " is not an integer");
    }
    out[i] = node[i].get<Index>();
  }
  return out;
}

GroupSystem parse_group(const json& node, const FiniteProbSpace& space, const std::string& where,
                        int word_radius_override) {
  std::optional<Matrix> complex_structure;
  const bool complex_h = node.value("complex", false);

  if (node.contains("generators")) {
    std::vector<WordGenerator> generators;
    const json& gens = node.at("generators");
    if (!gens.is_array() || gens.empty()) {
      throw InstanceError(where + ".generators", "expected a nonempty array");
    }
    for (size_t k = 0; k < gens.size(); ++k) {
      const std::string gw = where + ".generators[" + std::to_string(k) + "]";
      WordGenerator gen;
      if (!gens[k].contains("name")) {
        throw InstanceError(gw, "missing \"name\"");
      }
      gen.name = gens[k].at("name").get<std::string>();
      gen.rep = parse_matrix(gens[k].at("rep"), gw + ".rep");
      gen.action = parse_permutation(gens[k].at("action"), gw + ".action");
      generators.push_back(std::move(gen));
    }
    int radius = node.value("radius", 6);
    if (word_radius_override > 0) {
      radius = word_radius_override;
    }
    std::vector<Relation> relations;
    for (const auto& rel : node.value("relations", json::array())) {
      if (!rel.is_array() || rel.size() != 2) {
        throw InstanceError(where + ".relations", "each relation is a [lhs, rhs] pair of words");
      }
      relations.emplace_back(rel[0].get<std::string>(), rel[1].get<std::string>());
    }
    if (complex_h) {
      complex_structure = standard_complex_structure(generators[0].rep.rows());
    }
    return GroupSystem::word_ball(generators, radius, relations, space, complex_structure);
  }

  if (!node.contains("elements") || !node.contains("mul") || !node.contains("rep") ||
      !node.contains("action")) {
    throw InstanceError(where, "need \"elements\", \"mul\", \"rep\", \"action\" "
                               "(or the word-group form with \"generators\")");
  }
  std::vector<std::string> ids;
  for (const auto& id : node.at("elements")) {
    ids.push_back(id.get<std::string>());
  }
  const auto index_of = [&](const std::string& id, const std::string& ctx) {
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) {
        return static_cast<int>(i);
      }
    }
    throw InstanceError(ctx, "unknown element id '" + id + "'");
  };

  const json& mul_node = node.at("mul");
  if (!mul_node.is_array() || mul_node.size() != ids.size()) {
    throw InstanceError(where + ".mul", "expected a " + std::to_string(ids.size()) + "x" +
                                            std::to_string(ids.size()) + " table");
  }
  std::vector<std::vector<int>> mul(ids.size(), std::vector<int>(ids.size()));
  for (size_t i = 0; i < ids.size(); ++i) {
    if (!mul_node[i].is_array() || mul_node[i].size() != ids.size()) {
      throw InstanceError(where + ".mul", "row " + std::to_string(i) + " has wrong length");
    }
    for (size_t j = 0; j < ids.size(); ++j) {
      mul[i][j] = index_of(mul_node[i][j].get<std::string>(),
                           where + ".mul[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }

  std::vector<Matrix> reps;
  std::vector<Permutation> actions;
  for (const std::string& id : ids) {
    if (!node.at("rep").contains(id)) {
      throw InstanceError(where + ".rep", "missing matrix for element '" + id + "'");
    }
    if (!node.at("action").contains(id)) {
      throw InstanceError(where + ".action", "missing permutation for element '" + id + "'");
    }
    reps.push_back(parse_matrix(node.at("rep").at(id), where + ".rep." + id));
    actions.push_back(parse_permutation(node.at("action").at(id), where + ".action." + id));
  }
  if (complex_h) {
    complex_structure = standard_complex_structure(reps[0].rows());
  }
  return GroupSystem(std::move(ids), std::move(mul), std::move(reps), std::move(actions), space,
                     complex_structure);
}

}  // namespace

Instance load_instance(const std::string& path, int word_radius_override) {
  std::ifstream file(path);
  if (!file) {
    throw InstanceError(path, "cannot open file");
  }
  std::stringstream buffer;
  buffer << file.rdbuf();
  const std::string text = buffer.str();

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    const size_t byte = err.byte > 0 ? err.byte - 1 : 0;
    const size_t upto = std::min(byte, text.size());
    const int line =
        1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw InstanceError(path + ":" + std::to_string(line), err.what());
  }

  try {
    if (!doc.contains("space") || !doc.at("space").contains("weights")) {
      throw InstanceError(located(path, text, "space.weights"), "missing");
    }
    const Vector weights = parse_vector(doc.at("space").at("weights"), "space.weights");
    const double total = weights.sum();
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "weights sum to " << total << ", expected 1 within 1e-12";
      throw InstanceError(located(path, text, "space.weights"), msg.str());
    }
    FiniteProbSpace space(weights);

    if (!doc.contains("group")) {
      throw InstanceError(located(path, text, "group"), "missing");
    }
    GroupSystem group = parse_group(doc.at("group"), space, "group", word_radius_override);

    if (!doc.contains("T")) {
      throw InstanceError(located(path, text, "T"), "missing");
    }
    EquivariantMap T{parse_matrix(doc.at("T"), "T")};
    if (T.atoms() != space.size()) {
      throw InstanceError(located(path, text, "T"),
                          "has " + std::to_string(T.atoms()) + " rows but the space has " +
                              std::to_string(space.size()) + " atoms");
    }
    if (T.dim() != group.dim()) {
      throw InstanceError(located(path, text, "T"),
                          "has " + std::to_string(T.dim()) + " columns but the representation "
                          "acts in dimension " + std::to_string(group.dim()));
    }
    const double covariance = covariance_residual(T, group);
    if (covariance > 1e-10) {
      std::ostringstream msg;
      msg << "violates the covariance constraint T pi(s) = P_beta(s) T with residual "
          << covariance << " (tolerance 1e-10)";
      throw InstanceError(located(path, text, "T"), msg.str());
    }

    Instance instance{doc.value("name", std::string{}), std::move(space), std::move(group),
                      std::move(T), InstanceOptions{}};
    if (instance.name.empty()) {
      const size_t slash = path.find_last_of('/');
      const size_t start = slash == std::string::npos ? 0 : slash + 1;
      const size_t dot = path.find_last_of('.');
      instance.name = path.substr(start, dot > start ? dot - start : std::string::npos);
    }
    if (doc.contains("options")) {
      const json& opts = doc.at("options");
      instance.options.levels = opts.value("levels", instance.options.levels);
      instance.options.tol = opts.value("tol", instance.options.tol);
      instance.options.seed = opts.value("seed", instance.options.seed);
      instance.options.samples = opts.value("samples", instance.options.samples);
      instance.options.word_radius = opts.value("word_radius", instance.options.word_radius);
      if (instance.options.levels < 1) {
        throw InstanceError(located(path, text, "options.levels"), "must be >= 1");
      }
      if (!(instance.options.tol > 0.0)) {
        throw InstanceError(located(path, text, "options.tol"), "must be positive");
      }
    }
    return instance;
  } catch (const InstanceError&) {
    throw;
  } catch (const std::exception& err) {
    // Validation failures raised by the domain constructors.
    throw InstanceError(path, err.what());
  }
}

}  // namespace equifact
