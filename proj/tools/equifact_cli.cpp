// equifact: batch driver for the factorization / unitarization pipeline and
// the probabilistic lemma suite. Reads instance JSON, writes report JSON.
//
// Exit codes are a stable contract:
//   0 all certificates pass
//   1 a certificate failed
//   2 malformed input
//   3 degeneracy (the factorization weight leaves T non-injective)

#include "equifact/builders.hpp"
#include "equifact/factorization.hpp"
#include "equifact/instance_io.hpp"
#include "equifact/stochastic_verify.hpp"
#include "equifact/unitarization.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

using equifact::Index;
using equifact::Matrix;
using equifact::Vector;
using json = nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitCertificateFail = 1;
constexpr int kExitInputFail = 2;
constexpr int kExitDegenerate = 3;

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buffer[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

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

json to_json(const equifact::MatrixC& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    out.push_back(row);
  }
  return out;
}

json to_json(const equifact::Certificate& c) {
  return json{{"name", c.name},
              {"value", c.value},
              {"threshold", c.threshold},
              {"pass", c.pass},
              {"kind", c.certified ? "certified" : "empirical"}};
}

json to_json(const equifact::FactorizationResult& fr) {
  json levels = json::array();
  for (const auto& level : fr.levels) {
    json s_set = json::array();
    for (Index i : level.s_set) {
      s_set.push_back(i);
    }
    levels.push_back(json{{"eps", level.eps},
                          {"phi0", {{"values", to_json(level.phi0)}}},
                          {"s_set", s_set},
                          {"complement_mass", level.complement_mass},
                          {"c_eps_tight", level.c_eps_tight},
                          {"c_eps_paper", level.c_eps_paper},
                          {"k_coeff", level.k_coeff},
                          {"f_star", level.f_star},
                          {"duality_gap", level.duality_gap},
                          {"invariance_residual", level.invariance_residual},
                          {"iterations", level.iterations}});
  }
  json certificates = json::array();
  for (const auto& cert : fr.certificates) {
    certificates.push_back(to_json(cert));
  }
  return json{{"levels", levels},
              {"weight", {{"values", to_json(fr.weight)}}},
              {"bound_certificate", fr.bound_certificate},
              {"invariance_residual", fr.invariance_residual},
              {"equivariance_residual", fr.equivariance_residual},
              {"certificates", certificates},
              {"flags", fr.flags},
              {"all_pass", fr.all_pass}};
}

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  std::ofstream file(out_path);
  if (!file) {
    throw std::runtime_error("cannot write " + out_path);
  }
  file << report.dump(2) << "\n";
}

struct CommonFlags {
  std::string out;
  std::string trace_prefix;
  int levels = 0;       // 0: keep the instance's option
  double tol = 0.0;     // 0: keep
  int word_radius = 0;  // 0: keep
  bool oracle = false;
};

equifact::FactorizeOptions factorize_options(const equifact::Instance& instance,
                                             const CommonFlags& flags) {
  equifact::FactorizeOptions opts;
  opts.levels = flags.levels > 0 ? flags.levels : instance.options.levels;
  opts.tol = flags.tol > 0.0 ? flags.tol : instance.options.tol;
  opts.trace_prefix = flags.trace_prefix;
  return opts;
}

int cmd_factorize(const std::string& path, const CommonFlags& flags) {
  const equifact::Instance instance = equifact::load_instance(path, flags.word_radius);
  const auto opts = factorize_options(instance, flags);
  const auto result = equifact::factorize(instance.space, instance.group, instance.T, opts);

  json report{{"command", "factorize"},
              {"instance", instance.name},
              {"generated_at", timestamp_utc()},
              {"options", {{"levels", opts.levels}, {"tol", opts.tol}}},
              {"factorization", to_json(result)}};
  emit(report, flags.out);
  if (!result.all_pass) {
    for (const auto& cert : result.certificates) {
      if (!cert.pass) {
        std::cerr << "certificate failed: " << cert.name << " = " << cert.value
                  << " (threshold " << cert.threshold << ")\n";
      }
    }
    return kExitCertificateFail;
  }
  return kExitPass;
}

int cmd_unitarize(const std::string& path, const CommonFlags& flags) {
  const equifact::Instance instance = equifact::load_instance(path, flags.word_radius);
  const auto opts = factorize_options(instance, flags);
  const double residual_tol = opts.tol;
  const auto fr = equifact::factorize(instance.space, instance.group, instance.T, opts);

  json report{{"command", "unitarize"},
              {"instance", instance.name},
              {"generated_at", timestamp_utc()},
              {"options", {{"levels", opts.levels}, {"tol", opts.tol}}},
              {"factorization", to_json(fr)}};

  if (!fr.all_pass) {
    emit(report, flags.out);
    std::cerr << "factorization certificates failed; no unitarizer derived\n";
    return kExitCertificateFail;
  }

  equifact::InnerProductForm form;
  try {
    form = equifact::make_inner_product_form(fr, instance.space, instance.group, instance.T);
  } catch (const std::runtime_error& err) {
    emit(report, flags.out);
    std::cerr << err.what() << "\n";
    return kExitDegenerate;
  }

  const auto residuals = equifact::unitarity_residuals(form.unitarizer, instance.group);
  json residuals_json = json::object();
  for (int s = 0; s < instance.group.size(); ++s) {
    residuals_json[instance.group.id(s)] = residuals[static_cast<size_t>(s)];
  }
  const bool complex_h = instance.group.complex_structure().has_value();
  json unitarization{{"gram", to_json(form.gram_real)},
                     {"complex", complex_h},
                     {"V", to_json(form.unitarizer)},
                     {"residuals", residuals_json},
                     {"worst_residual", form.unitarity_residual},
                     {"invariance_residual", form.invariance_residual},
                     {"condition_number", form.condition_number},
                     {"kind", instance.group.truncated() ? "empirical" : "certified"}};
  if (complex_h) {
    unitarization["gram_complex"] = to_json(form.gram_complex);
  }

  bool oracle_pass = true;
  if (flags.oracle) {
    const Matrix oracle_gram = equifact::dixmier_average_oracle(instance.group);
    const auto oracle_report = complex_h
        ? equifact::check_dixmier_complex(equifact::complexify(
              oracle_gram, *instance.group.complex_structure()), instance.group)
        : equifact::check_dixmier(oracle_gram, instance.group);
    double oracle_residual = 0.0;
    if (complex_h) {
      const auto result = equifact::unitarize_complex(
          equifact::complexify(oracle_gram, *instance.group.complex_structure()),
          instance.group);
      oracle_residual = result.worst_residual;
    } else {
      oracle_residual = equifact::unitarize(oracle_gram, instance.group).worst_residual;
    }
    oracle_pass = oracle_residual <= residual_tol &&
                  oracle_report.invariance_residual <= residual_tol;
    unitarization["oracle"] = json{{"gram", to_json(oracle_gram)},
                                   {"invariance_residual", oracle_report.invariance_residual},
                                   {"unitarizer_residual", oracle_residual},
                                   {"condition_number", oracle_report.condition_number},
                                   {"pass", oracle_pass}};
  }

  report["unitarization"] = unitarization;
  emit(report, flags.out);
  if (form.unitarity_residual > residual_tol || !oracle_pass) {
    std::cerr << "unitarizer residual " << form.unitarity_residual << " exceeds " << residual_tol
              << "\n";
    return kExitCertificateFail;
  }
  return kExitPass;
}

struct VerifyFlags {
  std::uint64_t seed = 0;
  int samples = 100000;
  int exact_max = 14;
  std::vector<std::string> instances;
  std::string out;
};

int cmd_verify(const VerifyFlags& flags) {
  std::mt19937_64 rng(flags.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, flags.exact_max);
  json checks = json::array();
  std::string first_failure;

  const auto record = [&](const std::string& name, bool pass, double margin,
                          const std::string& kind) {
    checks.push_back(json{{"name", name}, {"pass", pass}, {"margin", margin}, {"kind", kind}});
    if (!pass && first_failure.empty()) {
      first_failure = name;
    }
  };

  // Rearrangement and tail lemma on random L0 vectors (exact computations).
  {
    const auto space = equifact::FiniteProbSpace::uniform(16);
    bool pass = true;
    double worst = 1.0;
    for (int rep = 0; rep < 200; ++rep) {
      Vector phi(16);
      for (Index i = 0; i < 16; ++i) {
        phi[i] = gauss(rng);
      }
      for (int k = 1; k <= 100; ++k) {
        const double delta = static_cast<double>(k) / 100.0;
        const double tail =
            equifact::tail_measure(phi, space, equifact::rearrangement(phi, space, delta));
        worst = std::min(worst, delta - tail);
        pass = pass && tail <= delta;
      }
    }
    record("rearrangement_tail_lemma", pass, worst, "certified");
  }

  // Khintchine: exact enumeration over all sign patterns.
  {
    equifact::RademacherConfig cfg;
    cfg.exact_max = flags.exact_max;
    cfg.seed = flags.seed;
    cfg.samples = flags.samples;
    bool pass = true;
    double worst = 1.0;
    for (int rep = 0; rep < 500; ++rep) {
      const int n = dim(rng);
      Vector x(n);
      do {
        for (Index i = 0; i < n; ++i) {
          x[i] = gauss(rng);
        }
      } while (x.squaredNorm() == 0.0);
      const auto result = equifact::khintchine_check(x, cfg);
      worst = std::min(worst, result.probability - 1.0 / 12.0);
      pass = pass && result.pass;
    }
    record("khintchine_L0", pass, worst, "certified");
  }

  // Paley-Zygmund on random finite distributions.
  {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> support(1, 8);
    bool pass = true;
    double worst = 1.0;
    for (int rep = 0; rep < 500; ++rep) {
      const int k = support(rng);
      Vector values(k), probs(k);
      double total = 0.0;
      for (int i = 0; i < k; ++i) {
        values[i] = 4.0 * unif(rng);
        probs[i] = 0.05 + unif(rng);
        total += probs[i];
      }
      probs /= total;
      probs[k - 1] += 1.0 - probs.sum();  // exact normalization
      if (values.maxCoeff() <= 0.0) {
        values[0] = 1.0;
      }
      const auto result = equifact::paley_zygmund_check(values, probs, unif(rng));
      worst = std::min(worst, result.lhs - result.rhs);
      pass = pass && result.pass;
    }
    record("paley_zygmund", pass, worst, "certified");
  }

  // Hull tails on synthetic equivariant-free instances plus any provided ones.
  {
    equifact::RademacherConfig cfg;
    cfg.seed = flags.seed + 1;
    cfg.samples = 200;
    bool pass = true;
    double worst = 1.0;
    for (int synth = 0; synth < 3; ++synth) {
      const Index n = 8 + 4 * synth;
      const auto space = equifact::FiniteProbSpace::uniform(n);
      Matrix T(n, 3);
      for (Index i = 0; i < T.size(); ++i) {
        T.data()[i] = gauss(rng);
      }
      const equifact::SaddleProblem p{space, equifact::trivial_group(space, 3),
                                      equifact::EquivariantMap{T}, 1.0};
      const Vector lambdas = Vector::LinSpaced(24, 0.5, 50.0);
      const auto report = equifact::hull_tail_check(p, cfg, lambdas);
      worst = std::min(worst, report.worst_margin);
      pass = pass && report.violations == 0;
    }
    for (const auto& path : flags.instances) {
      const auto instance = equifact::load_instance(path);
      const equifact::SaddleProblem p{instance.space, instance.group, instance.T, 1.0};
      const Vector lambdas = Vector::LinSpaced(24, 0.5, 50.0);
      const auto report = equifact::hull_tail_check(p, cfg, lambdas);
      worst = std::min(worst, report.worst_margin);
      pass = pass && report.violations == 0;
    }
    record("hull_tail_bound", pass, worst, "empirical");
  }

  // Gaussian characteristic function demo. The margin is the smallest
  // remaining sigma headroom over the checked xi values.
  {
    bool pass = true;
    double min_headroom = 3.0;
    for (int rep = 0; rep < 10; ++rep) {
      Vector xi(4);
      for (Index i = 0; i < 4; ++i) {
        xi[i] = gauss(rng);
      }
      if (rep == 0) {
        xi.setZero();
      }
      const auto demo = equifact::gaussian_pdf_demo(xi, flags.samples, flags.seed + rep);
      const double headroom =
          demo.std_error > 0.0
              ? 3.0 - std::abs(demo.estimate - demo.target) / demo.std_error
              : (demo.estimate == demo.target ? 3.0 : -1.0);
      min_headroom = std::min(min_headroom, headroom);
      pass = pass && demo.pass;
    }
    record("gaussian_characteristic_function", pass, min_headroom, "empirical");
  }

  json report{{"command", "verify"},
              {"generated_at", timestamp_utc()},
              {"seed", flags.seed},
              {"samples", flags.samples},
              {"exact_max", flags.exact_max},
              {"checks", checks}};
  emit(report, flags.out);
  if (!first_failure.empty()) {
    std::cerr << "check failed: " << first_failure << "\n";
    return kExitCertificateFail;
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant factorization and unitarization toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  VerifyFlags verify_flags;
  std::string instance_path;

  auto* factorize_cmd =
      app.add_subcommand("factorize", "Run the factorization pipeline on an instance file");
  factorize_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  factorize_cmd->add_option("--levels", flags.levels, "number of eps levels (eps_j = 1/j)");
  factorize_cmd->add_option("--tol", flags.tol, "solver and certificate tolerance");
  factorize_cmd->add_option("--trace", flags.trace_prefix,
                            "write per-level solver traces to PREFIX.l<j>.csv");
  factorize_cmd->add_option("--word-radius", flags.word_radius, "override word-ball radius");
  factorize_cmd->add_option("--out", flags.out, "report path (stdout when omitted)");

  auto* unitarize_cmd =
      app.add_subcommand("unitarize", "Factorize, build the invariant form and the unitarizer");
  unitarize_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  unitarize_cmd->add_option("--levels", flags.levels, "number of eps levels");
  unitarize_cmd->add_option("--tol", flags.tol, "solver tolerance and residual threshold");
  unitarize_cmd->add_option("--trace", flags.trace_prefix,
                            "write per-level solver traces to PREFIX.l<j>.csv");
  unitarize_cmd->add_option("--word-radius", flags.word_radius, "override word-ball radius");
  unitarize_cmd->add_flag("--oracle", flags.oracle,
                          "also run the group-averaging oracle (finite groups)");
  unitarize_cmd->add_option("--out", flags.out, "report path (stdout when omitted)");

  auto* verify_cmd = app.add_subcommand("verify", "Run the probabilistic lemma suite");
  verify_cmd->add_option("--seed", verify_flags.seed, "RNG seed");
  verify_cmd->add_option("--samples", verify_flags.samples, "Monte Carlo sample count");
  verify_cmd->add_option("--exact-max", verify_flags.exact_max,
                         "largest n enumerated exactly in the Khintchine check");
  verify_cmd->add_option("--instance", verify_flags.instances,
                         "instance files for the hull tail check (repeatable)");
  verify_cmd->add_option("--out", verify_flags.out, "report path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (factorize_cmd->parsed()) {
      return cmd_factorize(instance_path, flags);
    }
    if (unitarize_cmd->parsed()) {
      return cmd_unitarize(instance_path, flags);
    }
    return cmd_verify(verify_flags);
  } catch (const equifact::InstanceError& err) {
    std::cerr << err.what() << "\n";
    return kExitInputFail;
  } catch (const std::invalid_argument& err) {
    std::cerr << err.what() << "\n";
    return kExitInputFail;
  } catch (const std::exception& err) {
    std::cerr << err.what() << "\n";
    return kExitCertificateFail;
  }
}
