// karcher: command-line front end for the solvers and experiments.
//
// Exit status: 0 success, 1 solver failure (best SolveReport on stdout),
// 2 malformed input or flags.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "karcher/check.hpp"
#include "karcher/io.hpp"

using namespace karcher;

namespace {

struct Args {
  std::string measure, mu, nu, x, law, config;
  double t = 1.0;
  double lambda = 1.0;
  std::optional<double> rho;
  std::optional<int> m;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int threads = 1;
  int instances = 10;
  int max_dim = 64;
  std::string order = "forward";
  std::vector<int> sizes{1, 2, 4, 8, 16, 32, 64, 128};
};

void check_dim(const Args& a, int n) {
  if (n > a.max_dim) {
    throw InputError("dimension " + std::to_string(n) + " exceeds --max-dim " + std::to_string(a.max_dim));
  }
}

DiscreteMeasure load_measure(const Args& a, const std::string& path, const char* flag) {
  if (path.empty()) throw InputError(std::string(flag) + " is required");
  const Json j = read_json_file(path);
  try {
    DiscreteMeasure mu = measure_from_json(j);
    check_dim(a, mu.dim());
    return mu;
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

SpdMatrix load_matrix(const Args& a, const std::string& path, const char* flag) {
  if (path.empty()) throw InputError(std::string(flag) + " is required");
  const Json j = read_json_file(path);
  try {
    SpdMatrix x = spd_from_json(j);
    check_dim(a, x.dim());
    return x;
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

SolverConfig solver_config(const Args& a) {
  SolverConfig cfg;
  cfg.tol = a.tol;
  if (!a.config.empty()) {
    try {
      cfg = config_from_json(read_json_file(a.config), cfg);
    } catch (const InputError& e) {
      throw InputError(a.config + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return cfg;
}

FlowOptions flow_options(const Args& a) {
  FlowOptions opts;
  opts.tol = a.tol;
  opts.solver = solver_config(a);
  opts.solver.tol = std::min(opts.solver.tol, 1e-12);
  return opts;
}

TrotterOrder trotter_order(const Args& a) {
  if (a.order == "forward") return TrotterOrder::forward;
  if (a.order == "reverse") return TrotterOrder::reverse;
  throw InputError("--order must be forward or reverse");
}

Json mean_json(const MeanResult& r) { return Json{{"value", to_json(r.value)}, {"report", to_json(r.report)}}; }

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

int run_mean(const Args& a) {
  print(mean_json(karcher_mean(load_measure(a, a.measure, "--measure"), solver_config(a))));
  return 0;
}

int run_power_mean(const Args& a) {
  print(mean_json(power_mean(load_measure(a, a.measure, "--measure"), a.t, solver_config(a))));
  return 0;
}

int run_resolvent(const Args& a) {
  const DiscreteMeasure mu = load_measure(a, a.measure, "--measure");
  const SpdMatrix x = load_matrix(a, a.x, "--x");
  print(Json{{"value", to_json(resolvent(mu, a.lambda, x, solver_config(a)))}});
  return 0;
}

int run_flow(const Args& a) {
  const DiscreteMeasure mu = load_measure(a, a.measure, "--measure");
  const SpdMatrix x = load_matrix(a, a.x, "--x");
  print(to_json(semigroup(mu, a.t, x, flow_options(a))));
  return 0;
}

int run_trotter(const Args& a) {
  const DiscreteMeasure mu = load_measure(a, a.measure, "--measure");
  const SpdMatrix x = load_matrix(a, a.x, "--x");
  const TrotterOrder order = trotter_order(a);
  if (a.rho && a.m) throw InputError("--rho and --m are mutually exclusive");
  if (a.rho) {
    // S_ρ(t)X for the Trotter map with step ρ.
    print(to_json(approx_semigroup(trotter_map(mu, *a.rho, order), a.t, x, flow_options(a))));
    return 0;
  }
  const int m = a.m.value_or(4096);
  print(Json{{"state", to_json(trotter_product(mu, a.t, m, x, order))}, {"m", m}});
  return 0;
}

int run_wasserstein(const Args& a) {
  print(to_json(w1(load_measure(a, a.mu, "--mu"), load_measure(a, a.nu, "--nu"))));
  return 0;
}

int run_lln(const Args& a) {
  std::optional<SpdLaw> law;
  if (!a.law.empty()) {
    try {
      law = law_from_json(read_json_file(a.law));
    } catch (const InputError& e) {
      throw InputError(a.law + ": " + e.what());
    }
    check_dim(a, law->dim());
  } else if (!a.measure.empty()) {
    law = SpdLaw::finite(load_measure(a, a.measure, "--measure"));
  } else {
    throw InputError("--law or --measure is required");
  }
  const SpdMatrix x = a.x.empty() ? SpdMatrix::identity(law->dim()) : load_matrix(a, a.x, "--x");
  LlnOptions opts;
  opts.solver = solver_config(a);
  opts.flow = flow_options(a);
  opts.flow.tol = std::max(a.tol, 1e-9);
  opts.threads = a.threads;
  write_csv(std::cout, lln_run(*law, a.sizes, a.t, x, a.seed, opts));
  return 0;
}

int run_check(const Args& a) {
  CheckOptions opts;
  opts.seed = a.seed;
  opts.threads = a.threads;
  opts.instances = a.instances;
  const std::vector<CheckResult> results = run_invariant_suite(opts);
  Json checks = Json::array();
  int passed = 0;
  for (const CheckResult& r : results) {
    passed += r.passed;
    Json c{{"anchor", r.anchor},
           {"description", r.description},
           {"passed", r.passed},
           {"instances", r.instances},
           {"worst_margin", r.worst_margin}};
    if (!r.detail.empty()) c["detail"] = r.detail;
    checks.push_back(std::move(c));
  }
  const int failed = static_cast<int>(results.size()) - passed;
  print(Json{{"seed", a.seed}, {"passed", passed}, {"failed", failed}, {"checks", std::move(checks)}});
  return failed == 0 ? 0 : 1;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("KARCHER_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw InputError(std::string("KARCHER_SEED is not an integer: ") + env);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  CLI::App app{"Karcher means, resolvents and flows on the SPD cone"};
  app.require_subcommand(1);

  auto solver_flags = [&](CLI::App* s) {
    s->add_option("--tol", a.tol, "Target tolerance")->check(CLI::PositiveNumber);
    s->add_option("--config", a.config, "Solver config JSON file");
    s->add_option("--max-dim", a.max_dim, "Largest accepted matrix dimension")->check(CLI::PositiveNumber);
  };

  CLI::App* mean = app.add_subcommand("mean", "Karcher mean of a measure");
  mean->add_option("--measure", a.measure, "Measure JSON file")->required();
  solver_flags(mean);

  CLI::App* pmean = app.add_subcommand("power-mean", "Power mean P_t of a measure");
  pmean->add_option("--measure", a.measure, "Measure JSON file")->required();
  pmean->add_option("--t", a.t, "Exponent in (0, 1]")->required();
  solver_flags(pmean);

  CLI::App* res = app.add_subcommand("resolvent", "Resolvent J_lambda(X)");
  res->add_option("--measure", a.measure, "Measure JSON file")->required();
  res->add_option("--x", a.x, "Matrix JSON file")->required();
  res->add_option("--lambda", a.lambda, "Step size")->required();
  solver_flags(res);

  CLI::App* flow = app.add_subcommand("flow", "Flow S(t)X with an error bound");
  flow->add_option("--measure", a.measure, "Measure JSON file")->required();
  flow->add_option("--x", a.x, "Matrix JSON file")->required();
  flow->add_option("--t", a.t, "Flow time")->required();
  solver_flags(flow);

  CLI::App* trot = app.add_subcommand("trotter", "Trotter product (F_{t/m})^m X, or S_rho(t)X with --rho");
  trot->add_option("--measure", a.measure, "Measure JSON file")->required();
  trot->add_option("--x", a.x, "Matrix JSON file")->required();
  trot->add_option("--t", a.t, "Flow time")->required();
  trot->add_option("--m", a.m, "Number of steps (default 4096)")->check(CLI::PositiveNumber);
  trot->add_option("--rho", a.rho, "Step of the Trotter map for the approximating semigroup")
      ->check(CLI::PositiveNumber);
  trot->add_option("--order", a.order, "Composition order: forward or reverse");
  solver_flags(trot);

  CLI::App* was = app.add_subcommand("wasserstein", "W1 distance and optimal coupling");
  was->add_option("--mu", a.mu, "Measure JSON file")->required();
  was->add_option("--nu", a.nu, "Measure JSON file")->required();
  was->add_option("--max-dim", a.max_dim, "Largest accepted matrix dimension")->check(CLI::PositiveNumber);

  CLI::App* lln = app.add_subcommand("lln", "Law-of-large-numbers experiment (CSV)");
  lln->add_option("--law", a.law, "Law JSON file");
  lln->add_option("--measure", a.measure, "Measure JSON file, used as a finite law");
  lln->add_option("--x", a.x, "Flow start (default identity)");
  lln->add_option("--t", a.t, "Flow time");
  lln->add_option("--sizes", a.sizes, "Ascending sample sizes")->delimiter(',');
  lln->add_option("--seed", a.seed, "Seed (default $KARCHER_SEED or 0)");
  lln->add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
  solver_flags(lln);

  CLI::App* chk = app.add_subcommand("check", "Run the randomized invariant suite");
  chk->add_option("--seed", a.seed, "Seed (default $KARCHER_SEED or 0)");
  chk->add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
  chk->add_option("--instances", a.instances, "Instances per check")->check(CLI::PositiveNumber);

  try {
    a.seed = default_seed();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*mean) return run_mean(a);
    if (*pmean) return run_power_mean(a);
    if (*res) return run_resolvent(a);
    if (*flow) return run_flow(a);
    if (*trot) return run_trotter(a);
    if (*was) return run_wasserstein(a);
    if (*lln) return run_lln(a);
    if (*chk) return run_check(a);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    print(Json{{"error", e.what()}, {"report", to_json(e.report())}});
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
