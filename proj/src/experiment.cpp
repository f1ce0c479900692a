#include "oadmm/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "oadmm/data.hpp"
#include "oadmm/rng.hpp"

namespace oadmm {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double opt_number(const toml::Table& table, const std::string& key, double fallback) {
  auto it = table.find(key);
  if (it == table.end()) return fallback;
  if (std::holds_alternative<double>(it->second)) return std::get<double>(it->second);
  if (std::holds_alternative<std::int64_t>(it->second)) {
    return static_cast<double>(std::get<std::int64_t>(it->second));
  }
  throw ConfigInvalidError("solver option '" + key + "' must be numeric");
}

std::int64_t opt_integer(const toml::Table& table, const std::string& key,
                         std::int64_t fallback) {
  auto it = table.find(key);
  if (it == table.end()) return fallback;
  if (std::holds_alternative<std::int64_t>(it->second)) {
    return std::get<std::int64_t>(it->second);
  }
  throw ConfigInvalidError("solver option '" + key + "' must be an integer");
}

std::string opt_text(const toml::Table& table, const std::string& key,
                     const std::string& fallback) {
  auto it = table.find(key);
  if (it == table.end()) return fallback;
  if (std::holds_alternative<std::string>(it->second)) {
    return std::get<std::string>(it->second);
  }
  throw ConfigInvalidError("solver option '" + key + "' must be a string");
}

/// Paper defaults with beta0 = 10 rho_dot; any Algorithm-1 symbol can be
/// overridden per solver table.
SolverConfig oadmm_config(const ExperimentSpec& spec, const SolverEntry& entry) {
  const std::string variant = opt_text(entry.options, "variant", "ep");
  Variant v;
  if (variant == "ep") {
    v = Variant::EuclideanProjection;
  } else if (variant == "rr") {
    v = Variant::RiemannianRetraction;
  } else {
    throw ConfigInvalidError("solver '" + entry.name + "': unknown variant '" + variant +
                             "' (expected ep|rr)");
  }
  SolverConfig cfg = SolverConfig::defaults(v);
  cfg.beta0 = 10.0 * spec.rho_dot;
  cfg.p = opt_number(entry.options, "p", cfg.p);
  cfg.xi = opt_number(entry.options, "xi", cfg.xi);
  cfg.theta = opt_number(entry.options, "theta", cfg.theta);
  cfg.sigma = opt_number(entry.options, "sigma", cfg.sigma);
  cfg.tau = opt_number(entry.options, "tau", 4.0 / (2.0 - cfg.sigma));
  if (v == Variant::EuclideanProjection && entry.options.count("theta") +
                                               entry.options.count("xi") >
                                           0) {
    cfg.alpha = cfg.alpha_bound() - 1e-12;  // keep alpha inside its interval
  }
  cfg.alpha = opt_number(entry.options, "alpha", cfg.alpha);
  cfg.beta0 = opt_number(entry.options, "beta0", cfg.beta0);
  cfg.rho = opt_number(entry.options, "rho", cfg.rho);
  cfg.gamma = opt_number(entry.options, "gamma", cfg.gamma);
  cfg.delta = opt_number(entry.options, "delta", cfg.delta);
  const std::string bb = opt_text(entry.options, "bb", "fixed");
  if (bb == "fixed") {
    cfg.bb = BbMode::Fixed;
  } else if (bb == "bb1") {
    cfg.bb = BbMode::Bb1;
  } else if (bb == "bb2") {
    cfg.bb = BbMode::Bb2;
  } else {
    throw ConfigInvalidError("solver '" + entry.name + "': unknown bb mode '" + bb + "'");
  }
  cfg.bb_fixed = opt_number(entry.options, "b", cfg.bb_fixed);
  cfg.bb_lo = opt_number(entry.options, "b_lo", cfg.bb_lo);
  cfg.bb_hi = opt_number(entry.options, "b_hi", cfg.bb_hi);
  cfg.max_iters = static_cast<int>(opt_integer(entry.options, "max_iters", spec.budget));
  cfg.crit_tol = opt_number(entry.options, "crit_tol", 0.0);
  cfg.seed = spec.seed;
  cfg.deterministic = spec.deterministic;
  return cfg;
}

RunOutput run_one(const ExperimentSpec& spec, const SolverEntry& entry,
                  const CompositeProblem& prob, const StiefelPoint& x0,
                  const Eigen::VectorXd& y0, const Eigen::VectorXd& z0) {
  RunOutput out;
  out.name = entry.name;
  out.kind = entry.kind;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (entry.kind == "oadmm") {
      out.trace = solve(prob, oadmm_config(spec, entry), x0, y0, z0).trace;
    } else if (entry.kind == "subgrad") {
      SubgradConfig cfg;
      cfg.eta0 = opt_number(entry.options, "eta0", 0.0);
      cfg.max_iters = static_cast<int>(opt_integer(entry.options, "max_iters", spec.budget));
      cfg.seed = spec.seed;
      cfg.deterministic = spec.deterministic;
      out.trace = subgrad_solve(prob, cfg, x0).trace;
    } else if (entry.kind == "spgm_ep") {
      SpgmConfig cfg;
      // Scale-matched default smoothing: the continuation loop starts at
      // mu = tau/beta0 with tau = 4/(2-sigma), beta0 = 10 rho_dot.
      const double mu_default = (4.0 / 0.9) / (10.0 * spec.rho_dot);
      cfg.mu0 = opt_number(entry.options, "mu0", mu_default);
      cfg.max_iters = static_cast<int>(opt_integer(entry.options, "max_iters", spec.budget));
      cfg.seed = spec.seed;
      cfg.deterministic = spec.deterministic;
      out.trace = spgm_ep_solve(prob, cfg, x0, y0).trace;
    } else if (entry.kind == "fixed_beta_admm") {
      FixedBetaAdmmConfig cfg;
      cfg.beta = opt_number(entry.options, "beta", 100.0);
      cfg.max_iters = static_cast<int>(opt_integer(entry.options, "max_iters", spec.budget));
      cfg.seed = spec.seed;
      cfg.deterministic = spec.deterministic;
      out.trace = fixed_beta_admm_solve(prob, cfg, x0, y0, z0).trace;
    } else {
      throw ConfigInvalidError("unknown solver kind '" + entry.kind + "' for solver '" +
                               entry.name + "'");
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

nlohmann::json echo_config(const ExperimentSpec& spec) {
  nlohmann::json echo;
  echo["dataset"] = spec.dataset;
  echo["r"] = spec.r;
  echo["rho"] = spec.rho_dot;
  echo["k"] = spec.k;
  echo["budget"] = spec.budget;
  echo["seed"] = spec.seed;
  echo["deterministic"] = spec.deterministic;
  echo["literal_centering"] = spec.literal_centering;
  return echo;
}

}  // namespace

ExperimentSpec ExperimentSpec::from_toml(const toml::Document& doc) {
  ExperimentSpec spec;
  if (!doc.has("", "dataset")) throw ConfigInvalidError("experiment spec needs 'dataset'");
  spec.dataset = doc.text("", "dataset");
  if (doc.has("", "r")) spec.r = doc.integer("", "r");
  if (doc.has("", "rho")) spec.rho_dot = doc.number("", "rho");
  if (doc.has("", "k")) spec.k = doc.integer("", "k");
  if (doc.has("", "budget")) spec.budget = static_cast<int>(doc.integer("", "budget"));
  if (doc.has("", "seed")) spec.seed = static_cast<std::uint64_t>(doc.integer("", "seed"));
  if (doc.has("", "out_dir")) spec.out_dir = doc.text("", "out_dir");
  if (doc.has("", "deterministic")) spec.deterministic = doc.boolean("", "deterministic");
  if (doc.has("", "literal_centering")) {
    spec.literal_centering = doc.boolean("", "literal_centering");
  }
  for (const auto& [table_name, table] : doc.tables) {
    if (table_name.rfind("solver.", 0) != 0) continue;
    SolverEntry entry;
    entry.name = table_name.substr(7);
    if (entry.name.empty()) throw ConfigInvalidError("solver table needs a name");
    auto kind = table.find("kind");
    if (kind == table.end() || !std::holds_alternative<std::string>(kind->second)) {
      throw ConfigInvalidError("solver '" + entry.name + "' needs a string 'kind'");
    }
    entry.kind = std::get<std::string>(kind->second);
    entry.options = table;
    entry.options.erase("kind");
    spec.solvers.push_back(std::move(entry));
  }
  if (spec.solvers.empty()) {
    throw ConfigInvalidError("experiment spec lists no [solver.<name>] tables");
  }
  if (spec.budget < 1) throw ConfigInvalidError("budget must be >= 1");
  if (spec.r < 1) throw ConfigInvalidError("r must be >= 1");
  return spec;
}

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
  return from_toml(toml::parse_file(path));
}

void write_trace_csv(const std::string& path, const std::vector<IterationTrace>& trace) {
  std::ofstream out(path);
  if (!out) throw FileNotFoundError("cannot write '" + path + "'");
  out << "t,objective,crit,theta,primal_residual,beta,eta,backtracks,elapsed_s\n";
  for (const IterationTrace& row : trace) {
    out << row.t << ',' << fmt(row.objective) << ',';
    if (row.crit) out << fmt(*row.crit);
    out << ',';
    if (row.theta) out << fmt(*row.theta);
    out << ',';
    if (row.primal_residual) out << fmt(*row.primal_residual);
    out << ',';
    if (row.beta) out << fmt(*row.beta);
    out << ',';
    if (row.step_eta) out << fmt(*row.step_eta);
    out << ',';
    if (row.backtracks) out << *row.backtracks;
    out << ',';
    if (row.elapsed_seconds) out << fmt(*row.elapsed_seconds);
    out << '\n';
  }
}

std::string emit_summary(const ExperimentSpec& spec, const std::vector<RunOutput>& outputs) {
  if (outputs.empty()) throw EmptyTraceError("emit_summary: no completed runs");
  nlohmann::json doc;
  doc["library_version"] = kLibraryVersion;
  doc["config"] = echo_config(spec);
  nlohmann::json solvers = nlohmann::json::object();
  for (const RunOutput& run : outputs) {
    nlohmann::json entry;
    entry["kind"] = run.kind;
    if (run.error) {
      entry["error"] = *run.error;
    }
    if (!run.trace.empty()) {
      const IterationTrace& last = run.trace.back();
      double best = last.objective;
      for (const IterationTrace& row : run.trace) best = std::min(best, row.objective);
      entry["final_objective"] = last.objective;
      entry["best_objective"] = best;
      entry["iterations"] = last.t;
      if (last.crit) entry["final_crit"] = *last.crit;
    }
    if (!spec.deterministic) entry["wall_time_s"] = run.wall_time_s;
    solvers[run.name] = std::move(entry);
  }
  doc["solvers"] = std::move(solvers);
  return doc.dump(2) + "\n";
}

int run_experiment(const ExperimentSpec& spec) {
  namespace fs = std::filesystem;
  ExperimentSpec resolved = spec;

  Eigen::MatrixXd data;
  try {
    for (const SolverEntry& entry : resolved.solvers) {
      if (entry.kind != "oadmm" && entry.kind != "subgrad" && entry.kind != "spgm_ep" &&
          entry.kind != "fixed_beta_admm") {
        throw ConfigInvalidError("unknown solver kind '" + entry.kind + "' for solver '" +
                                 entry.name + "'");
      }
    }
    data = load_or_synthesize_data(resolved.dataset, resolved.seed,
                                   resolved.literal_centering);
    if (resolved.r > data.rows()) {
      throw ConfigInvalidError("r exceeds the data row count");
    }
    if (resolved.k <= 0) {
      resolved.k = (data.rows() * resolved.r + 9) / 10;  // ceil(n r / 10)
    }
    fs::create_directories(resolved.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const CompositeProblem prob =
      make_sparse_pca(data, resolved.rho_dot, resolved.k, resolved.r);

  // Common start: a projected Gaussian, y on the constraint, zero multiplier.
  GaussianSampler rng(resolved.seed);
  const StiefelPoint x0 = project_to_stiefel(rng.matrix(prob.n, prob.r));
  const Eigen::VectorXd y0 = prob.a->apply(x0.matrix());
  const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(prob.m);

  std::vector<RunOutput> outputs(resolved.solvers.size());
  int max_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OADMM_THREADS")) {
    max_threads = std::max(1, std::atoi(env));
  }
  const int workers =
      std::max(1, std::min<int>(max_threads, static_cast<int>(resolved.solvers.size())));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= resolved.solvers.size()) break;
      outputs[i] = run_one(resolved, resolved.solvers[i], prob, x0, y0, z0);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  int status = 0;
  for (const RunOutput& run : outputs) {
    if (run.error) {
      std::cerr << "solver '" << run.name << "' failed: " << *run.error << "\n";
      status = 1;
      continue;
    }
    write_trace_csv((fs::path(resolved.out_dir) / (run.name + ".trace.csv")).string(),
                    run.trace);
  }

  {
    std::ofstream summary(fs::path(resolved.out_dir) / "summary.json");
    summary << emit_summary(resolved, outputs);
  }

  // Plot-ready table: one objective column per solver, aligned on t.
  {
    std::set<int> ts;
    std::vector<std::map<int, double>> per_solver(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      for (const IterationTrace& row : outputs[i].trace) {
        ts.insert(row.t);
        per_solver[i][row.t] = row.objective;
      }
    }
    std::ofstream plot(fs::path(resolved.out_dir) / "plot_objective.csv");
    plot << "t";
    for (const RunOutput& run : outputs) plot << ',' << run.name;
    plot << '\n';
    for (int t : ts) {
      plot << t;
      for (const auto& series : per_solver) {
        plot << ',';
        auto it = series.find(t);
        if (it != series.end()) plot << fmt(it->second);
      }
      plot << '\n';
    }
  }
  return status;
}

bool run_invariant_suite() {
  bool all_ok = true;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    all_ok = all_ok && ok;
  };

  GaussianSampler rng(7);

  {  // Manifold: tangent contraction and direction-norm sandwich bounds.
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
      StiefelPoint x = project_to_stiefel(rng.matrix(8, 3));
      Eigen::MatrixXd delta = rng.matrix(8, 3);
      ok = ok && tangent_project(x, delta).norm() <= delta.norm() + 1e-12;
      Eigen::MatrixXd g = rng.matrix(8, 3);
      const double rho = 0.25 + 2.0 * rng.uniform01();
      Eigen::MatrixXd g_rho = descent_direction(x, g, rho);
      Eigen::MatrixXd g_half = descent_direction(x, g, 0.5);
      const double lo = std::min(1.0, 2.0 * rho) * g_half.norm();
      const double hi = std::max(1.0, 2.0 * rho) * g_half.norm();
      ok = ok && g_rho.norm() >= lo - 1e-9 && g_rho.norm() <= hi + 1e-9;
      ok = ok && std::max(1.0, 2.0 * rho) * g.cwiseProduct(g_rho).sum() >=
                     g_rho.squaredNorm() - 1e-9;
    }
    report("manifold identities (contraction, direction bounds)", ok);
  }

  {  // Envelope: monotonicity in mu and gradient drift, l1 and MCP entries.
    bool ok = true;
    ScaledL1 l1(2.0, 4);
    MinimaxConcavePenalty mcp(1.5, 2.0, 4);
    const ProxFunction* entries[] = {&l1, &mcp};
    for (const ProxFunction* h : entries) {
      const double mu_cap = (h->weak_convexity() > 0.0)
                                ? 0.5 / h->weak_convexity()
                                : 1.0;
      for (int trial = 0; trial < 200 && ok; ++trial) {
        Eigen::VectorXd y = rng.vector(4) * 3.0;
        double mu1 = mu_cap * (0.2 + 0.8 * rng.uniform01());
        double mu2 = mu1 * (0.05 + 0.9 * rng.uniform01());
        const double gap = moreau_value(*h, mu2, y) - moreau_value(*h, mu1, y);
        const double cap = std::min(mu1 / (2.0 * mu2), 1.0) * (mu1 - mu2) *
                           h->lipschitz() * h->lipschitz();
        ok = ok && gap >= -1e-9 && gap <= cap + 1e-9;
        const double drift = (moreau_grad(*h, mu1, y) - moreau_grad(*h, mu2, y)).norm();
        ok = ok && drift <= (mu1 / mu2 - 1.0) * h->lipschitz() + 1e-9;
      }
    }
    report("Moreau envelope bounds (value gap, gradient drift)", ok);
  }

  {  // Solver: short run keeps feasibility, the dual identity, and a
     // non-increasing potential.
    bool ok = true;
    try {
      Eigen::MatrixXd d = synth_randn(30, 12, 3);
      prepare_columns(d);
      CompositeProblem prob = make_sparse_pca(d, 5.0, 15, 4);
      GaussianSampler init(11);
      StiefelPoint x0 = project_to_stiefel(init.matrix(prob.n, prob.r));
      Eigen::VectorXd y0 = prob.a->apply(x0.matrix());
      Eigen::VectorXd z0 = Eigen::VectorXd::Zero(prob.m);
      for (Variant v : {Variant::EuclideanProjection, Variant::RiemannianRetraction}) {
        SolverConfig cfg = SolverConfig::defaults(v);
        cfg.beta0 = 50.0;
        cfg.max_iters = 100;
        cfg.deterministic = true;
        double prev_theta = 0.0;
        bool have_prev = false;
        solve(prob, cfg, x0, y0, z0, [&](const IterationInfo& info) {
          ok = ok && StiefelPoint::feasibility_error(info.x.matrix()) <= 1e-10;
          ok = ok && info.dual_identity_residual <= 1e-8;
          if (have_prev) {
            ok = ok && info.theta <= prev_theta + 1e-9 * (1.0 + std::abs(prev_theta));
          }
          prev_theta = info.theta;
          have_prev = true;
        });
      }
    } catch (const std::exception& e) {
      std::cerr << "solver invariant run failed: " << e.what() << "\n";
      ok = false;
    }
    report("solver invariants (feasibility, dual identity, potential decrease)", ok);
  }

  return all_ok;
}

}  // namespace oadmm
