#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netrand/csv.hpp"
#include "netrand/design.hpp"
#include "netrand/errors.hpp"
#include "netrand/graph.hpp"
#include "netrand/montecarlo.hpp"
#include "netrand/oracle.hpp"
#include "netrand/random.hpp"

namespace netrand::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  return f;
}

SparseGraph load_edges(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list '" + path + "'");
  try {
    return from_edge_list(in);
  } catch (const ParseError& e) {
    throw IoError(path + ": " + e.what());
  }
}

PolicySet parse_policies(const std::string& s) {
  if (s == "adaptive") return PolicySet::Adaptive;
  if (s == "random") return PolicySet::Random;
  return PolicySet::Both;
}

std::vector<std::size_t> expand_range(const std::string& spec) {
  // start:stop[:step], inclusive
  std::vector<std::size_t> parts;
  std::stringstream ss(spec);
  for (std::string tok; std::getline(ss, tok, ':');) {
    try {
      parts.push_back(std::stoull(tok));
    } catch (const std::exception&) {
      throw UsageError("bad --n-range '" + spec + "'");
    }
  }
  if (parts.size() < 2 || parts.size() > 3) throw UsageError("--n-range expects start:stop[:step]");
  const std::size_t step = parts.size() == 3 ? parts[2] : 1;
  if (step == 0 || parts[0] > parts[1]) throw UsageError("--n-range needs start <= stop and step > 0");
  std::vector<std::size_t> out;
  for (std::size_t n = parts[0]; n <= parts[1]; n += step) out.push_back(n);
  return out;
}

nlohmann::json spec_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["model"] = to_string(spec.model);
  j["sizes"] = spec.sizes;
  j["policies"] = spec.policies == PolicySet::Both ? "both" : (spec.policies == PolicySet::Adaptive ? "adaptive" : "random");
  j["b"] = spec.bias;
  j["reps"] = spec.reps;
  j["seed"] = spec.seed;
  j["seed_derivation"] =
      "root = derive_seed(seed, size_index, replicate); graph/adaptive/random/outcome streams = "
      "derive_seed(root, 0, 0, {0,1,2,3|4}); derive_seed folds each key through splitmix64";
  switch (spec.model) {
    case Model::ER:
      if (spec.sparse_log_divisor) {
        j["sparse_log_divisor"] = *spec.sparse_log_divisor;
      } else {
        j["p"] = spec.p;
      }
      break;
    case Model::SBM:
      j["p_in"] = spec.p_in;
      j["p_out"] = spec.p_out;
      j["sbm_labels"] = "iid Bernoulli(1/2) per node";
      break;
    case Model::GOE:
      if (spec.sparse_log_divisor) {
        j["sparse_log_divisor"] = *spec.sparse_log_divisor;
      } else {
        j["sigma2"] = spec.sigma2;
      }
      break;
    case Model::Real:
      j["sampling"] = "uniform node-induced sample, uniform arrival order; independent samples per size";
      break;
  }
  if (spec.outcome) {
    j["outcome"] = {{"mu0", spec.outcome->mu0},
                    {"mu1", spec.outcome->mu1},
                    {"sigma_z", spec.outcome->sigma_z},
                    {"sigma_eps", spec.outcome->sigma_eps}};
    j["odd_n_estimator"] = "W uses the first n-1 (paired) subjects when n is odd";
  }
  j["imbalance_convention"] = "I reported as I_{2m} for n = 2m+1 (I_{2m+1} = I_{2m})";
  j["number_format"] = "shortest round-trip fixed notation; integer-valued I2 printed exactly";
  return j;
}

void write_experiment(const std::string& prefix, const ExperimentSpec& spec, const ExperimentResult& result,
                      bool with_reductions, std::ostream& out) {
  {
    auto f = open_output(prefix + "_rows.csv");
    csv::write_results(f, result.rows);
  }
  {
    auto f = open_output(prefix + "_summary.csv");
    csv::write_summaries(f, result.summaries);
  }
  if (with_reductions) {
    const auto reps = reductions(result.rows);
    auto f = open_output(prefix + "_reduction.csv");
    csv::write_reductions(f, reps);
    for (const auto& r : reps)
      out << "n=" << r.n << " adaptive=" << csv::format_number(r.adaptive.mean)
          << " random=" << csv::format_number(r.random.mean) << " reduction=" << csv::format_number(r.reduction)
          << (r.mean_density ? " density=" + csv::format_number(*r.mean_density) : std::string()) << '\n';
  }
  {
    auto f = open_output(prefix + "_meta.json");
    f << spec_json(spec).dump(2) << '\n';
  }
  out << "wrote " << prefix << "_rows.csv (" << result.rows.size() << " rows), " << prefix << "_summary.csv\n";
}

// simulate -------------------------------------------------------------------

struct SimulateOptions {
  std::string model;
  std::vector<std::size_t> sizes;
  std::string range;
  std::optional<double> p, p_in, p_out, sigma2, sparse;
  double b = 0.95;
  std::string policy = "both";
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  std::optional<double> mu0, mu1, sigma_z, sigma_eps;
  std::string out;
  unsigned threads = 0;
  bool odd = false;
};

void add_simulate(CLI::App& app, SimulateOptions& o) {
  app.add_option("--model", o.model, "Graph model")->required()->check(CLI::IsMember({"er", "sbm", "goe"}));
  app.add_option("--n", o.sizes, "Network size (repeatable)");
  app.add_option("--n-range", o.range, "Sizes start:stop[:step], inclusive");
  app.add_option("--p", o.p, "ER edge probability");
  app.add_option("--p-in", o.p_in, "SBM within-group probability");
  app.add_option("--p-out", o.p_out, "SBM between-group probability");
  app.add_option("--sigma2", o.sigma2, "GOE off-diagonal variance");
  app.add_option("--sparse-log-density", o.sparse, "Use p_n = log(n)/(c n) (er, goe)");
  app.add_option("--b", o.b, "Biasing probability")->capture_default_str();
  app.add_option("--policy", o.policy, "Design policy")->check(CLI::IsMember({"adaptive", "random", "both"}))->capture_default_str();
  app.add_option("--reps", o.reps, "Replicates per size")->capture_default_str();
  app.add_option("--seed", o.seed, "Base seed")->capture_default_str();
  app.add_option("--mu0", o.mu0, "Treatment 0 effect (enables outcome simulation)");
  app.add_option("--mu1", o.mu1, "Treatment 1 effect");
  app.add_option("--sigma-z", o.sigma_z, "Covariate standard deviation");
  app.add_option("--sigma-eps", o.sigma_eps, "Noise standard deviation");
  app.add_option("--out", o.out, "Output path prefix")->required();
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  app.add_flag("--odd", o.odd, "Allow odd sizes");
}

ExperimentSpec simulate_spec(const SimulateOptions& o) {
  ExperimentSpec spec;
  spec.sizes = o.sizes;
  if (!o.range.empty()) {
    const auto more = expand_range(o.range);
    spec.sizes.insert(spec.sizes.end(), more.begin(), more.end());
  }
  if (spec.sizes.empty()) throw UsageError("give at least one --n or --n-range");

  if (o.model == "er") {
    spec.model = Model::ER;
    if (o.p_in || o.p_out || o.sigma2) throw UsageError("er takes --p or --sparse-log-density only");
    if (o.p.has_value() == o.sparse.has_value()) throw UsageError("er needs exactly one of --p, --sparse-log-density");
    if (o.p) spec.p = *o.p;
  } else if (o.model == "sbm") {
    spec.model = Model::SBM;
    if (o.p || o.sigma2 || o.sparse) throw UsageError("sbm takes --p-in and --p-out only");
    if (!o.p_in || !o.p_out) throw UsageError("sbm needs --p-in and --p-out");
    spec.p_in = *o.p_in;
    spec.p_out = *o.p_out;
  } else {
    spec.model = Model::GOE;
    if (o.p || o.p_in || o.p_out) throw UsageError("goe takes --sigma2 or --sparse-log-density only");
    if (o.sigma2.has_value() == o.sparse.has_value())
      throw UsageError("goe needs exactly one of --sigma2, --sparse-log-density");
    if (o.sigma2) spec.sigma2 = *o.sigma2;
  }
  spec.sparse_log_divisor = o.sparse;
  spec.policies = parse_policies(o.policy);
  spec.bias = o.b;
  spec.reps = o.reps;
  spec.seed = o.seed;
  spec.threads = o.threads;
  spec.allow_odd = o.odd;
  if (o.mu0 || o.mu1 || o.sigma_z || o.sigma_eps) {
    OutcomeParams params;
    params.mu0 = o.mu0.value_or(0.0);
    params.mu1 = o.mu1.value_or(0.0);
    params.sigma_z = o.sigma_z.value_or(1.0);
    params.sigma_eps = o.sigma_eps.value_or(1.0);
    spec.outcome = params;
  }
  return spec;
}

// real -------------------------------------------------------------------------

struct RealOptions {
  std::string edges;
  std::size_t sample = 10000;
  double b = 0.85;
  std::size_t reps = 20;
  std::uint64_t seed = 0;
  std::vector<std::size_t> sweep;
  std::string out;
  unsigned threads = 0;
};

void add_real(CLI::App& app, RealOptions& o) {
  app.add_option("--edges", o.edges, "SNAP edge list")->required();
  app.add_option("--sample", o.sample, "Induced sample size")->capture_default_str();
  app.add_option("--b", o.b, "Biasing probability")->capture_default_str();
  app.add_option("--reps", o.reps, "Replicates (fresh sample and order each)")->capture_default_str();
  app.add_option("--seed", o.seed, "Base seed")->capture_default_str();
  app.add_option("--n-sweep", o.sweep, "Sample sizes to sweep instead of --sample");
  app.add_option("--out", o.out, "Output path prefix")->required();
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

// assign -----------------------------------------------------------------------

struct AssignOptions {
  std::string edges;
  std::string order = "file";
  double b = 0.85;
  std::string policy = "adaptive";
  std::uint64_t seed = 0;
  std::string out;
};

void add_assign(CLI::App& app, AssignOptions& o) {
  app.add_option("--edges", o.edges, "SNAP edge list defining the cohort")->required();
  app.add_option("--order", o.order, "Arrival order")->check(CLI::IsMember({"file", "random"}))->capture_default_str();
  app.add_option("--b", o.b, "Biasing probability")->capture_default_str();
  app.add_option("--policy", o.policy, "Design policy")->check(CLI::IsMember({"adaptive", "random"}))->capture_default_str();
  app.add_option("--seed", o.seed, "Seed")->capture_default_str();
  app.add_option("--out", o.out, "Output CSV (default stdout)");
}

void run_assign(const AssignOptions& o, std::ostream& out) {
  const SparseGraph cohort = load_edges(o.edges);
  if (cohort.size() < 2) throw UsageError("cohort needs at least two subjects");
  Graph g = Graph::binary(2);
  std::vector<std::size_t> node_of;
  if (o.order == "random") {
    auto sample = induced_subgraph_sample(cohort, cohort.size(), derive_seed(o.seed, 0, 0, 0));
    g = std::move(sample.graph);
    node_of = std::move(sample.nodes);
  } else {
    g = cohort.to_dense();
    node_of.resize(cohort.size());
    for (std::size_t i = 0; i < node_of.size(); ++i) node_of[i] = i;
  }
  const DesignConfig cfg{o.policy == "random" ? Policy::Random : Policy::Adaptive, o.b, derive_seed(o.seed, 0, 0, 1)};
  const DesignRun run = run_design(g, cfg);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.out.empty()) {
    file = open_output(o.out);
    sink = &file;
  }
  *sink << "index,node_id,treatment,I\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t pair = std::min(i / 2 + 1, run.squared.size());
    *sink << i << ',' << cohort.label(node_of[i]) << ',' << run.signs.treatment(i) << ','
          << csv::format_number(run.imbalance_at(pair)) << '\n';
  }
}

// oracle -----------------------------------------------------------------------

struct OracleOptions {
  std::string model = "er";
  std::size_t n = 8;
  double p = 0.5;
  std::uint64_t seed = 0;
  double b = 0.95;
  std::size_t runs = 100000;
  std::string edges;
};

void add_oracle(CLI::App& app, OracleOptions& o) {
  app.add_option("--model", o.model, "Graph model")->check(CLI::IsMember({"er"}))->capture_default_str();
  app.add_option("--n", o.n, "Number of subjects (even, <= 20)")->capture_default_str();
  app.add_option("--p", o.p, "ER edge probability")->capture_default_str();
  app.add_option("--seed", o.seed, "Seed")->capture_default_str();
  app.add_option("--b", o.b, "Biasing probability")->capture_default_str();
  app.add_option("--runs", o.runs, "Engine Monte Carlo runs")->capture_default_str();
  app.add_option("--edges", o.edges, "Use this small edge list instead of an ER draw");
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

void run_oracle(const OracleOptions& o, std::ostream& out) {
  Graph g = Graph::binary(2);
  if (!o.edges.empty()) {
    g = load_edges(o.edges).to_dense();
  } else {
    if (o.n > kBruteForceMaxN) throw UsageError("oracle limited to n <= " + std::to_string(kBruteForceMaxN));
    g = gen_er({o.n, o.p}, derive_seed(o.seed, 0, 0, 0));
  }
  if (g.size() > kBruteForceMaxN) throw UsageError("oracle limited to n <= " + std::to_string(kBruteForceMaxN));
  if (g.size() % 2 != 0) throw UsageError("oracle needs an even number of subjects");
  const DesignConfig cfg{Policy::Adaptive, o.b, 0};
  cfg.validate();
  if (o.runs < 2) throw UsageError("--runs must be >= 2");

  const OracleResult min = brute_force_min(g);
  std::optional<OracleResult> exact;
  if (g.size() <= kExactTreeMaxN) exact = exact_policy_expectation(g, cfg);

  std::vector<double> finals;
  finals.reserve(o.runs);
  bool above_min = true;
  for (std::size_t r = 0; r < o.runs; ++r) {
    const double sq = run_design(g, {Policy::Adaptive, o.b, derive_seed(o.seed, 1, r, 1)}).final_squared;
    above_min = above_min && sq >= min.min_squared;
    finals.push_back(sq);
  }
  const SampleMoments mc = sample_moments(finals);

  out << "n: " << g.size() << "\n";
  out << "density: " << csv::format_number(density(g)) << "\n";
  out << "brute_force_min_I2: " << csv::format_number(min.min_squared) << " (minimizers: " << min.argmin_count << ")\n";
  if (exact) {
    out << "exact_expected_I2: " << csv::format_number(*exact->expected_squared)
        << (exact->tie_branch ? " (tree contains tie branches)" : "") << "\n";
  } else {
    out << "exact_expected_I2: skipped (n > " << kExactTreeMaxN << ")\n";
  }
  out << "engine_mean_I2: " << csv::format_number(mc.mean) << " +/- " << csv::format_number(mc.se) << " (SE, "
      << o.runs << " runs)\n";
  out << "check engine runs >= brute-force minimum: " << verdict(above_min) << "\n";
  if (exact) {
    const bool within = std::abs(mc.mean - *exact->expected_squared) <= 3.0 * mc.se ||
                        (mc.se == 0.0 && mc.mean == *exact->expected_squared);
    out << "check engine mean within 3 SE of exact: " << verdict(within) << "\n";
    out << "check minimum <= exact expectation: " << verdict(min.min_squared <= *exact->expected_squared) << "\n";
    if (o.b == 0.5) {
      const double avg = balanced_average(g);
      out << "check b=1/2 exact equals balanced average: "
          << verdict(std::abs(avg - *exact->expected_squared) <= 1e-9 * std::max(1.0, avg)) << "\n";
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive pairwise randomization for network-correlated experiments"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep over random graph models");
  add_simulate(*simulate, sim);

  RealOptions real;
  auto* real_cmd = app.add_subcommand("real", "Adaptive vs random design on samples of a real network");
  add_real(*real_cmd, real);

  AssignOptions assign;
  auto* assign_cmd = app.add_subcommand("assign", "Assign treatments to a concrete cohort");
  add_assign(*assign_cmd, assign);

  OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive cross-checks on a small instance");
  add_oracle(*oracle_cmd, oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*simulate) {
      const ExperimentSpec spec = simulate_spec(sim);
      const auto result = run_experiment(spec);
      write_experiment(sim.out, spec, result, false, out);
    } else if (*real_cmd) {
      const SparseGraph network = load_edges(real.edges);
      ExperimentSpec spec;
      spec.model = Model::Real;
      spec.source = &network;
      spec.sizes = real.sweep.empty() ? std::vector<std::size_t>{real.sample} : real.sweep;
      spec.allow_odd = true;
      spec.policies = PolicySet::Both;
      spec.bias = real.b;
      spec.reps = real.reps;
      spec.seed = real.seed;
      spec.threads = real.threads;
      for (std::size_t k : spec.sizes)
        if (k > network.size())
          throw UsageError("sample size " + std::to_string(k) + " exceeds network size " +
                           std::to_string(network.size()));
      out << "network: " << network.size() << " nodes, " << network.edge_count()
          << " edges, density " << csv::format_number(density(network)) << "\n";
      const auto result = run_experiment(spec);
      write_experiment(real.out, spec, result, true, out);
    } else if (*assign_cmd) {
      run_assign(assign, out);
    } else if (*oracle_cmd) {
      run_oracle(oracle, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LimitError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace netrand::cli
