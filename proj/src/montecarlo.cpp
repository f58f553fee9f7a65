#include "netrand/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "netrand/errors.hpp"
#include "netrand/random.hpp"

namespace netrand {

const char* to_string(Model m) noexcept {
  switch (m) {
    case Model::ER: return "er";
    case Model::SBM: return "sbm";
    case Model::GOE: return "goe";
    case Model::Real: return "real";
  }
  return "?";
}

namespace {

enum Stream : std::uint64_t { kGraph = 0, kAdaptive = 1, kRandom = 2, kOutcomeAdaptive = 3, kOutcomeRandom = 4 };

std::uint64_t sub_seed(std::uint64_t root, Stream s) { return derive_seed(root, 0, 0, s); }

std::vector<Policy> policies_of(PolicySet set) {
  switch (set) {
    case PolicySet::Adaptive: return {Policy::Adaptive};
    case PolicySet::Random: return {Policy::Random};
    case PolicySet::Both: return {Policy::Adaptive, Policy::Random};
  }
  return {};
}

}  // namespace

double ExperimentSpec::p_for(std::size_t n) const {
  if (sparse_log_divisor) return std::log(static_cast<double>(n)) / (*sparse_log_divisor * static_cast<double>(n));
  return p;
}

double ExperimentSpec::sigma2_for(std::size_t n) const {
  if (sparse_log_divisor) {
    const double pn = p_for(n);
    return pn * (1.0 - pn);
  }
  return sigma2;
}

void ExperimentSpec::validate() const {
  if (sizes.empty()) throw ParameterError("experiment needs at least one size");
  if (reps < 1) throw ParameterError("experiment needs reps >= 1");
  DesignConfig{Policy::Adaptive, bias, 0}.validate();
  if (sparse_log_divisor && !(*sparse_log_divisor > 0.0)) throw ParameterError("sparse divisor must be positive");
  if (sparse_log_divisor && (model == Model::SBM || model == Model::Real))
    throw ParameterError("sparse density schedule applies to er and goe only");
  if (outcome) outcome->validate();
  for (std::size_t n : sizes) {
    if (n < 2) throw ParameterError("sizes must be >= 2");
    if (n % 2 == 1 && !allow_odd) throw ParameterError("odd size " + std::to_string(n) + " needs odd-n mode");
    switch (model) {
      case Model::ER: {
        const double pn = p_for(n);
        if (!(pn > 0.0 && pn < 1.0)) throw ParameterError("ER probability outside (0,1) for n=" + std::to_string(n));
        break;
      }
      case Model::SBM:
        if (!(p_out > 0.0 && p_out <= p_in && p_in < 1.0))
          throw ParameterError("SBM rates must satisfy 0 < p_out <= p_in < 1");
        break;
      case Model::GOE:
        if (!(sigma2_for(n) > 0.0)) throw ParameterError("GOE variance must be positive");
        break;
      case Model::Real:
        if (source == nullptr) throw ParameterError("real-data experiment needs a source graph");
        if (n > source->size())
          throw ParameterError("sample size " + std::to_string(n) + " exceeds network size " +
                               std::to_string(source->size()));
        break;
    }
  }
}

// Statistics -----------------------------------------------------------------

SampleMoments sample_moments(std::span<const double> xs) {
  SampleMoments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  m.mean = mean;
  if (xs.size() > 1) {
    m.sd = std::sqrt(m2 / static_cast<double>(xs.size() - 1));
    m.se = m.sd / std::sqrt(static_cast<double>(xs.size()));
  }
  return m;
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ParameterError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::vector<MomentSummary> summarize(std::span<const ResultRow> rows) {
  struct Group {
    const ResultRow* first;
    std::vector<const ResultRow*> members;
  };
  std::vector<Group> groups;
  for (const auto& row : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.first->model == row.model && g.first->n == row.n && g.first->policy == row.policy;
    });
    if (it == groups.end()) {
      groups.push_back({&row, {}});
      it = std::prev(groups.end());
    }
    it->members.push_back(&row);
  }

  std::vector<MomentSummary> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<double> i1, i2, i4, metric, w;
    for (const ResultRow* r : g.members) {
      i1.push_back(r->imbalance);
      i2.push_back(r->squared);
      i4.push_back(r->fourth);
      metric.push_back(r->two_over_n);
      if (r->estimate) w.push_back(*r->estimate);
    }
    MomentSummary s;
    s.model = g.first->model;
    s.n = g.first->n;
    s.policy = g.first->policy;
    s.reps = g.members.size();
    s.imbalance = sample_moments(i1);
    s.squared = sample_moments(i2);
    s.fourth = sample_moments(i4);
    s.two_over_n = sample_moments(metric);
    s.ci_lower = s.two_over_n.mean - 1.96 * s.two_over_n.se;
    s.ci_upper = s.two_over_n.mean + 1.96 * s.two_over_n.se;
    s.iqr_lower = quantile(metric, 0.25);
    s.iqr_upper = quantile(metric, 0.75);
    if (w.size() == g.members.size() && !w.empty()) s.estimate = sample_moments(w);
    out.push_back(std::move(s));
  }
  return out;
}

// Experiment driver ------------------------------------------------------------

namespace {

ResultRow make_row(const ExperimentSpec& spec, std::size_t n, Policy policy, std::size_t replicate,
                   std::uint64_t root, const DesignRun& run) {
  ResultRow row;
  row.model = to_string(spec.model);
  row.n = n;
  row.policy = policy;
  row.bias = policy == Policy::Random ? 0.5 : spec.bias;
  row.replicate = replicate;
  row.imbalance = run.final_imbalance;
  row.squared = run.final_squared;
  row.fourth = run.final_squared * run.final_squared;
  row.two_over_n = 2.0 * run.final_imbalance / static_cast<double>(n);
  row.seed = root;
  switch (spec.model) {
    case Model::ER: row.p = spec.p_for(n); break;
    case Model::SBM:
      row.p_in = spec.p_in;
      row.p_out = spec.p_out;
      break;
    case Model::GOE: row.sigma2 = spec.sigma2_for(n); break;
    case Model::Real: break;
  }
  return row;
}

std::vector<ResultRow> run_replicate(const ExperimentSpec& spec, std::size_t cell, std::size_t replicate) {
  const std::size_t n = spec.sizes[cell];
  const std::uint64_t root = derive_seed(spec.seed, cell, replicate);
  const std::uint64_t gseed = sub_seed(root, kGraph);

  Graph g = Graph::binary(2);
  std::optional<double> sample_density;
  switch (spec.model) {
    case Model::ER: g = gen_er({n, spec.p_for(n)}, gseed); break;
    case Model::SBM: g = gen_sbm({n, spec.p_in, spec.p_out}, gseed); break;
    case Model::GOE: g = gen_goe({n, spec.sigma2_for(n)}, gseed); break;
    case Model::Real:
      g = induced_subgraph_sample(*spec.source, n, gseed).graph;
      sample_density = density(g);
      break;
  }

  std::vector<ResultRow> rows;
  for (Policy policy : policies_of(spec.policies)) {
    const bool adaptive = policy == Policy::Adaptive;
    const DesignConfig cfg{policy, spec.bias, sub_seed(root, adaptive ? kAdaptive : kRandom)};
    const DesignRun run = run_design(g, cfg);
    ResultRow row = make_row(spec, n, policy, replicate, root, run);
    if (sample_density) row.p = sample_density;
    if (spec.outcome) {
      Rng orng(sub_seed(root, adaptive ? kOutcomeAdaptive : kOutcomeRandom));
      row.estimate = simulate_outcomes(g, run.signs, *spec.outcome, orng).estimate;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t tasks = spec.sizes.size() * spec.reps;
  std::vector<std::vector<ResultRow>> slots(tasks);

  unsigned workers = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      try {
        slots[t] = run_replicate(spec, t / spec.reps, t % spec.reps);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.rows.reserve(tasks * 2);
  for (auto& slot : slots)
    for (auto& row : slot) result.rows.push_back(std::move(row));
  result.summaries = summarize(result.rows);
  return result;
}

// Closed forms -----------------------------------------------------------------

double theorem1_exact(std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  return nn * nn * p * (1.0 - p) + nn * (1.0 - 2.0 * p) * (1.0 - p);
}

double theorem2_bound(double p, double b) {
  const double x = 2.0 * b - 1.0;
  const double q = p * (1.0 - p);
  return q * q - 0.125 * x * std::pow(2.0 - std::numbers::sqrt2 * x, 1.5) * std::pow(q, 2.5);
}

double theorem3_bound(double b) {
  const double x = 2.0 * b - 1.0;
  const double c = std::sqrt(2.0 / std::numbers::pi);
  return 1.0 - 0.25 * x * c * std::pow(4.0 - c * x, 1.5);
}

// Reductions -------------------------------------------------------------------

ReductionReport make_reduction(std::size_t n, const SampleMoments& adaptive, const SampleMoments& random) {
  ReductionReport r;
  r.n = n;
  r.reps = std::min(adaptive.count, random.count);
  r.adaptive = adaptive;
  r.random = random;
  if (random.mean == 0.0) {
    r.reduction = 0.0;
    r.zero_denominator = true;
  } else {
    r.reduction = 1.0 - adaptive.mean / random.mean;
  }
  return r;
}

ReductionReport reduction_report(const Graph& g, double b, std::size_t reps, std::uint64_t seed) {
  if (reps < 1) throw ParameterError("reduction report needs reps >= 1");
  DesignConfig{Policy::Adaptive, b, 0}.validate();
  std::vector<double> adaptive, random;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::uint64_t root = derive_seed(seed, 0, r);
    adaptive.push_back(run_design(g, {Policy::Adaptive, b, sub_seed(root, kAdaptive)}).final_imbalance);
    random.push_back(run_design(g, {Policy::Random, b, sub_seed(root, kRandom)}).final_imbalance);
  }
  return make_reduction(g.size(), sample_moments(adaptive), sample_moments(random));
}

std::vector<ReductionReport> reductions(std::span<const ResultRow> rows) {
  std::vector<std::size_t> sizes;
  for (const auto& r : rows)
    if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) sizes.push_back(r.n);

  std::vector<ReductionReport> out;
  for (std::size_t n : sizes) {
    std::vector<double> adaptive, random, dens;
    for (const auto& r : rows) {
      if (r.n != n) continue;
      (r.policy == Policy::Adaptive ? adaptive : random).push_back(r.imbalance);
      if (r.p && r.policy == Policy::Adaptive) dens.push_back(*r.p);
    }
    if (adaptive.empty() || random.empty()) continue;
    auto rep = make_reduction(n, sample_moments(adaptive), sample_moments(random));
    if (!dens.empty()) rep.mean_density = sample_moments(dens).mean;
    out.push_back(rep);
  }
  return out;
}

}  // namespace netrand
