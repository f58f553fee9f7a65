#include "netrand/design.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include "netrand/errors.hpp"

namespace netrand {

const char* to_string(Policy p) noexcept { return p == Policy::Adaptive ? "adaptive" : "random"; }

void DesignConfig::validate() const {
  if (!(bias >= 0.5 && bias <= 1.0))
    throw ParameterError("biasing probability must lie in [1/2, 1], got " + std::to_string(bias));
}

// SignVector -----------------------------------------------------------------

SignVector::SignVector(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
  for (auto s : signs_)
    if (s != 1 && s != -1) throw ContractError("sign entries must be +1 or -1");
}

SignVector SignVector::from_treatments(std::span<const int> treatments) {
  SignVector out;
  for (int t : treatments) {
    if (t != 0 && t != 1) throw ContractError("treatments must be 0 or 1");
    out.push_back(1 - 2 * t);
  }
  return out;
}

void SignVector::push_back(int sign) {
  if (sign != 1 && sign != -1) throw ContractError("sign entries must be +1 or -1");
  signs_.push_back(static_cast<std::int8_t>(sign));
}

bool SignVector::pairwise_balanced() const noexcept {
  for (std::size_t i = 0; i + 1 < signs_.size(); i += 2)
    if (signs_[i] + signs_[i + 1] != 0) return false;
  return true;
}

long SignVector::sum() const noexcept {
  long s = 0;
  for (auto v : signs_) s += v;
  return s;
}

SignVector SignVector::negated() const {
  SignVector out = *this;
  for (auto& s : out.signs_) s = static_cast<std::int8_t>(-s);
  return out;
}

double DesignRun::imbalance_at(std::size_t pair) const {
  if (pair == 0 || pair > squared.size()) throw ContractError("pair index out of range");
  return std::sqrt(squared[pair - 1]);
}

// Engine ---------------------------------------------------------------------

namespace {

template <class Scalar>
constexpr bool kBinary = std::is_same_v<Scalar, std::int64_t>;

template <class Scalar>
void check_kind(const Graph& g) {
  if (g.is_binary() != kBinary<Scalar>)
    throw ContractError("design state scalar does not match the graph kind");
}

inline bool bit(std::span<const std::uint64_t> row, std::size_t j) { return (row[j >> 6] >> (j & 63)) & 1ULL; }

}  // namespace

template <class Scalar>
DesignState<Scalar> assign_first_pair(const RevealedView& view, Rng& rng) {
  check_kind<Scalar>(view.graph());
  if (view.revealed() < 2) throw ContractError("first pair needs A^{(2)} revealed");
  const auto a = static_cast<Scalar>(view.at(0, 1));
  const auto d0 = static_cast<Scalar>(view.at(0, 0));
  const auto d1 = static_cast<Scalar>(view.at(1, 1));
  const int s = uniform01(rng) < 0.5 ? 1 : -1;

  DesignState<Scalar> st;
  st.pairs = 1;
  st.signs.push_back(s);
  st.signs.push_back(-s);
  st.imbalance = {static_cast<Scalar>(s) * (d0 - a), static_cast<Scalar>(s) * (a - d1)};
  st.squared = st.imbalance[0] * st.imbalance[0] + st.imbalance[1] * st.imbalance[1];
  return st;
}

template <class Scalar>
void make_increment(const RevealedView& view, const DesignState<Scalar>& state, PairIncrement<Scalar>& out) {
  check_kind<Scalar>(view.graph());
  const std::size_t k = 2 * state.pairs;
  const std::size_t u = k, v = k + 1;
  if (state.imbalance.size() != k || state.signs.size() != k)
    throw ContractError("design state is not at a pair boundary");
  if (view.revealed() < k + 2) throw ContractError("increment needs rows 2m+1, 2m+2 revealed");

  out.column_diff.resize(k);
  Scalar zu = 0, zv = 0;
  const auto tau = state.signs.values();
  if constexpr (kBinary<Scalar>) {
    const auto ru = view.bit_row_prefix(u, k);
    const auto rv = view.bit_row_prefix(v, k);
    for (std::size_t i = 0; i < k; ++i) {
      const Scalar bu = bit(ru, i), bv = bit(rv, i);
      out.column_diff[i] = bv - bu;
      zu += bu * tau[i];
      zv += bv * tau[i];
    }
  } else {
    const auto ru = view.weight_row_prefix(u, k);
    const auto rv = view.weight_row_prefix(v, k);
    for (std::size_t i = 0; i < k; ++i) {
      out.column_diff[i] = rv[i] - ru[i];
      zu += ru[i] * tau[i];
      zv += rv[i] * tau[i];
    }
  }
  out.z_first = zu;
  out.z_second = zv;
  out.corner = static_cast<Scalar>(view.at(u, v));
  out.diag_first = static_cast<Scalar>(view.at(u, u));
  out.diag_second = static_cast<Scalar>(view.at(v, v));
}

template <class Scalar>
PairIncrement<Scalar> make_increment(const RevealedView& view, const DesignState<Scalar>& state) {
  PairIncrement<Scalar> inc;
  make_increment(view, state, inc);
  return inc;
}

namespace {

template <class Scalar>
struct Products {
  Scalar s_dot_y = 0;
  Scalar y_norm2 = 0;
};

template <class Scalar>
Products<Scalar> products(const DesignState<Scalar>& state, const PairIncrement<Scalar>& inc) {
  if (inc.column_diff.size() != state.imbalance.size())
    throw ContractError("increment dimension " + std::to_string(inc.column_diff.size()) +
                        " does not match state dimension " + std::to_string(state.imbalance.size()));
  Products<Scalar> p;
  for (std::size_t i = 0; i < inc.column_diff.size(); ++i) {
    p.s_dot_y += state.imbalance[i] * inc.column_diff[i];
    p.y_norm2 += inc.column_diff[i] * inc.column_diff[i];
  }
  return p;
}

// Squared imbalance when the new pair gets signs (sign, -sign).
template <class Scalar>
Scalar candidate(const DesignState<Scalar>& state, const PairIncrement<Scalar>& inc, const Products<Scalar>& p,
                 Scalar sign) {
  const Scalar new_u = inc.z_first + sign * (inc.diag_first - inc.corner);
  const Scalar new_v = inc.z_second - sign * (inc.diag_second - inc.corner);
  return state.squared - 2 * sign * p.s_dot_y + p.y_norm2 + new_u * new_u + new_v * new_v;
}

}  // namespace

template <class Scalar>
Candidates<Scalar> candidate_imbalances(const DesignState<Scalar>& state, const PairIncrement<Scalar>& inc) {
  const auto p = products(state, inc);
  return {candidate(state, inc, p, Scalar{1}), candidate(state, inc, p, Scalar{-1})};
}

template <class Scalar>
StepChoice step(DesignState<Scalar>& state, const PairIncrement<Scalar>& inc, const DesignConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto p = products(state, inc);
  // I^2(+1) - I^2(-1); computing the difference directly avoids cancelling
  // against ||S||^2 in the weighted case and is exact for binary graphs.
  const Scalar diff = -4 * p.s_dot_y + 4 * inc.z_first * (inc.diag_first - inc.corner) -
                      4 * inc.z_second * (inc.diag_second - inc.corner);
  const double b = cfg.effective_bias();
  const double u = uniform01(rng);

  StepChoice choice;
  choice.draw = u;
  if (diff < 0) {
    choice.zero_one = u < b;
  } else if (diff > 0) {
    choice.zero_one = u < 1.0 - b;
  } else {
    choice.tie = true;
    choice.zero_one = u < 0.5;
  }

  const Scalar sign = choice.zero_one ? Scalar{1} : Scalar{-1};
  const std::size_t k = state.imbalance.size();
  const Scalar new_u = inc.z_first + sign * (inc.diag_first - inc.corner);
  const Scalar new_v = inc.z_second - sign * (inc.diag_second - inc.corner);
  if constexpr (kBinary<Scalar>) {
    state.squared = state.squared - 2 * sign * p.s_dot_y + p.y_norm2 + new_u * new_u + new_v * new_v;
    for (std::size_t i = 0; i < k; ++i) state.imbalance[i] -= sign * inc.column_diff[i];
    state.imbalance.push_back(new_u);
    state.imbalance.push_back(new_v);
  } else {
    double sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      state.imbalance[i] -= sign * inc.column_diff[i];
      sq += state.imbalance[i] * state.imbalance[i];
    }
    state.imbalance.push_back(new_u);
    state.imbalance.push_back(new_v);
    state.squared = sq + new_u * new_u + new_v * new_v;
  }
  state.signs.push_back(static_cast<int>(sign));
  state.signs.push_back(static_cast<int>(-sign));
  ++state.pairs;
  return choice;
}

namespace {

template <class Scalar>
DesignRun run_typed(const Graph& g, const DesignConfig& cfg, std::vector<StepTrace>* trace) {
  const std::size_t n = g.size();
  Rng rng(cfg.seed);
  RevealedView view(g, 2);
  auto state = assign_first_pair<Scalar>(view, rng);

  DesignRun run;
  run.squared.reserve(n / 2);
  run.squared.push_back(static_cast<double>(state.squared));
  if (trace) {
    trace->clear();
    const double sq = static_cast<double>(state.squared);
    trace->push_back({1, sq, sq, false, state.signs[0] > 0, sq, view.revealed(), view.max_index_read()});
  }

  PairIncrement<Scalar> inc;
  while (2 * state.pairs + 2 <= n) {
    view.reveal(2 * state.pairs + 2);
    make_increment(view, state, inc);
    Candidates<Scalar> cands{};
    if (trace) cands = candidate_imbalances(state, inc);
    const auto choice = step(state, inc, cfg, rng);
    run.squared.push_back(static_cast<double>(state.squared));
    if (trace)
      trace->push_back({state.pairs, static_cast<double>(cands.zero_one), static_cast<double>(cands.one_zero),
                        choice.tie, choice.zero_one, static_cast<double>(state.squared), view.revealed(),
                        view.max_index_read()});
  }

  run.final_squared = static_cast<double>(state.squared);
  run.final_imbalance = std::sqrt(run.final_squared);
  run.inclusive_imbalance = run.final_imbalance;

  if (n % 2 == 1) {
    view.reveal(n);
    const std::size_t last = n - 1;
    const int sign = uniform01(rng) < 0.5 ? 1 : -1;
    Scalar z = 0, sq = 0;
    for (std::size_t i = 0; i < last; ++i) {
      const auto a = static_cast<Scalar>(view.at(i, last));
      const Scalar si = state.imbalance[i] + a * sign;
      sq += si * si;
      z += a * state.signs[i];
    }
    const Scalar s_last = z + static_cast<Scalar>(view.at(last, last)) * sign;
    sq += s_last * s_last;
    state.signs.push_back(sign);
    run.inclusive_imbalance = std::sqrt(static_cast<double>(sq));
  }
  run.signs = std::move(state.signs);
  return run;
}

}  // namespace

DesignRun run_design(const Graph& g, const DesignConfig& cfg, std::vector<StepTrace>* trace) {
  if (g.size() < 2) throw ParameterError("design needs at least two subjects");
  cfg.validate();
  return g.is_binary() ? run_typed<std::int64_t>(g, cfg, trace) : run_typed<double>(g, cfg, trace);
}

std::int64_t imbalance_recompute_exact(const Graph& g, const SignVector& tau, std::size_t upto) {
  if (!g.is_binary()) throw UnsupportedKind("exact recomputation needs a binary graph");
  if (upto > tau.size() || upto > g.size())
    throw ContractError("sign vector of length " + std::to_string(tau.size()) + " cannot cover prefix " +
                        std::to_string(upto));
  std::int64_t total = 0;
  for (std::size_t i = 0; i < upto; ++i) {
    const auto row = g.bit_row(i);
    std::int64_t s = 0;
    for (std::size_t j = 0; j < upto; ++j)
      if (bit(row, j)) s += tau[j];
    total += s * s;
  }
  return total;
}

double imbalance_recompute(const Graph& g, const SignVector& tau, std::size_t upto) {
  if (g.is_binary()) return static_cast<double>(imbalance_recompute_exact(g, tau, upto));
  if (upto > tau.size() || upto > g.size())
    throw ContractError("sign vector of length " + std::to_string(tau.size()) + " cannot cover prefix " +
                        std::to_string(upto));
  double total = 0.0;
  for (std::size_t i = 0; i < upto; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < upto; ++j) s += g.at(i, j) * tau[j];
    total += s * s;
  }
  return total;
}

#define NETRAND_INSTANTIATE(Scalar)                                                                         \
  template DesignState<Scalar> assign_first_pair<Scalar>(const RevealedView&, Rng&);                        \
  template void make_increment<Scalar>(const RevealedView&, const DesignState<Scalar>&,                     \
                                       PairIncrement<Scalar>&);                                             \
  template PairIncrement<Scalar> make_increment<Scalar>(const RevealedView&, const DesignState<Scalar>&);   \
  template Candidates<Scalar> candidate_imbalances<Scalar>(const DesignState<Scalar>&,                      \
                                                           const PairIncrement<Scalar>&);                   \
  template StepChoice step<Scalar>(DesignState<Scalar>&, const PairIncrement<Scalar>&, const DesignConfig&, \
                                   Rng&);

NETRAND_INSTANTIATE(std::int64_t)
NETRAND_INSTANTIATE(double)

#undef NETRAND_INSTANTIATE

}  // namespace netrand
