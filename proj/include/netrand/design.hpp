#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "netrand/graph.hpp"
#include "netrand/random.hpp"

namespace netrand {

enum class Policy { Adaptive, Random };

const char* to_string(Policy p) noexcept;

/// Biased-coin settings. Random behaves exactly like Adaptive with bias 1/2
/// and shares its code path, so the two consume randomness identically.
struct DesignConfig {
  Policy policy = Policy::Adaptive;
  double bias = 0.95;
  std::uint64_t seed = 0;

  /// Throws ParameterError unless bias lies in [1/2, 1].
  void validate() const;
  double effective_bias() const noexcept { return policy == Policy::Random ? 0.5 : bias; }
};

/// Assignment signs tau_i = 1 - 2 T_i: treatment 0 is +1, treatment 1 is -1.
class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::vector<std::int8_t> signs);

  static SignVector from_treatments(std::span<const int> treatments);

  std::size_t size() const noexcept { return signs_.size(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  int treatment(std::size_t i) const { return signs_[i] > 0 ? 0 : 1; }
  std::span<const std::int8_t> values() const noexcept { return signs_; }

  void push_back(int sign);
  void pop_back() { signs_.pop_back(); }
  /// Every completed pair (2m, 2m+1) carries opposite signs.
  bool pairwise_balanced() const noexcept;
  long sum() const noexcept;

  SignVector negated() const;
  bool operator==(const SignVector&) const = default;

 private:
  std::vector<std::int8_t> signs_;
};

/// State after m completed pairs. `imbalance` is S = A^{(2m)} tau_{1:2m},
/// `squared` is ||S||^2. Binary graphs use Scalar = int64_t and every
/// quantity is exact.
template <class Scalar>
struct DesignState {
  std::size_t pairs = 0;
  std::vector<Scalar> imbalance;
  Scalar squared = 0;
  SignVector signs;
};

using BinaryState = DesignState<std::int64_t>;
using WeightedState = DesignState<double>;

/// What the next pair (rows u = 2m and v = 2m+1, 0-based) adds to the state.
template <class Scalar>
struct PairIncrement {
  /// Y_i = A[i][v] - A[i][u] over the revealed prefix i < 2m.
  std::vector<Scalar> column_diff;
  /// Inner products of the new rows' prefixes with tau_{1:2m}.
  Scalar z_first = 0;
  Scalar z_second = 0;
  Scalar corner = 0;  // A[u][v]
  Scalar diag_first = 1;
  Scalar diag_second = 1;
};

/// Squared imbalances of the two admissible assignments of the new pair.
template <class Scalar>
struct Candidates {
  Scalar zero_one;  // (T_u, T_v) = (0, 1), i.e. signs (+1, -1)
  Scalar one_zero;  // (T_u, T_v) = (1, 0)
};

struct StepChoice {
  bool zero_one = false;  // realized (T_u, T_v) == (0, 1)
  bool tie = false;
  double draw = 0.0;
};

template <class Scalar>
DesignState<Scalar> assign_first_pair(const RevealedView& view, Rng& rng);

/// Builds the increment for pair `state.pairs`; `view` must reveal 2m+2.
template <class Scalar>
PairIncrement<Scalar> make_increment(const RevealedView& view, const DesignState<Scalar>& state);
template <class Scalar>
void make_increment(const RevealedView& view, const DesignState<Scalar>& state, PairIncrement<Scalar>& out);

/// O(m) evaluation through ||S -/+ Y||^2 plus the two new coordinates.
template <class Scalar>
Candidates<Scalar> candidate_imbalances(const DesignState<Scalar>& state, const PairIncrement<Scalar>& inc);

/// Applies the biased coin and extends the state by one pair. Draws exactly
/// one uniform number regardless of the outcome.
template <class Scalar>
StepChoice step(DesignState<Scalar>& state, const PairIncrement<Scalar>& inc, const DesignConfig& cfg, Rng& rng);

struct StepTrace {
  std::size_t pair = 0;  // 1-based pair index m
  double zero_one = 0.0;
  double one_zero = 0.0;
  bool tie = false;
  bool chose_zero_one = false;
  double realized = 0.0;  // I^2_{2m}
  std::size_t revealed = 0;
  std::size_t max_index_read = 0;
};

struct DesignRun {
  SignVector signs;
  /// I^2_{2m} for m = 1..floor(n/2). Integer valued (exactly) for binary graphs.
  std::vector<double> squared;
  /// I_n under the convention I_{2m+1} = I_{2m}.
  double final_imbalance = 0.0;
  double final_squared = 0.0;
  /// ||A^{(n)} tau|| including the unpaired last subject when n is odd.
  double inclusive_imbalance = 0.0;

  double imbalance_at(std::size_t pair) const;
};

/// Runs the sequential procedure on subjects in index order.
DesignRun run_design(const Graph& g, const DesignConfig& cfg, std::vector<StepTrace>* trace = nullptr);

/// ||A^{(upto)} tau_{1:upto}||^2 by a direct dense product.
double imbalance_recompute(const Graph& g, const SignVector& tau, std::size_t upto);
/// Exact integer version for binary graphs.
std::int64_t imbalance_recompute_exact(const Graph& g, const SignVector& tau, std::size_t upto);

}  // namespace netrand
