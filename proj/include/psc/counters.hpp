#ifndef PSC_COUNTERS_HPP
#define PSC_COUNTERS_HPP

#include <array>
#include <string>

#include "psc/rational.hpp"

namespace psc {

/// 2-bit saturating counter states; the enum value is the binary code.
enum class CounterState : int { SN = 0, WN = 1, WT = 2, ST = 3 };

enum class Direction { NT, T };

constexpr Direction flip(Direction d) {
  return d == Direction::T ? Direction::NT : Direction::T;
}

std::string to_string(CounterState s);
std::string to_string(Direction d);

/// Probabilistic saturating counter parameters. m is the update probability,
/// p the reverse probability at the strong states. (m=1, p=0) is the
/// conventional deterministic counter; p=0 alone is the original PSC.
struct CounterConfig {
  Rational m;
  Rational p;

  /// Throws std::invalid_argument unless m, p are both in [0, 1].
  void validate() const;

  bool is_deterministic() const { return m == 1 && p == 0; }
};

/// Prediction is the most significant bit: T for WT/ST, NT otherwise.
Direction predict(CounterState state);

/// One-step distribution over successor states, indexed by state code.
struct StateDistribution {
  std::array<Rational, 4> prob{};

  const Rational& operator[](CounterState s) const {
    return prob[static_cast<std::size_t>(s)];
  }
  Rational& operator[](CounterState s) {
    return prob[static_cast<std::size_t>(s)];
  }
};

/// Exact one-step distribution of the generalized PSC under a concrete input.
/// Stay/move probabilities at the strong states blend m and p; the weak states
/// move with probability m. Probabilities sum to exactly 1.
StateDistribution transition_distribution(CounterState state, Direction input,
                                          const CounterConfig& cfg);

/// Samples the successor by inverse CDF over transition_distribution with the
/// fixed state order SN < WN < WT < ST. Simulation-only path: the CDF is
/// evaluated in double precision. Deterministic given the draw.
CounterState step(CounterState state, Direction input, const CounterConfig& cfg,
                  double uniform_draw);

/// Same sampling rule as step(), with the eight per-(state, input) CDFs
/// precomputed once. Use this in simulation loops.
class CounterSampler {
 public:
  explicit CounterSampler(const CounterConfig& cfg);

  CounterState step(CounterState state, Direction input, double draw) const {
    const auto& cdf =
        cdf_[static_cast<std::size_t>(state) * 2 + (input == Direction::T)];
    for (int code = 0; code < 4; ++code) {
      if (draw < cdf[code]) return static_cast<CounterState>(code);
    }
    return last_[static_cast<std::size_t>(state) * 2 +
                 (input == Direction::T)];
  }

 private:
  std::array<std::array<double, 4>, 8> cdf_{};
  std::array<CounterState, 8> last_{};  // last state with nonzero probability
};

}  // namespace psc

#endif  // PSC_COUNTERS_HPP
