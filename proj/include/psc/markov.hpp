#ifndef PSC_MARKOV_HPP
#define PSC_MARKOV_HPP

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psc/counters.hpp"
#include "psc/rational.hpp"

namespace psc {

/// Finite labeled chain with an exact row-stochastic matrix.
struct MarkovModel {
  std::vector<std::string> states;
  std::vector<std::vector<Rational>> matrix;  // row i = distribution from i
  std::size_t start = 0;
  std::optional<std::size_t> target;
  std::optional<std::size_t> absorbing;

  std::size_t size() const { return states.size(); }

  /// Throws std::logic_error if any row fails to sum to exactly 1, an entry
  /// leaves [0,1], or the absorbing row is not the unit vector on itself.
  void validate() const;

  nlohmann::json to_json() const;
};

struct InputPolicy {
  enum class Kind { ConstantT, ConstantNT, Bernoulli };
  Kind kind = Kind::Bernoulli;
  Rational s;  // taken probability; 1 for ConstantT, 0 for ConstantNT

  static InputPolicy constant(Direction d);
  static InputPolicy bernoulli(const Rational& s);
  Rational taken_probability() const { return s; }
};

/// Pr[out = c] for c = 0..c_max plus the explicit mass beyond c_max.
struct OutputDistribution {
  std::map<unsigned, Rational> probs;  // zero entries omitted
  unsigned c_max = 0;
  Rational tail;  // 1 - sum of probs, exactly

  Rational at(unsigned c) const {
    auto it = probs.find(c);
    return it == probs.end() ? Rational(0) : it->second;
  }
};

/// Stationary vector over (ST, WT, WN, SN) and the induced misprediction rate.
struct StationaryResult {
  std::array<Rational, 4> mu;
  Rational misprediction_rate;
};

struct SteadinessReport {
  bool unique_stationary;
  bool aperiodic;
};

/// Default output-distribution truncation: smallest c with tail < tail_bound,
/// capped at 10^4.
inline constexpr unsigned kCMaxCap = 10000;

/// 4-state chain over (ST, WT, WN, SN) for a counter driven by Bernoulli(s)
/// inputs; rows are the s/(1-s) mixture of the per-input transition
/// distributions.
MarkovModel build_stationary_chain(const CounterConfig& cfg, const Rational& s);

/// 5-state cut-off attack chain {ST, ST', WT, SN, S}: the first transition out
/// of ST follows the victim's direction, every later input is NT, SN feeds the
/// absorbing state S. Throws std::domain_error for m = 0 (static predictor).
MarkovModel build_attack_chain(const CounterConfig& cfg, Direction victim);

/// probs[c] = Pr[the chain first reaches its target after c+1 transitions],
/// computed by iterated exact vector-matrix products from the start state.
OutputDistribution first_passage_distribution(const MarkovModel& model,
                                              unsigned c_max);

/// Smallest c_max with tail < tail_bound for the model's first-passage
/// distribution, capped at kCMaxCap.
unsigned default_c_max(const MarkovModel& model, const Rational& tail_bound);

/// Solves mu * M = mu, sum(mu) = 1 exactly and cross-checks the result against
/// the closed forms (which are independent of m). Preconditions: m > 0, and if
/// p = 1 then s must not be 0 or 1; violations throw std::domain_error.
StationaryResult stationary_distribution(const CounterConfig& cfg,
                                         const Rational& s);

/// unique_stationary <=> rank(M - I) = 3; aperiodic <=> det(M + I) != 0.
SteadinessReport steadiness_check(const CounterConfig& cfg, const Rational& s);

/// Closed-form steady-state misprediction rate; a pure function of (s, p).
/// Throws std::domain_error on the degenerate set (p = 1 and s in {0, 1}).
Rational misprediction_rate_closed_form(const Rational& s, const Rational& p);

/// Closed-form stationary vector over (ST, WT, WN, SN); same domain as the
/// rate above.
std::array<Rational, 4> stationary_closed_form(const Rational& s,
                                               const Rational& p);

}  // namespace psc

#endif  // PSC_MARKOV_HPP
