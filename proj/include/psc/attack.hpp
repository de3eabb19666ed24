#ifndef PSC_ATTACK_HPP
#define PSC_ATTACK_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "psc/counters.hpp"
#include "psc/markov.hpp"
#include "psc/rational.hpp"

namespace psc {

/// One run of the cut-off attack: c mispredictions observed before the first
/// correct probe prediction. exhausted means the probe vector ran out first,
/// in which case c equals the probe length.
struct AttackOutcome {
  unsigned c = 0;
  bool exhausted = false;
};

/// Per-output guess table. decisions[c] = T iff Pr[out=c|T] > Pr[out=c|NT];
/// ties guess NT. Only outputs with nonzero total probability appear.
struct StrategyTable {
  std::map<unsigned, Direction> decisions;
  std::optional<Rational> threshold_note;  // 1/m when the p=0 closed form applies
};

struct DpMargin {
  Rational slack_t_vs_nt;  // e^eps * Pr[c|NT] + delta - Pr[c|T], lower bound
  Rational slack_nt_vs_t;
};

struct DpReport {
  Rational epsilon;
  Rational delta;
  bool satisfied = false;
  bool identical_chains = false;  // matrix-equality fast path taken
  std::optional<unsigned> worst_c;
  std::map<unsigned, DpMargin> margins;
  Rational tail_mass;

  nlohmann::json to_json() const;
};

struct SuccessRateBound {
  Rational lower;
  Rational upper;
};

struct PrimeMode {
  static PrimeMode ideal() { return {true, 0}; }
  static PrimeMode finite(unsigned k) { return {false, k}; }
  bool is_ideal = true;
  unsigned iterations = 0;
};

/// Exact output distributions of the cut-off attack for victim T and NT.
std::pair<OutputDistribution, OutputDistribution> output_distributions(
    const CounterConfig& cfg, unsigned c_max);

/// Pointwise-optimal guess per observable output.
StrategyTable optimal_strategy(const CounterConfig& cfg, unsigned c_max);

/// Posterior probability that the optimal guess at output c is correct, under
/// prior Pr[v=T] = prior_t. Throws std::domain_error for unreachable outputs.
Rational success_probability(const CounterConfig& cfg, unsigned c,
                             const Rational& prior_t = Rational(1, 2));

/// Expected success of the optimal strategy over outputs up to c_max; the
/// truncated tail contributes between max(tail_T, tail_NT)/2 (some guess is
/// right at least that often) and (tail_T + tail_NT)/2 (every tail guess
/// right), reported as an interval.
SuccessRateBound overall_success_rate(const CounterConfig& cfg, unsigned c_max);

/// Pointwise (epsilon, delta) check over every output c <= c_max. e^epsilon is
/// handled by directed rational enclosures, so each verdict is certified.
/// A PASS additionally requires tail_mass <= delta, unless the two attack
/// chains are entrywise identical (then all outputs are trivially bounded).
DpReport dp_check(const CounterConfig& cfg, const Rational& epsilon,
                  const Rational& delta, unsigned c_max);

/// dp_check without the margin table: scans c incrementally and stops at the
/// first certified violation or once the tail drops below tail_target.
bool dp_feasible(const CounterConfig& cfg, const Rational& epsilon,
                 const Rational& delta, const Rational& tail_target,
                 unsigned c_cap = kCMaxCap);

/// One seeded run of the cut-off attack. Ideal prime starts at ST directly;
/// finite prime executes k taken steps from initial_state.
AttackOutcome simulate_attack(const CounterConfig& cfg, Direction victim,
                              std::uint64_t seed, PrimeMode prime,
                              unsigned probe_len,
                              CounterState initial_state = CounterState::WT);

/// Aggregated histogram over `trials` independent runs; trial i uses the
/// substream derived from (master_seed, i), so any execution order yields the
/// same counts. Exhausted runs are counted under key probe_len.
std::map<unsigned, std::uint64_t> attack_histogram(
    const CounterConfig& cfg, Direction victim, std::uint64_t master_seed,
    std::uint64_t trials, PrimeMode prime, unsigned probe_len,
    CounterState initial_state = CounterState::WT);

}  // namespace psc

#endif  // PSC_ATTACK_HPP
