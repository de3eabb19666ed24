#include "psc/attack.hpp"

#include <stdexcept>

#include "psc/random.hpp"

namespace psc {

namespace {

Rational pow10_inv(int digits) {
  Integer d = 1;
  for (int i = 0; i < digits; ++i) d *= 10;
  return Rational(1, d);
}

/// Certified verdicts for lhs <= e^eps * rhs + delta with rational inputs.
/// The cached enclosure is tightened until it separates; an exact tie would
/// need a rational e^eps, which only happens at eps = 0 (handled exactly).
class DpChecker {
 public:
  DpChecker(Rational eps, Rational delta)
      : eps_(std::move(eps)), delta_(std::move(delta)), width_(pow10_inv(20)) {
    if (eps_ > 0) enc_ = exp_enclosure(eps_, width_);
  }

  bool bounded(const Rational& lhs, const Rational& rhs) {
    if (eps_ == 0 || rhs == 0) return lhs <= rhs + delta_;
    for (int attempt = 0; attempt < 16; ++attempt) {
      if (lhs <= enc_.lo * rhs + delta_) return true;
      if (lhs > enc_.hi * rhs + delta_) return false;
      width_ *= pow10_inv(20);
      enc_ = exp_enclosure(eps_, width_);
    }
    throw std::logic_error("exp enclosure failed to separate dp inequality");
  }

 private:
  Rational eps_;
  Rational delta_;
  Rational width_;
  ExpEnclosure enc_{Rational(1), Rational(1)};
};

bool matrices_equal(const MarkovModel& a, const MarkovModel& b) {
  return a.matrix == b.matrix;
}

}  // namespace

std::pair<OutputDistribution, OutputDistribution> output_distributions(
    const CounterConfig& cfg, unsigned c_max) {
  const MarkovModel mt = build_attack_chain(cfg, Direction::T);
  const MarkovModel mn = build_attack_chain(cfg, Direction::NT);
  return {first_passage_distribution(mt, c_max),
          first_passage_distribution(mn, c_max)};
}

StrategyTable optimal_strategy(const CounterConfig& cfg, unsigned c_max) {
  const auto [dt, dn] = output_distributions(cfg, c_max);
  StrategyTable table;
  for (unsigned c = 0; c <= c_max; ++c) {
    const Rational pt = dt.at(c);
    const Rational pn = dn.at(c);
    if (pt == 0 && pn == 0) continue;  // unreachable output
    table.decisions[c] = pt > pn ? Direction::T : Direction::NT;
  }
  if (cfg.p == 0 && cfg.m > 0) table.threshold_note = 1 / cfg.m;
  return table;
}

Rational success_probability(const CounterConfig& cfg, unsigned c,
                             const Rational& prior_t) {
  if (prior_t < 0 || prior_t > 1) {
    throw std::invalid_argument("prior outside [0,1]");
  }
  const auto [dt, dn] = output_distributions(cfg, c);
  const Rational pt = dt.at(c) * prior_t;
  const Rational pn = dn.at(c) * (1 - prior_t);
  if (pt + pn == 0) {
    throw std::domain_error("unreachable output c = " + std::to_string(c));
  }
  const Rational posterior_t = pt / (pt + pn);
  return posterior_t >= 1 - posterior_t ? posterior_t : 1 - posterior_t;
}

SuccessRateBound overall_success_rate(const CounterConfig& cfg,
                                      unsigned c_max) {
  const auto [dt, dn] = output_distributions(cfg, c_max);
  Rational sum = 0;
  for (unsigned c = 0; c <= c_max; ++c) {
    const Rational pt = dt.at(c);
    const Rational pn = dn.at(c);
    sum += (pt > pn ? pt : pn);
  }
  const Rational tail_lo = (dt.tail > dn.tail ? dt.tail : dn.tail) / 2;
  // Identical conditionals make every tail guess a coin flip, so the tail
  // contribution is exactly tail/2 and the interval collapses.
  const bool identical = dt.probs == dn.probs && dt.tail == dn.tail;
  const Rational tail_hi = identical ? tail_lo : (dt.tail + dn.tail) / 2;
  return {sum / 2 + tail_lo, sum / 2 + tail_hi};
}

DpReport dp_check(const CounterConfig& cfg, const Rational& epsilon,
                  const Rational& delta, unsigned c_max) {
  if (epsilon < 0 || delta < 0) {
    throw std::invalid_argument("epsilon and delta must be nonnegative");
  }
  const MarkovModel mt = build_attack_chain(cfg, Direction::T);
  const MarkovModel mn = build_attack_chain(cfg, Direction::NT);
  const OutputDistribution dt = first_passage_distribution(mt, c_max);
  const OutputDistribution dn = first_passage_distribution(mn, c_max);

  DpReport report;
  report.epsilon = epsilon;
  report.delta = delta;
  report.identical_chains = matrices_equal(mt, mn);
  report.tail_mass = dt.tail > dn.tail ? dt.tail : dn.tail;

  // Margin rendering uses a fixed conservative lower bound on e^eps.
  const Rational exp_lo = exp_enclosure(epsilon, pow10_inv(20)).lo;

  DpChecker checker(epsilon, delta);
  bool all_ok = true;
  std::optional<Rational> worst_slack;
  for (unsigned c = 0; c <= c_max; ++c) {
    const Rational pt = dt.at(c);
    const Rational pn = dn.at(c);
    const bool ok = checker.bounded(pt, pn) && checker.bounded(pn, pt);
    all_ok = all_ok && ok;
    DpMargin margin{exp_lo * pn + delta - pt, exp_lo * pt + delta - pn};
    const Rational slack = margin.slack_t_vs_nt < margin.slack_nt_vs_t
                               ? margin.slack_t_vs_nt
                               : margin.slack_nt_vs_t;
    if (!worst_slack || slack < *worst_slack) {
      worst_slack = slack;
      report.worst_c = c;
    }
    report.margins[c] = std::move(margin);
  }

  // Identical chains bound every output trivially, truncated or not.
  report.satisfied =
      report.identical_chains || (all_ok && report.tail_mass <= delta);
  return report;
}

bool dp_feasible(const CounterConfig& cfg, const Rational& epsilon,
                 const Rational& delta, const Rational& tail_target,
                 unsigned c_cap) {
  const MarkovModel mt = build_attack_chain(cfg, Direction::T);
  const MarkovModel mn = build_attack_chain(cfg, Direction::NT);
  if (matrices_equal(mt, mn)) return true;

  DpChecker checker(epsilon, delta);
  const std::size_t n = mt.size();
  std::vector<Rational> xt(n, Rational(0)), xn(n, Rational(0));
  xt[mt.start] = 1;
  xn[mn.start] = 1;
  Rational mass_t = 0, mass_n = 0;
  const std::size_t target = *mt.target;

  for (unsigned c = 0; c <= c_cap; ++c) {
    std::vector<Rational> nt(n, Rational(0)), nn(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (xt[i] != 0) {
        for (std::size_t j = 0; j < n; ++j) {
          if (mt.matrix[i][j] != 0) nt[j] += xt[i] * mt.matrix[i][j];
        }
      }
      if (xn[i] != 0) {
        for (std::size_t j = 0; j < n; ++j) {
          if (mn.matrix[i][j] != 0) nn[j] += xn[i] * mn.matrix[i][j];
        }
      }
    }
    xt = std::move(nt);
    xn = std::move(nn);
    const Rational pt = xt[target];
    const Rational pn = xn[target];
    if (!checker.bounded(pt, pn)) return false;
    if (!checker.bounded(pn, pt)) return false;
    mass_t += pt;
    mass_n += pn;
    const Rational tail = 1 - (mass_t < mass_n ? mass_t : mass_n);
    if (tail <= tail_target) return tail <= delta;
  }
  const Rational tail = 1 - (mass_t < mass_n ? mass_t : mass_n);
  return tail <= delta;
}

namespace {

AttackOutcome run_one_attack(const CounterSampler& sampler, Direction victim,
                             std::uint64_t seed, PrimeMode prime,
                             unsigned probe_len, CounterState initial_state) {
  UniformDraws rng(seed);

  CounterState state = CounterState::ST;
  if (!prime.is_ideal) {
    state = initial_state;
    for (unsigned i = 0; i < prime.iterations; ++i) {
      state = sampler.step(state, Direction::T, rng.next());
    }
  }

  state = sampler.step(state, victim, rng.next());

  unsigned c = 0;
  for (unsigned i = 0; i < probe_len; ++i) {
    const Direction pred = predict(state);
    state = sampler.step(state, Direction::NT, rng.next());
    if (pred == Direction::NT) return {c, false};
    ++c;
  }
  return {probe_len, true};
}

}  // namespace

AttackOutcome simulate_attack(const CounterConfig& cfg, Direction victim,
                              std::uint64_t seed, PrimeMode prime,
                              unsigned probe_len, CounterState initial_state) {
  if (probe_len < 1) throw std::invalid_argument("probe_len must be >= 1");
  cfg.validate();
  return run_one_attack(CounterSampler(cfg), victim, seed, prime, probe_len,
                        initial_state);
}

std::map<unsigned, std::uint64_t> attack_histogram(
    const CounterConfig& cfg, Direction victim, std::uint64_t master_seed,
    std::uint64_t trials, PrimeMode prime, unsigned probe_len,
    CounterState initial_state) {
  if (probe_len < 1) throw std::invalid_argument("probe_len must be >= 1");
  cfg.validate();
  const CounterSampler sampler(cfg);
  std::map<unsigned, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const AttackOutcome outcome =
        run_one_attack(sampler, victim, substream_seed(master_seed, i), prime,
                       probe_len, initial_state);
    ++counts[outcome.c];
  }
  return counts;
}

nlohmann::json DpReport::to_json() const {
  nlohmann::json j;
  j["epsilon"] = fraction_string(epsilon);
  j["delta"] = fraction_string(delta);
  j["satisfied"] = satisfied;
  j["identical_chains"] = identical_chains;
  if (worst_c) {
    j["worst_c"] = *worst_c;
  } else {
    j["worst_c"] = nullptr;
  }
  j["tail_mass"] = fraction_string(tail_mass);
  j["tail_mass_decimal"] = decimal_string(tail_mass);
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& [c, m] : margins) {
    nlohmann::json e;
    e["c"] = c;
    e["slack_t_vs_nt"] = decimal_string(m.slack_t_vs_nt);
    e["slack_nt_vs_t"] = decimal_string(m.slack_nt_vs_t);
    ms.push_back(std::move(e));
  }
  j["margins"] = std::move(ms);
  return j;
}

}  // namespace psc
