#include "psc/counters.hpp"

#include <stdexcept>

namespace psc {

std::string to_string(CounterState s) {
  switch (s) {
    case CounterState::SN: return "SN";
    case CounterState::WN: return "WN";
    case CounterState::WT: return "WT";
    case CounterState::ST: return "ST";
  }
  return "?";
}

std::string to_string(Direction d) { return d == Direction::T ? "T" : "NT"; }

void CounterConfig::validate() const {
  if (m < 0 || m > 1) {
    throw std::invalid_argument("counter parameter m outside [0,1]: " +
                                fraction_string(m));
  }
  if (p < 0 || p > 1) {
    throw std::invalid_argument("counter parameter p outside [0,1]: " +
                                fraction_string(p));
  }
}

Direction predict(CounterState state) {
  return static_cast<int>(state) >= 2 ? Direction::T : Direction::NT;
}

StateDistribution transition_distribution(CounterState state, Direction input,
                                          const CounterConfig& cfg) {
  cfg.validate();
  const Rational& m = cfg.m;
  const Rational& p = cfg.p;
  StateDistribution d;
  const bool taken = input == Direction::T;
  switch (state) {
    case CounterState::ST:
      if (taken) {
        d[CounterState::ST] = 1 - m * p;
        d[CounterState::WT] = m * p;
      } else {
        d[CounterState::ST] = 1 - m + m * p;
        d[CounterState::WT] = m - m * p;
      }
      break;
    case CounterState::WT:
      d[CounterState::WT] = 1 - m;
      d[taken ? CounterState::ST : CounterState::SN] = m;
      break;
    case CounterState::WN:
      d[CounterState::WN] = 1 - m;
      d[taken ? CounterState::ST : CounterState::SN] = m;
      break;
    case CounterState::SN:
      // Mirror of ST with the input flipped.
      if (!taken) {
        d[CounterState::SN] = 1 - m * p;
        d[CounterState::WN] = m * p;
      } else {
        d[CounterState::SN] = 1 - m + m * p;
        d[CounterState::WN] = m - m * p;
      }
      break;
  }
  return d;
}

CounterState step(CounterState state, Direction input, const CounterConfig& cfg,
                  double uniform_draw) {
  return CounterSampler(cfg).step(state, input, uniform_draw);
}

CounterSampler::CounterSampler(const CounterConfig& cfg) {
  for (int code = 0; code < 4; ++code) {
    for (Direction input : {Direction::NT, Direction::T}) {
      const auto state = static_cast<CounterState>(code);
      const StateDistribution dist = transition_distribution(state, input, cfg);
      const std::size_t slot =
          static_cast<std::size_t>(code) * 2 + (input == Direction::T);
      // Cumulative in the fixed order SN < WN < WT < ST. The final slot of
      // the guard table covers draws past the rounded CDF total.
      double acc = 0.0;
      last_[slot] = state;
      for (int next = 0; next < 4; ++next) {
        const auto s = static_cast<CounterState>(next);
        acc += to_double(dist[s]);
        cdf_[slot][next] = acc;
        if (dist[s] > 0) last_[slot] = s;
      }
    }
  }
}

}  // namespace psc
