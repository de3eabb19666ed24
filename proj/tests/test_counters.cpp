#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "psc/counters.hpp"
#include "psc/random.hpp"

using psc::CounterConfig;
using psc::CounterState;
using psc::Direction;
using psc::Rational;

namespace {

const std::array<CounterState, 4> kStates = {CounterState::SN, CounterState::WN,
                                             CounterState::WT,
                                             CounterState::ST};
const std::array<Direction, 2> kInputs = {Direction::NT, Direction::T};

std::vector<CounterConfig> sample_configs() {
  std::vector<CounterConfig> cfgs;
  const std::array<Rational, 5> values = {Rational(0), Rational(1, 3),
                                          Rational(1, 2), Rational(7, 9),
                                          Rational(1)};
  for (const auto& m : values) {
    for (const auto& p : values) cfgs.push_back({m, p});
  }
  return cfgs;
}

CounterState mirror(CounterState s) {
  return static_cast<CounterState>(3 - static_cast<int>(s));
}

}  // namespace

TEST_CASE("prediction is the most significant bit") {
  CHECK(psc::predict(CounterState::ST) == Direction::T);
  CHECK(psc::predict(CounterState::WT) == Direction::T);
  CHECK(psc::predict(CounterState::WN) == Direction::NT);
  CHECK(psc::predict(CounterState::SN) == Direction::NT);
}

TEST_CASE("transition distribution matches the pinned examples") {
  const auto d1 = psc::transition_distribution(CounterState::ST, Direction::T,
                                               {Rational(1), Rational(0)});
  CHECK(d1[CounterState::ST] == 1);

  const auto d2 = psc::transition_distribution(CounterState::ST, Direction::NT,
                                               {Rational(1, 2), Rational(0)});
  CHECK(d2[CounterState::ST] == Rational(1, 2));
  CHECK(d2[CounterState::WT] == Rational(1, 2));

  const auto d3 = psc::transition_distribution(
      CounterState::ST, Direction::T, {Rational(1, 2), Rational(1, 2)});
  CHECK(d3[CounterState::ST] == Rational(3, 4));
  CHECK(d3[CounterState::WT] == Rational(1, 4));

  const auto d4 = psc::transition_distribution(CounterState::SN, Direction::T,
                                               {Rational(1), Rational(0)});
  CHECK(d4[CounterState::WN] == 1);
}

TEST_CASE("distributions are exact probability vectors") {
  for (const auto& cfg : sample_configs()) {
    for (auto state : kStates) {
      for (auto input : kInputs) {
        const auto d = psc::transition_distribution(state, input, cfg);
        Rational sum = 0;
        for (auto s : kStates) {
          CHECK(d[s] >= 0);
          CHECK(d[s] <= 1);
          sum += d[s];
        }
        CHECK(sum == 1);
      }
    }
  }
}

TEST_CASE("p = 0 reduces to the original PSC update rule") {
  // Original PSC: every transition of the deterministic counter fires with
  // probability m, otherwise the state holds.
  for (const Rational m : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
    const CounterConfig psc_cfg{m, Rational(0)};
    const CounterConfig det{Rational(1), Rational(0)};
    for (auto state : kStates) {
      for (auto input : kInputs) {
        const auto d = psc::transition_distribution(state, input, psc_cfg);
        const auto target = psc::transition_distribution(state, input, det);
        for (auto next : kStates) {
          Rational expected = target[next] * m;
          if (next == state) expected += 1 - m;
          CHECK(d[next] == expected);
        }
      }
    }
  }
}

TEST_CASE("deterministic counter follows the Moore machine") {
  const CounterConfig det{Rational(1), Rational(0)};
  const std::map<std::pair<CounterState, Direction>, CounterState> table = {
      {{CounterState::SN, Direction::T}, CounterState::WN},
      {{CounterState::SN, Direction::NT}, CounterState::SN},
      {{CounterState::WN, Direction::T}, CounterState::ST},
      {{CounterState::WN, Direction::NT}, CounterState::SN},
      {{CounterState::WT, Direction::T}, CounterState::ST},
      {{CounterState::WT, Direction::NT}, CounterState::SN},
      {{CounterState::ST, Direction::T}, CounterState::ST},
      {{CounterState::ST, Direction::NT}, CounterState::WT},
  };
  for (const auto& [key, next] : table) {
    const auto d = psc::transition_distribution(key.first, key.second, det);
    CHECK(d[next] == 1);
  }
}

TEST_CASE("SN mirrors ST under flipped input") {
  for (const auto& cfg : sample_configs()) {
    for (auto input : kInputs) {
      const auto at_sn = psc::transition_distribution(CounterState::SN, input,
                                                      cfg);
      const auto at_st = psc::transition_distribution(CounterState::ST,
                                                      psc::flip(input), cfg);
      for (auto s : kStates) CHECK(at_sn[s] == at_st[mirror(s)]);
    }
  }
}

TEST_CASE("config validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(psc::transition_distribution(CounterState::ST, Direction::T,
                                               {Rational(3, 2), Rational(0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(psc::transition_distribution(CounterState::ST, Direction::T,
                                               {Rational(1), Rational(-1, 2)}),
                  std::invalid_argument);
}

TEST_CASE("step follows the documented inverse-CDF order") {
  // Deterministic transition, draw irrelevant.
  CHECK(psc::step(CounterState::ST, Direction::NT, {Rational(1), Rational(0)},
                  0.7) == CounterState::WT);

  // (ST, NT, m=1/2, p=0): CDF over SN<WN<WT<ST is (0, 0, 1/2, 1).
  CHECK(psc::step(CounterState::ST, Direction::NT,
                  {Rational(1, 2), Rational(0)}, 0.3) == CounterState::WT);
  CHECK(psc::step(CounterState::ST, Direction::NT,
                  {Rational(1, 2), Rational(0)}, 0.6) == CounterState::ST);

  // (WT, NT, m=1/2, p=1/2): CDF is (1/2, 1/2, 1, 1); 0.9 stays in WT.
  CHECK(psc::step(CounterState::WT, Direction::NT,
                  {Rational(1, 2), Rational(1, 2)}, 0.9) == CounterState::WT);
  CHECK(psc::step(CounterState::WT, Direction::NT,
                  {Rational(1, 2), Rational(1, 2)}, 0.2) == CounterState::SN);
}

TEST_CASE("sampled frequencies converge to the exact distribution") {
  const std::size_t trials = 100000;
  for (const CounterConfig& cfg :
       {CounterConfig{Rational(1, 2), Rational(1, 2)},
        CounterConfig{Rational(1, 3), Rational(0)}}) {
    const psc::CounterSampler sampler(cfg);
    for (auto state : kStates) {
      for (auto input : kInputs) {
        const auto exact = psc::transition_distribution(state, input, cfg);
        std::array<std::size_t, 4> counts{};
        psc::UniformDraws rng(0xC0FFEE ^ static_cast<int>(state));
        for (std::size_t i = 0; i < trials; ++i) {
          ++counts[static_cast<int>(sampler.step(state, input, rng.next()))];
        }
        double tv = 0.0;
        for (int s = 0; s < 4; ++s) {
          const double freq = static_cast<double>(counts[s]) / trials;
          tv += std::abs(freq - psc::to_double(exact.prob[s]));
        }
        CHECK(tv / 2 < 0.01);
      }
    }
  }
}
