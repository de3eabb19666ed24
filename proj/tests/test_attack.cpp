#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "psc/attack.hpp"
#include "psc/markov.hpp"

using psc::CounterConfig;
using psc::Direction;
using psc::Rational;

namespace {

const CounterConfig kDet{Rational(1), Rational(0)};
const CounterConfig kHalf{Rational(1, 2), Rational(0)};
const CounterConfig kBalanced{Rational(1, 2), Rational(1, 2)};

double tv_distance(const std::map<unsigned, std::uint64_t>& counts,
                   std::uint64_t trials, const psc::OutputDistribution& exact,
                   unsigned c_max) {
  double tv = 0.0;
  for (unsigned c = 0; c <= c_max; ++c) {
    auto it = counts.find(c);
    const double freq =
        it == counts.end() ? 0.0 : static_cast<double>(it->second) / trials;
    tv += std::abs(freq - psc::to_double(exact.at(c)));
  }
  return tv / 2;
}

}  // namespace

TEST_CASE("output distributions per victim direction") {
  const auto [dt, dn] = psc::output_distributions(kHalf, 30);
  CHECK(dt.at(1) == 0);  // victim T cannot reach SN in one probe
  CHECK(dn.at(1) > 0);
  CHECK(dt.at(2) == Rational(1, 4));
  CHECK(dn.at(2) == Rational(1, 4));

  const auto [bt, bn] = psc::output_distributions(kBalanced, 30);
  for (unsigned c = 0; c <= 30; ++c) CHECK(bt.at(c) == bn.at(c));
  CHECK(bt.tail == bn.tail);
}

TEST_CASE("optimal strategy matches the 1/m threshold at p = 0") {
  const auto table = psc::optimal_strategy(kHalf, 40);
  REQUIRE(table.threshold_note.has_value());
  CHECK(*table.threshold_note == 2);
  for (const auto& [c, guess] : table.decisions) {
    CHECK(guess == (Rational(c) > 2 ? Direction::T : Direction::NT));
  }

  const auto det = psc::optimal_strategy(kDet, 40);
  CHECK(det.decisions.size() == 2);  // only c = 1, 2 are reachable
  CHECK(det.decisions.at(1) == Direction::NT);
  CHECK(det.decisions.at(2) == Direction::T);
}

TEST_CASE("ties guess NT with zero advantage") {
  const auto table = psc::optimal_strategy(kBalanced, 40);
  for (const auto& [c, guess] : table.decisions) {
    CHECK(guess == Direction::NT);
  }
  CHECK_FALSE(table.threshold_note.has_value());
}

TEST_CASE("strategy is pointwise optimal") {
  // The strategy picks the larger conditional at every output, so swapping
  // any single decision cannot increase the success mass.
  const auto [dt, dn] = psc::output_distributions(kHalf, 40);
  const auto table = psc::optimal_strategy(kHalf, 40);
  for (const auto& [c, guess] : table.decisions) {
    const Rational chosen = guess == Direction::T ? dt.at(c) : dn.at(c);
    const Rational other = guess == Direction::T ? dn.at(c) : dt.at(c);
    CHECK(chosen >= other);
  }
}

TEST_CASE("success probability: pinned points") {
  CHECK(psc::success_probability(kHalf, 1) == 1);
  CHECK(psc::success_probability(kHalf, 2) == Rational(1, 2));
  for (unsigned c : {1u, 2u, 5u, 9u}) {
    CHECK(psc::success_probability(kBalanced, c) == Rational(1, 2));
  }
  CHECK_THROWS_AS(psc::success_probability(kDet, 7), std::domain_error);
}

TEST_CASE("success probability honours a non-uniform prior") {
  // At c = 2 the conditionals are equal, so the posterior is the prior.
  CHECK(psc::success_probability(kHalf, 2, Rational(3, 4)) == Rational(3, 4));
}

TEST_CASE("overall success rate") {
  const auto det = psc::overall_success_rate(kDet, 10);
  CHECK(det.lower == 1);
  CHECK(det.upper == 1);

  const auto balanced = psc::overall_success_rate(kBalanced, 60);
  CHECK(balanced.lower == Rational(1, 2));
  CHECK(balanced.upper == Rational(1, 2));

  const auto half = psc::overall_success_rate(kHalf, 60);
  CHECK(half.lower > Rational(1, 2));
  CHECK(half.upper < 1);
  CHECK(half.lower <= half.upper);
}

TEST_CASE("dp check: pinned verdicts") {
  const auto pass = psc::dp_check(kBalanced, Rational(0), Rational(0), 40);
  CHECK(pass.satisfied);
  CHECK(pass.identical_chains);

  const auto fail = psc::dp_check(kHalf, Rational(0), Rational(0), 40);
  CHECK_FALSE(fail.satisfied);
  REQUIRE(fail.worst_c.has_value());
  CHECK(*fail.worst_c == 1);

  const auto weak = psc::dp_check(kBalanced, Rational(1, 10), Rational(1, 100),
                                  40);
  CHECK(weak.satisfied);
}

TEST_CASE("dp check is monotone in epsilon and delta") {
  const CounterConfig cfg{Rational(1, 2), Rational(48, 100)};
  const unsigned c_max = 120;
  const auto base = psc::dp_check(cfg, Rational(1, 10), Rational(1, 100),
                                  c_max);
  CHECK(base.satisfied);
  CHECK(psc::dp_check(cfg, Rational(1, 5), Rational(1, 100), c_max).satisfied);
  CHECK(psc::dp_check(cfg, Rational(1, 10), Rational(1, 50), c_max).satisfied);

  const auto tight = psc::dp_check(cfg, Rational(0), Rational(1, 1000), c_max);
  CHECK_FALSE(tight.satisfied);
}

TEST_CASE("bounded success under (epsilon, 0) privacy") {
  // (0,0)-privacy limits every posterior to e^0/(1+e^0) = 1/2.
  const auto report = psc::dp_check(kBalanced, Rational(0), Rational(0), 40);
  REQUIRE(report.satisfied);
  for (unsigned c : {1u, 2u, 3u, 8u}) {
    CHECK(psc::success_probability(kBalanced, c) <= Rational(1, 2));
  }
}

TEST_CASE("dp feasible agrees with dp_check") {
  const Rational tail_target(1, psc::Integer("1000000000000"));
  for (const auto& [cfg, eps, delta] :
       {std::tuple{kBalanced, Rational(0), Rational(0)},
        std::tuple{kHalf, Rational(0), Rational(0)},
        std::tuple{CounterConfig{Rational(1, 2), Rational(48, 100)},
                   Rational(1, 10), Rational(1, 100)},
        std::tuple{CounterConfig{Rational(1, 2), Rational(1, 10)},
                   Rational(1, 10), Rational(1, 100)}}) {
    const bool fast = psc::dp_feasible(cfg, eps, delta, tail_target);
    const auto chain = psc::build_attack_chain(cfg, Direction::T);
    const unsigned c_max = psc::default_c_max(chain, tail_target);
    const bool full = psc::dp_check(cfg, eps, delta, c_max).satisfied;
    CHECK(fast == full);
  }
}

TEST_CASE("simulation: deterministic counter is exact") {
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const auto t = psc::simulate_attack(kDet, Direction::T, seed,
                                        psc::PrimeMode::ideal(), 100);
    CHECK(t.c == 2);
    CHECK_FALSE(t.exhausted);
    const auto n = psc::simulate_attack(kDet, Direction::NT, seed,
                                        psc::PrimeMode::ideal(), 100);
    CHECK(n.c == 1);
  }
}

TEST_CASE("simulation: probe exhaustion is flagged") {
  const auto outcome = psc::simulate_attack(kDet, Direction::T, 5,
                                            psc::PrimeMode::ideal(), 1);
  CHECK(outcome.exhausted);
  CHECK(outcome.c == 1);
}

TEST_CASE("simulation is deterministic given the seed") {
  const CounterConfig cfg{Rational(1, 3), Rational(1, 4)};
  const auto a = psc::attack_histogram(cfg, Direction::T, 77, 2000,
                                       psc::PrimeMode::ideal(), 200);
  const auto b = psc::attack_histogram(cfg, Direction::T, 77, 2000,
                                       psc::PrimeMode::ideal(), 200);
  CHECK(a == b);
}

TEST_CASE("finite prime converges to the ideal start") {
  // 64 taken steps from WT reach ST with overwhelming probability at m=1/2.
  const auto finite = psc::attack_histogram(kHalf, Direction::T, 3, 20000,
                                            psc::PrimeMode::finite(64), 200);
  const auto exact = psc::first_passage_distribution(
      psc::build_attack_chain(kHalf, Direction::T), 200);
  CHECK(tv_distance(finite, 20000, exact, 200) < 0.02);
}

TEST_CASE("empirical histograms track the exact distribution") {
  const std::uint64_t trials = 20000;
  for (const auto& cfg :
       {kHalf, kBalanced, CounterConfig{Rational(3, 4), Rational(1, 4)}}) {
    for (Direction victim : {Direction::T, Direction::NT}) {
      const auto counts = psc::attack_histogram(cfg, victim, 1234, trials,
                                                psc::PrimeMode::ideal(), 300);
      const auto exact = psc::first_passage_distribution(
          psc::build_attack_chain(cfg, victim), 300);
      CHECK(tv_distance(counts, trials, exact, 300) < 0.02);
    }
  }
}

TEST_CASE("dp report serializes canonically") {
  const auto j = psc::dp_check(kHalf, Rational(0), Rational(0), 5).to_json();
  CHECK(j["satisfied"] == false);
  CHECK(j["epsilon"] == "0/1");
  CHECK(j["worst_c"] == 1);
  CHECK(j["margins"].size() == 6);
}
