#include "psc/synthesis.hpp"

#include <stdexcept>

#include "psc/attack.hpp"

namespace psc {

namespace {

const Rational kDefaultTailBound(1, Integer("1000000000000"));  // 1e-12

Rational abs_diff(const Rational& a, const Rational& b) {
  return a > b ? a - b : b - a;
}

}  // namespace

void SynthesisQuery::validate() const {
  if (m <= 0 || m > 1) {
    throw std::invalid_argument("synthesis requires m in (0,1], got " +
                                fraction_string(m));
  }
  if (epsilon < 0 || delta < 0) {
    throw std::invalid_argument("epsilon and delta must be nonnegative");
  }
  if (resolution <= 0) {
    throw std::invalid_argument("grid resolution must be positive");
  }
}

SynthesisResult synthesize_p(const SynthesisQuery& query) {
  query.validate();

  Rational tail_target = kDefaultTailBound;
  if (query.delta > 0 && query.delta / 10 < tail_target) {
    tail_target = query.delta / 10;
  }
  const unsigned c_cap = query.c_max.value_or(kCMaxCap);

  const auto feasible = [&](const Rational& p) {
    return dp_feasible({query.m, p}, query.epsilon, query.delta, tail_target,
                       c_cap);
  };

  SynthesisResult result;
  for (Rational p = 0; p <= 1; p += query.resolution) {
    result.certified_grid.push_back({p, feasible(p)});
  }
  if (result.certified_grid.back().p != 1) {
    result.certified_grid.push_back({Rational(1), feasible(Rational(1))});
  }

  // Bisect between a failing and an adjacent passing point; returns the
  // certified-passing endpoint. Assumes a single verdict change between the
  // two grid neighbors.
  const Rational refine_width = query.resolution / 100;
  const auto bisect = [&](Rational fail, Rational pass) {
    while (abs_diff(pass, fail) > refine_width) {
      const Rational mid = (fail + pass) / 2;
      (feasible(mid) ? pass : fail) = mid;
      result.boundary_refined = true;
    }
    return pass;
  };

  const auto& grid = result.certified_grid;
  for (std::size_t i = 0; i < grid.size();) {
    if (!grid[i].pass) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid.size() && grid[j + 1].pass) ++j;
    Interval interval{grid[i].p, grid[j].p};
    if (i > 0) interval.lo = bisect(grid[i - 1].p, grid[i].p);
    if (j + 1 < grid.size()) interval.hi = bisect(grid[j + 1].p, grid[j].p);
    result.feasible_intervals.push_back(interval);
    i = j + 1;
  }

  // Symmetry about p = 1/2, observed within one grid step.
  bool symmetric = true;
  const auto& ivs = result.feasible_intervals;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    const Interval& mirror = ivs[ivs.size() - 1 - i];
    if (abs_diff(ivs[i].lo, 1 - mirror.hi) > query.resolution ||
        abs_diff(ivs[i].hi, 1 - mirror.lo) > query.resolution) {
      symmetric = false;
      break;
    }
  }
  result.symmetric_about_half = symmetric;
  return result;
}

GapReport max_probability_gap(const CounterConfig& cfg, unsigned c_max) {
  const auto [dt, dn] = output_distributions(cfg, c_max);
  Rational gap = 0;
  for (unsigned c = 0; c <= c_max; ++c) {
    const Rational d = abs_diff(dt.at(c), dn.at(c));
    if (d > gap) gap = d;
  }
  return {gap, dt.tail > dn.tail ? dt.tail : dn.tail};
}

nlohmann::json SynthesisResult::to_json() const {
  nlohmann::json j;
  nlohmann::json ivs = nlohmann::json::array();
  for (const auto& iv : feasible_intervals) {
    nlohmann::json e;
    e["p_lo"] = fraction_string(iv.lo);
    e["p_hi"] = fraction_string(iv.hi);
    e["p_lo_decimal"] = decimal_string(iv.lo, 6);
    e["p_hi_decimal"] = decimal_string(iv.hi, 6);
    ivs.push_back(std::move(e));
  }
  j["feasible_intervals"] = std::move(ivs);
  j["boundary_refined"] = boundary_refined;
  if (symmetric_about_half) j["symmetric_about_half"] = *symmetric_about_half;
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& g : certified_grid) {
    nlohmann::json e;
    e["p"] = fraction_string(g.p);
    e["pass"] = g.pass;
    grid.push_back(std::move(e));
  }
  j["certified_grid"] = std::move(grid);
  return j;
}

}  // namespace psc
