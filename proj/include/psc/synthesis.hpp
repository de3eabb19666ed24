#ifndef PSC_SYNTHESIS_HPP
#define PSC_SYNTHESIS_HPP

#include <optional>
#include <vector>

#include <json.hpp>

#include "psc/counters.hpp"
#include "psc/rational.hpp"

namespace psc {

/// Find the p values for which the counter passes the (epsilon, delta) check
/// at a fixed m.
struct SynthesisQuery {
  Rational m;
  Rational epsilon;
  Rational delta;
  Rational resolution{1, 1000};  // grid step over p in [0, 1]
  std::optional<unsigned> c_max;  // default: tail rule with tail <= delta/10

  void validate() const;
};

struct Interval {
  Rational lo;
  Rational hi;
};

struct GridPoint {
  Rational p;
  bool pass;
};

struct SynthesisResult {
  std::vector<Interval> feasible_intervals;
  std::vector<GridPoint> certified_grid;
  bool boundary_refined = false;
  // Observation only: whether every feasible interval mirrors across p = 1/2
  // within the grid resolution. Reported, never corrected.
  std::optional<bool> symmetric_about_half;

  nlohmann::json to_json() const;
};

/// Grid scan over p, consecutive passing points grouped into intervals, each
/// boundary bisected down to resolution/100. Disjoint passing regions are
/// reported as-is; an empty feasible set is a valid result.
SynthesisResult synthesize_p(const SynthesisQuery& query);

struct GapReport {
  Rational gap;   // max over c <= c_max of |Pr[c|T] - Pr[c|NT]|
  Rational tail;  // unchecked mass beyond c_max
};

GapReport max_probability_gap(const CounterConfig& cfg, unsigned c_max);

}  // namespace psc

#endif  // PSC_SYNTHESIS_HPP
