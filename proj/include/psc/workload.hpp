#ifndef PSC_WORKLOAD_HPP
#define PSC_WORKLOAD_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psc/counters.hpp"
#include "psc/rational.hpp"

namespace psc {

/// The four static branches of the instrumented MergeSort, or a synthetic
/// Bernoulli trace.
enum class BranchId { Line10, Line11, Line17, Line21, Synthetic };

std::string to_string(BranchId id);
BranchId branch_id_from_string(const std::string& name);

/// Recorded taken/not-taken outcomes of one static branch.
struct BranchTrace {
  BranchId id = BranchId::Synthetic;
  std::vector<Direction> outcomes;

  /// Exact fraction of taken outcomes.
  Rational taken_fraction() const;
};

enum class DataKind { Uniform, Sorted };

/// Uniform: n i.i.d. 64-bit integers from the seeded splitmix64 stream.
/// Sorted: 0..n-1 ascending. Requires n >= 2.
std::vector<std::int64_t> generate_dataset(DataKind kind, std::size_t n,
                                           std::uint64_t seed = 0);

/// Runs the instrumented top-down MergeSort over a copy of `data` and records
/// one outcome per evaluation of each of the four source branches, including
/// the terminating false evaluation of each loop condition. A branch is taken
/// when its condition as written evaluates true.
std::map<BranchId, BranchTrace> mergesort_trace(
    const std::vector<std::int64_t>& data);

/// i.i.d. outcomes, taken with probability s; deterministic given the seed.
BranchTrace bernoulli_trace(const Rational& s, std::size_t n,
                            std::uint64_t seed);

struct HarnessResult {
  BranchId id;
  Rational s_hat;
  Rational p_exp;                  // measured misprediction fraction
  std::optional<Rational> p_theo;  // closed form at s_hat; nullopt if degenerate
  std::size_t trace_length;
  CounterConfig cfg;
};

/// Runs one dedicated counter over the trace from initial_state: a
/// misprediction is recorded whenever predict(state) differs from the
/// outcome, then the counter steps with the seeded draw stream.
HarnessResult run_predictor(const BranchTrace& trace, const CounterConfig& cfg,
                            std::uint64_t seed,
                            CounterState initial_state = CounterState::WT);

/// Compact text format: header "branch_id,length,s_hat", then a run-length
/// encoded outcome string such as "5T3N".
void write_trace(std::ostream& out, const BranchTrace& trace);
BranchTrace read_trace(std::istream& in);

}  // namespace psc

#endif  // PSC_WORKLOAD_HPP
