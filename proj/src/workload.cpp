#include "psc/workload.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "psc/markov.hpp"
#include "psc/random.hpp"

namespace psc {

std::string to_string(BranchId id) {
  switch (id) {
    case BranchId::Line10: return "line10";
    case BranchId::Line11: return "line11";
    case BranchId::Line17: return "line17";
    case BranchId::Line21: return "line21";
    case BranchId::Synthetic: return "synthetic";
  }
  return "?";
}

BranchId branch_id_from_string(const std::string& name) {
  if (name == "line10") return BranchId::Line10;
  if (name == "line11") return BranchId::Line11;
  if (name == "line17") return BranchId::Line17;
  if (name == "line21") return BranchId::Line21;
  if (name == "synthetic") return BranchId::Synthetic;
  throw std::invalid_argument("unknown branch id: " + name);
}

Rational BranchTrace::taken_fraction() const {
  if (outcomes.empty()) throw std::logic_error("empty trace");
  std::size_t taken = 0;
  for (Direction d : outcomes) {
    if (d == Direction::T) ++taken;
  }
  return Rational(taken, outcomes.size());
}

std::vector<std::int64_t> generate_dataset(DataKind kind, std::size_t n,
                                           std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("dataset needs at least 2 elements");
  std::vector<std::int64_t> data(n);
  if (kind == DataKind::Sorted) {
    for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<std::int64_t>(i);
  } else {
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n; ++i) {
      data[i] = static_cast<std::int64_t>(splitmix64(state));
    }
  }
  return data;
}

namespace {

struct TraceRecorder {
  std::map<BranchId, BranchTrace> traces;

  bool record(BranchId id, bool condition) {
    traces[id].outcomes.push_back(condition ? Direction::T : Direction::NT);
    return condition;
  }
};

void merge_sort(std::vector<std::int64_t>& list, std::size_t low,
                std::size_t high, TraceRecorder& rec) {
  if (low + 1 >= high) return;
  const std::size_t m = (high - low) / 2;
  merge_sort(list, low, low + m, rec);
  merge_sort(list, low + m, high, rec);

  const std::vector<std::int64_t> left(list.begin() + low,
                                       list.begin() + low + m);
  const std::vector<std::int64_t> right(list.begin() + low + m,
                                        list.begin() + high);
  std::size_t i = 0, j = 0, k = 0;
  while (rec.record(BranchId::Line10,
                    i != left.size() && j != right.size())) {
    if (rec.record(BranchId::Line11, left[i] <= right[j])) {
      list[low + k] = left[i++];
    } else {
      list[low + k] = right[j++];
    }
    ++k;
  }
  while (rec.record(BranchId::Line17, i != left.size())) {
    list[low + k] = left[i++];
    ++k;
  }
  while (rec.record(BranchId::Line21, j != right.size())) {
    list[low + k] = right[j++];
    ++k;
  }
}

}  // namespace

std::map<BranchId, BranchTrace> mergesort_trace(
    const std::vector<std::int64_t>& data) {
  if (data.size() < 2) throw std::invalid_argument("need at least 2 elements");
  std::vector<std::int64_t> list = data;
  TraceRecorder rec;
  rec.traces[BranchId::Line10].id = BranchId::Line10;
  rec.traces[BranchId::Line11].id = BranchId::Line11;
  rec.traces[BranchId::Line17].id = BranchId::Line17;
  rec.traces[BranchId::Line21].id = BranchId::Line21;
  merge_sort(list, 0, list.size(), rec);
  for (std::size_t i = 1; i < list.size(); ++i) {
    if (list[i - 1] > list[i]) throw std::logic_error("mergesort failed");
  }
  return std::move(rec.traces);
}

BranchTrace bernoulli_trace(const Rational& s, std::size_t n,
                            std::uint64_t seed) {
  if (s < 0 || s > 1) throw std::invalid_argument("s outside [0,1]");
  if (n < 1) throw std::invalid_argument("trace needs at least 1 outcome");
  const double threshold = to_double(s);
  UniformDraws rng(seed);
  BranchTrace trace;
  trace.id = BranchId::Synthetic;
  trace.outcomes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    trace.outcomes.push_back(rng.next() < threshold ? Direction::T
                                                    : Direction::NT);
  }
  return trace;
}

HarnessResult run_predictor(const BranchTrace& trace, const CounterConfig& cfg,
                            std::uint64_t seed, CounterState initial_state) {
  cfg.validate();
  if (trace.outcomes.empty()) throw std::invalid_argument("empty trace");

  UniformDraws rng(seed);
  const CounterSampler sampler(cfg);
  CounterState state = initial_state;
  std::size_t mispredictions = 0;
  for (Direction outcome : trace.outcomes) {
    if (predict(state) != outcome) ++mispredictions;
    state = sampler.step(state, outcome, rng.next());
  }

  HarnessResult result;
  result.id = trace.id;
  result.s_hat = trace.taken_fraction();
  result.p_exp = Rational(mispredictions, trace.outcomes.size());
  result.trace_length = trace.outcomes.size();
  result.cfg = cfg;
  try {
    result.p_theo = misprediction_rate_closed_form(result.s_hat, cfg.p);
  } catch (const std::domain_error&) {
    result.p_theo = std::nullopt;
  }
  return result;
}

void write_trace(std::ostream& out, const BranchTrace& trace) {
  out << to_string(trace.id) << "," << trace.outcomes.size() << ","
      << fraction_string(trace.taken_fraction()) << "\n";
  std::size_t run = 0;
  Direction current = Direction::T;
  for (Direction d : trace.outcomes) {
    if (run > 0 && d == current) {
      ++run;
      continue;
    }
    if (run > 0) out << run << (current == Direction::T ? 'T' : 'N');
    current = d;
    run = 1;
  }
  if (run > 0) out << run << (current == Direction::T ? 'T' : 'N');
  out << "\n";
}

BranchTrace read_trace(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::invalid_argument("missing trace header");
  }
  std::stringstream hs(header);
  std::string id_str, len_str, s_str;
  if (!std::getline(hs, id_str, ',') || !std::getline(hs, len_str, ',') ||
      !std::getline(hs, s_str, ',')) {
    throw std::invalid_argument("malformed trace header: " + header);
  }
  BranchTrace trace;
  trace.id = branch_id_from_string(id_str);
  const std::size_t length = std::stoull(len_str);

  std::string body;
  if (!std::getline(in, body)) {
    throw std::invalid_argument("missing trace body");
  }
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t digits = pos;
    while (digits < body.size() && std::isdigit(body[digits])) ++digits;
    if (digits == pos || digits == body.size()) {
      throw std::invalid_argument("malformed run-length encoding");
    }
    const std::size_t run = std::stoull(body.substr(pos, digits - pos));
    const char symbol = body[digits];
    if (symbol != 'T' && symbol != 'N') {
      throw std::invalid_argument("unexpected outcome symbol");
    }
    trace.outcomes.insert(trace.outcomes.end(), run,
                          symbol == 'T' ? Direction::T : Direction::NT);
    pos = digits + 1;
  }
  if (trace.outcomes.size() != length) {
    throw std::invalid_argument("trace length mismatch");
  }
  if (fraction_string(trace.taken_fraction()) != s_str) {
    throw std::invalid_argument("trace s_hat mismatch");
  }
  return trace;
}

}  // namespace psc
