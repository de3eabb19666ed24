#include "psc/markov.hpp"

#include <stdexcept>
#include <utility>

namespace psc {

namespace {

using Matrix = std::vector<std::vector<Rational>>;

Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

/// In-place fraction-free-ish Gaussian elimination; returns the rank.
unsigned rank_of(Matrix a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  unsigned rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[row]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      if (a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[row][col];
      for (std::size_t c = col; c < cols; ++c) a[r][c] -= f * a[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

Rational det_of(Matrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

/// Solves the (possibly overdetermined) exact system A x = b. Returns nullopt
/// if the system is inconsistent or underdetermined.
std::optional<std::vector<Rational>> solve_exact(Matrix a,
                                                 std::vector<Rational> b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[row]);
    std::swap(b[pivot], b[row]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[row][col];
      for (std::size_t c = col; c < cols; ++c) a[r][c] -= f * a[row][c];
      b[r] -= f * b[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (pivot_col.size() < cols) return std::nullopt;  // underdetermined
  for (std::size_t r = row; r < rows; ++r) {
    if (b[r] != 0) return std::nullopt;  // inconsistent
  }
  std::vector<Rational> x(cols, Rational(0));
  for (std::size_t r = 0; r < pivot_col.size(); ++r) {
    x[pivot_col[r]] = b[r] / a[r][pivot_col[r]];
  }
  return x;
}

Matrix minus_identity(const Matrix& m) {
  Matrix a = m;
  for (std::size_t i = 0; i < a.size(); ++i) a[i][i] -= 1;
  return a;
}

Matrix plus_identity(const Matrix& m) {
  Matrix a = m;
  for (std::size_t i = 0; i < a.size(); ++i) a[i][i] += 1;
  return a;
}

}  // namespace

void MarkovModel::validate() const {
  if (matrix.size() != states.size()) {
    throw std::logic_error("matrix/state size mismatch");
  }
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (matrix[i].size() != states.size()) {
      throw std::logic_error("non-square transition matrix");
    }
    Rational sum = 0;
    for (const Rational& v : matrix[i]) {
      if (v < 0 || v > 1) throw std::logic_error("entry outside [0,1]");
      sum += v;
    }
    if (sum != 1) {
      throw std::logic_error("row " + states[i] + " sums to " +
                             fraction_string(sum));
    }
  }
  if (absorbing) {
    const auto& row = matrix[*absorbing];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != (j == *absorbing ? 1 : 0)) {
        throw std::logic_error("absorbing row is not a self-loop");
      }
    }
  }
}

nlohmann::json MarkovModel::to_json() const {
  nlohmann::json j;
  j["states"] = states;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : matrix) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(fraction_string(v));
    rows.push_back(std::move(r));
  }
  j["matrix"] = std::move(rows);
  j["start"] = states[start];
  if (target) j["target"] = states[*target];
  if (absorbing) j["absorbing"] = states[*absorbing];
  return j;
}

InputPolicy InputPolicy::constant(Direction d) {
  return {d == Direction::T ? Kind::ConstantT : Kind::ConstantNT,
          Rational(d == Direction::T ? 1 : 0)};
}

InputPolicy InputPolicy::bernoulli(const Rational& s) {
  if (s < 0 || s > 1) {
    throw std::invalid_argument("taken probability s outside [0,1]: " +
                                fraction_string(s));
  }
  return {Kind::Bernoulli, s};
}

MarkovModel build_stationary_chain(const CounterConfig& cfg,
                                   const Rational& s) {
  cfg.validate();
  const InputPolicy policy = InputPolicy::bernoulli(s);
  const Rational t = 1 - policy.s;

  // Row order (ST, WT, WN, SN) to keep matrix literals comparable with the
  // closed forms.
  const std::array<CounterState, 4> order = {CounterState::ST, CounterState::WT,
                                             CounterState::WN,
                                             CounterState::SN};
  MarkovModel model;
  model.states = {"ST", "WT", "WN", "SN"};
  model.matrix.assign(4, std::vector<Rational>(4, Rational(0)));
  for (std::size_t i = 0; i < 4; ++i) {
    const auto dt = transition_distribution(order[i], Direction::T, cfg);
    const auto dn = transition_distribution(order[i], Direction::NT, cfg);
    for (std::size_t j = 0; j < 4; ++j) {
      model.matrix[i][j] = policy.s * dt[order[j]] + t * dn[order[j]];
    }
  }
  model.start = 0;
  return model;
}

MarkovModel build_attack_chain(const CounterConfig& cfg, Direction victim) {
  cfg.validate();
  if (cfg.m == 0) {
    throw std::domain_error(
        "degenerate static predictor: m = 0 never leaves ST");
  }
  const Rational& m = cfg.m;
  const Rational& p = cfg.p;

  MarkovModel model;
  model.states = {"ST", "ST'", "WT", "SN", "S"};
  model.matrix.assign(5, std::vector<Rational>(5, Rational(0)));
  enum { ST = 0, STP = 1, WT = 2, SN = 3, S = 4 };

  // Victim transition out of ST.
  if (victim == Direction::T) {
    model.matrix[ST][STP] = 1 - m * p;
    model.matrix[ST][WT] = m * p;
  } else {
    model.matrix[ST][STP] = 1 - m + m * p;
    model.matrix[ST][WT] = m - m * p;
  }
  // Probe phase: constant NT inputs.
  model.matrix[STP][STP] = 1 - m + m * p;
  model.matrix[STP][WT] = m - m * p;
  model.matrix[WT][WT] = 1 - m;
  model.matrix[WT][SN] = m;
  model.matrix[SN][S] = 1;
  model.matrix[S][S] = 1;

  model.start = ST;
  model.target = SN;
  model.absorbing = S;
  return model;
}

OutputDistribution first_passage_distribution(const MarkovModel& model,
                                              unsigned c_max) {
  if (!model.target) throw std::invalid_argument("model has no target state");
  const std::size_t n = model.size();
  std::vector<Rational> x(n, Rational(0));
  x[model.start] = 1;

  OutputDistribution out;
  out.c_max = c_max;
  Rational mass = 0;
  for (unsigned c = 0; c <= c_max; ++c) {
    // x <- x * M, one extra transition ahead of c (the victim's move).
    std::vector<Rational> next(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (model.matrix[i][j] != 0) next[j] += x[i] * model.matrix[i][j];
      }
    }
    x = std::move(next);
    const Rational& hit = x[*model.target];
    if (hit != 0) {
      out.probs[c] = hit;
      mass += hit;
    }
  }
  out.tail = 1 - mass;
  return out;
}

unsigned default_c_max(const MarkovModel& model, const Rational& tail_bound) {
  if (!model.target) throw std::invalid_argument("model has no target state");
  const std::size_t n = model.size();
  std::vector<Rational> x(n, Rational(0));
  x[model.start] = 1;
  Rational mass = 0;
  for (unsigned c = 0; c <= kCMaxCap; ++c) {
    std::vector<Rational> next(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (model.matrix[i][j] != 0) next[j] += x[i] * model.matrix[i][j];
      }
    }
    x = std::move(next);
    mass += x[*model.target];
    if (1 - mass < tail_bound) return c;
  }
  return kCMaxCap;
}

StationaryResult stationary_distribution(const CounterConfig& cfg,
                                         const Rational& s) {
  cfg.validate();
  if (cfg.m == 0) {
    throw std::domain_error(
        "degenerate static predictor: m = 0 has no unique steady state");
  }
  if (cfg.p == 1 && (s == 0 || s == 1)) {
    throw std::domain_error(
        "steady state undefined: p = 1 with s in {0,1} yields a periodic "
        "chain");
  }

  const MarkovModel model = build_stationary_chain(cfg, s);
  const std::size_t n = 4;
  // mu * M = mu  <=>  (M^T - I) mu^T = 0, plus the normalization row.
  Matrix a(n + 1, std::vector<Rational>(n, Rational(0)));
  std::vector<Rational> b(n + 1, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) a[j][i] = model.matrix[i][j];
    a[j][j] -= 1;
  }
  for (std::size_t i = 0; i < n; ++i) a[n][i] = 1;
  b[n] = 1;

  const auto x = solve_exact(std::move(a), std::move(b));
  if (!x) {
    throw std::domain_error("stationary distribution is not unique");
  }

  StationaryResult result;
  for (std::size_t i = 0; i < n; ++i) result.mu[i] = (*x)[i];
  const Rational t = 1 - s;
  result.misprediction_rate =
      (result.mu[0] + result.mu[1]) * t + (result.mu[2] + result.mu[3]) * s;

  // Cross-check the linear solve against the closed forms.
  const auto closed = stationary_closed_form(s, cfg.p);
  for (std::size_t i = 0; i < n; ++i) {
    if (result.mu[i] != closed[i]) {
      throw std::logic_error("stationary solve disagrees with closed form");
    }
  }
  if (result.misprediction_rate != misprediction_rate_closed_form(s, cfg.p)) {
    throw std::logic_error("misprediction rate disagrees with closed form");
  }
  return result;
}

SteadinessReport steadiness_check(const CounterConfig& cfg, const Rational& s) {
  const MarkovModel model = build_stationary_chain(cfg, s);
  SteadinessReport report;
  report.unique_stationary = rank_of(minus_identity(model.matrix)) == 3;
  report.aperiodic = det_of(plus_identity(model.matrix)) != 0;
  return report;
}

std::array<Rational, 4> stationary_closed_form(const Rational& s,
                                               const Rational& p) {
  const Rational t = 1 - s;
  const Rational q = 1 - p;
  const Rational alpha = q * s + p * t;  // ST upward pull
  const Rational beta = q * t + p * s;   // ST downward pull
  const Rational denom = s * alpha * (1 + beta) + t * beta * (1 + alpha);
  if (denom == 0) {
    throw std::domain_error("closed form undefined: p = 1 with s in {0,1}");
  }
  return {s * alpha / denom, s * alpha * beta / denom, t * alpha * beta / denom,
          t * beta / denom};
}

Rational misprediction_rate_closed_form(const Rational& s, const Rational& p) {
  const Rational t = 1 - s;
  const Rational q = 1 - p;
  const Rational alpha = q * s + p * t;
  const Rational beta = q * t + p * s;
  const Rational denom = s * alpha * (1 + beta) + t * beta * (1 + alpha);
  if (denom == 0) {
    throw std::domain_error("misprediction rate undefined: p = 1 with s in "
                            "{0,1}");
  }
  return (s * t * alpha * (1 + beta) + s * t * beta * (1 + alpha)) / denom;
}

}  // namespace psc
