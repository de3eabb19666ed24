// Command-line front end: exact analyses of probabilistic saturating
// counters, attack-output distributions, DP checks and synthesis, and the
// MergeSort misprediction harness. Emits CSV/JSON plus a run manifest.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psc/attack.hpp"
#include "psc/counters.hpp"
#include "psc/markov.hpp"
#include "psc/rational.hpp"
#include "psc/synthesis.hpp"
#include "psc/workload.hpp"

namespace {

constexpr const char* kVersion = "psc-toolkit 1.0.0";
constexpr int kExitBadArgs = 2;
constexpr int kExitDegenerate = 3;

const psc::Rational kTailBound(1, psc::Integer("1000000000000"));

std::filesystem::path resolve_out(const std::string& out) {
  std::filesystem::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("PSC_OUT_DIR")) {
      path = std::filesystem::path(dir) / path;
    }
  }
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  return path;
}

/// Every command writes <out>.manifest.json next to its output; re-running
/// the recorded command line reproduces the output byte-for-byte.
void write_manifest(const std::filesystem::path& out,
                    const std::string& command,
                    const std::map<std::string, std::string>& params,
                    std::uint64_t seed) {
  nlohmann::json j;
  j["command"] = command;
  j["parameters"] = params;
  j["master_seed"] = seed;
  j["tool_version"] = kVersion;
  j["outputs"] = {out.string()};
  std::ofstream f(out.string() + ".manifest.json");
  f << j.dump(2) << "\n";
}

void emit(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file " + path.string());
  f << body;
  std::cout << "wrote " << path.string() << "\n";
}

struct RationalOption {
  std::string text;
  psc::Rational value() const { return psc::parse_rational(text); }
};

unsigned pick_c_max(const psc::CounterConfig& cfg, int requested) {
  if (requested >= 0) return static_cast<unsigned>(requested);
  const auto chain_t = psc::build_attack_chain(cfg, psc::Direction::T);
  const auto chain_n = psc::build_attack_chain(cfg, psc::Direction::NT);
  return std::max(psc::default_c_max(chain_t, kTailBound),
                  psc::default_c_max(chain_n, kTailBound));
}

std::string csv_rational(const psc::Rational& r) {
  return psc::decimal_string(r) + "," + psc::fraction_string(r);
}

int cmd_attack_dist(const std::string& m, const std::string& p, int c_max_opt,
                    const std::string& out) {
  const psc::CounterConfig cfg{psc::parse_rational(m), psc::parse_rational(p)};
  cfg.validate();
  const unsigned c_max = pick_c_max(cfg, c_max_opt);
  const auto [dt, dn] = psc::output_distributions(cfg, c_max);

  std::string body = "c,prob_t,prob_t_exact,prob_nt,prob_nt_exact\n";
  for (unsigned c = 0; c <= c_max; ++c) {
    body += std::to_string(c) + "," + csv_rational(dt.at(c)) + "," +
            csv_rational(dn.at(c)) + "\n";
  }
  body += "tail," + csv_rational(dt.tail) + "," + csv_rational(dn.tail) + "\n";

  const auto path = resolve_out(out);
  emit(path, body);
  write_manifest(path, "attack-dist",
                 {{"m", m}, {"p", p}, {"c_max", std::to_string(c_max)}}, 0);
  return 0;
}

int cmd_attack_success(const std::string& m, const std::string& p,
                       int c_max_opt, const std::string& out) {
  const psc::CounterConfig cfg{psc::parse_rational(m), psc::parse_rational(p)};
  cfg.validate();
  const unsigned c_max = pick_c_max(cfg, c_max_opt);
  const auto [dt, dn] = psc::output_distributions(cfg, c_max);

  std::string body = "c,success_prob,success_prob_exact\n";
  for (unsigned c = 0; c <= c_max; ++c) {
    const psc::Rational pt = dt.at(c);
    const psc::Rational pn = dn.at(c);
    if (pt + pn == 0) continue;
    const psc::Rational best = pt > pn ? pt : pn;
    body += std::to_string(c) + "," + csv_rational(best / (pt + pn)) + "\n";
  }
  const auto path = resolve_out(out);
  emit(path, body);
  write_manifest(path, "attack-success",
                 {{"m", m}, {"p", p}, {"c_max", std::to_string(c_max)}}, 0);
  return 0;
}

int cmd_surface(unsigned p_steps, const std::string& s_min,
                const std::string& s_max, unsigned s_steps,
                const std::string& out) {
  const psc::Rational lo = psc::parse_rational(s_min);
  const psc::Rational hi = psc::parse_rational(s_max);
  if (p_steps < 2 || s_steps < 2 || lo >= hi) {
    throw std::invalid_argument("surface grid needs p_steps,s_steps >= 2 and "
                                "s_min < s_max");
  }
  std::string body = "p,s,r,r_exact\n";
  for (unsigned i = 0; i < p_steps; ++i) {
    const psc::Rational p = psc::Rational(i) / (p_steps - 1);
    for (unsigned j = 0; j < s_steps; ++j) {
      const psc::Rational s = lo + (hi - lo) * j / (s_steps - 1);
      const psc::Rational r = psc::misprediction_rate_closed_form(s, p);
      body += psc::decimal_string(p, 6) + "," + psc::decimal_string(s, 6) +
              "," + csv_rational(r) + "\n";
    }
  }
  const auto path = resolve_out(out);
  emit(path, body);
  write_manifest(path, "misprediction-surface",
                 {{"p_steps", std::to_string(p_steps)},
                  {"s_min", s_min},
                  {"s_max", s_max},
                  {"s_steps", std::to_string(s_steps)}},
                 0);
  return 0;
}

int cmd_table2(std::size_t n, std::uint64_t seed,
               const std::vector<std::string>& cfg_specs,
               const std::string& out) {
  std::vector<psc::CounterConfig> cfgs;
  for (const auto& spec : cfg_specs) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("--cfg expects m,p (got " + spec + ")");
    }
    psc::CounterConfig cfg{psc::parse_rational(spec.substr(0, comma)),
                           psc::parse_rational(spec.substr(comma + 1))};
    cfg.validate();
    cfgs.push_back(cfg);
  }

  std::string body = "data_kind,branch,s_hat,m,p,p_exp,p_theo\n";
  for (const auto kind : {psc::DataKind::Uniform, psc::DataKind::Sorted}) {
    const auto data = psc::generate_dataset(kind, n, seed);
    const auto traces = psc::mergesort_trace(data);
    const std::string kind_name =
        kind == psc::DataKind::Uniform ? "uniform" : "sorted";
    for (const auto& [id, trace] : traces) {
      for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const auto result =
            psc::run_predictor(trace, cfgs[i], seed + 1000 * (i + 1));
        body += kind_name + "," + psc::to_string(id) + "," +
                psc::decimal_string(result.s_hat, 6) + "," +
                psc::fraction_string(cfgs[i].m) + "," +
                psc::fraction_string(cfgs[i].p) + "," +
                psc::decimal_string(result.p_exp, 6) + "," +
                (result.p_theo ? psc::decimal_string(*result.p_theo, 6)
                               : std::string("undefined")) +
                "\n";
      }
    }
  }
  const auto path = resolve_out(out);
  emit(path, body);
  std::map<std::string, std::string> params = {{"n", std::to_string(n)}};
  for (std::size_t i = 0; i < cfg_specs.size(); ++i) {
    params["cfg" + std::to_string(i)] = cfg_specs[i];
  }
  write_manifest(path, "table2", params, seed);
  return 0;
}

int cmd_dp_check(const std::string& m, const std::string& p,
                 const std::string& eps, const std::string& delta,
                 int c_max_opt, const std::string& out) {
  const psc::CounterConfig cfg{psc::parse_rational(m), psc::parse_rational(p)};
  cfg.validate();
  const unsigned c_max = pick_c_max(cfg, c_max_opt);
  const auto report = psc::dp_check(cfg, psc::parse_rational(eps),
                                    psc::parse_rational(delta), c_max);
  const auto path = resolve_out(out);
  emit(path, report.to_json().dump(2) + "\n");
  std::cout << (report.satisfied ? "satisfied" : "not satisfied") << "\n";
  write_manifest(path, "dp-check",
                 {{"m", m},
                  {"p", p},
                  {"eps", eps},
                  {"delta", delta},
                  {"c_max", std::to_string(c_max)}},
                 0);
  return 0;
}

int cmd_synthesize(const std::string& m, const std::string& eps,
                   const std::string& delta, const std::string& resolution,
                   int c_max_opt, const std::string& out,
                   const std::string& grid_csv) {
  psc::SynthesisQuery query;
  query.m = psc::parse_rational(m);
  query.epsilon = psc::parse_rational(eps);
  query.delta = psc::parse_rational(delta);
  query.resolution = psc::parse_rational(resolution);
  if (c_max_opt >= 0) query.c_max = static_cast<unsigned>(c_max_opt);

  const auto result = psc::synthesize_p(query);
  const auto path = resolve_out(out);
  emit(path, result.to_json().dump(2) + "\n");
  if (!grid_csv.empty()) {
    std::string body = "p,pass\n";
    for (const auto& g : result.certified_grid) {
      body += psc::decimal_string(g.p, 6) + "," + (g.pass ? "1" : "0") + "\n";
    }
    emit(resolve_out(grid_csv), body);
  }
  write_manifest(path, "synthesize",
                 {{"m", m},
                  {"eps", eps},
                  {"delta", delta},
                  {"resolution", resolution}},
                 0);
  return 0;
}

int cmd_simulate(const std::string& m, const std::string& p,
                 const std::string& victim, std::uint64_t trials,
                 std::uint64_t seed, unsigned probe_len,
                 const std::string& prime, unsigned prime_iters,
                 const std::string& out) {
  const psc::CounterConfig cfg{psc::parse_rational(m), psc::parse_rational(p)};
  cfg.validate();
  if (victim != "T" && victim != "NT") {
    throw std::invalid_argument("--victim must be T or NT");
  }
  const psc::Direction v =
      victim == "T" ? psc::Direction::T : psc::Direction::NT;
  psc::PrimeMode mode = psc::PrimeMode::ideal();
  if (prime == "finite") {
    mode = psc::PrimeMode::finite(prime_iters);
  } else if (prime != "ideal") {
    throw std::invalid_argument("--prime must be ideal or finite");
  }

  const auto counts =
      psc::attack_histogram(cfg, v, seed, trials, mode, probe_len);
  const auto exact =
      psc::first_passage_distribution(psc::build_attack_chain(cfg, v),
                                      probe_len);
  std::string body = "c,count,empirical,exact\n";
  for (const auto& [c, count] : counts) {
    body += std::to_string(c) + "," + std::to_string(count) + "," +
            psc::decimal_string(psc::Rational(count, trials), 6) + "," +
            psc::decimal_string(exact.at(c), 6) + "\n";
  }
  const auto path = resolve_out(out);
  emit(path, body);
  write_manifest(path, "simulate",
                 {{"m", m},
                  {"p", p},
                  {"victim", victim},
                  {"trials", std::to_string(trials)},
                  {"probe_len", std::to_string(probe_len)},
                  {"prime", prime},
                  {"prime_iters", std::to_string(prime_iters)}},
                 seed);
  return 0;
}

int cmd_steady_state(const std::string& m, const std::string& p,
                     const std::string& s, const std::string& out) {
  const psc::CounterConfig cfg{psc::parse_rational(m), psc::parse_rational(p)};
  cfg.validate();
  const psc::Rational sv = psc::parse_rational(s);
  const auto result = psc::stationary_distribution(cfg, sv);
  const auto steadiness = psc::steadiness_check(cfg, sv);

  nlohmann::json j;
  const std::vector<std::string> names = {"ST", "WT", "WN", "SN"};
  for (std::size_t i = 0; i < 4; ++i) {
    j["mu"][names[i]] = psc::fraction_string(result.mu[i]);
    j["mu_decimal"][names[i]] = psc::decimal_string(result.mu[i], 6);
  }
  j["misprediction_rate"] = psc::fraction_string(result.misprediction_rate);
  j["misprediction_rate_decimal"] =
      psc::decimal_string(result.misprediction_rate, 6);
  j["unique_stationary"] = steadiness.unique_stationary;
  j["aperiodic"] = steadiness.aperiodic;

  const auto path = resolve_out(out);
  emit(path, j.dump(2) + "\n");
  write_manifest(path, "steady-state", {{"m", m}, {"p", p}, {"s", s}}, 0);
  return 0;
}

int cmd_dump_chain(const std::string& kind, const std::string& m,
                   const std::string& p, const std::string& victim,
                   const std::string& s, const std::string& out) {
  const psc::CounterConfig cfg{psc::parse_rational(m), psc::parse_rational(p)};
  cfg.validate();
  psc::MarkovModel model;
  if (kind == "attack") {
    model = psc::build_attack_chain(
        cfg, victim == "T" ? psc::Direction::T : psc::Direction::NT);
  } else if (kind == "stationary") {
    model = psc::build_stationary_chain(cfg, psc::parse_rational(s));
  } else {
    throw std::invalid_argument("--kind must be attack or stationary");
  }
  const auto path = resolve_out(out);
  emit(path, model.to_json().dump(2) + "\n");
  write_manifest(path, "dump-chain",
                 {{"kind", kind},
                  {"m", m},
                  {"p", p},
                  {"victim", victim},
                  {"s", s}},
                 0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic saturating counter analysis toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string m = "1", p = "0", eps = "0", delta = "0", s = "1/2";
  std::string victim = "T", out = "out.csv", grid_csv, prime = "ideal";
  std::string resolution = "1/1000", kind = "attack";
  int c_max = -1;
  std::uint64_t seed = 42, trials = 100000;
  std::size_t n = 100000;
  unsigned probe_len = 1000, prime_iters = 64;
  unsigned p_steps = 101, s_steps = 101;
  std::string s_min = "0.001", s_max = "0.999";
  std::vector<std::string> cfg_specs = {"1,0", "1/2,1/2", "4/5,2/5"};

  auto* dist = app.add_subcommand("attack-dist",
                                  "Exact output distributions per victim "
                                  "direction");
  dist->add_option("--m", m);
  dist->add_option("--p", p);
  dist->add_option("--c-max", c_max);
  dist->add_option("--out", out);

  auto* succ = app.add_subcommand("attack-success",
                                  "Success probability of the optimal guess "
                                  "per output");
  succ->add_option("--m", m);
  succ->add_option("--p", p);
  succ->add_option("--c-max", c_max);
  succ->add_option("--out", out);

  auto* surf = app.add_subcommand("misprediction-surface",
                                  "Steady-state misprediction rate over a "
                                  "(p, s) grid");
  surf->add_option("--p-steps", p_steps);
  surf->add_option("--s-min", s_min);
  surf->add_option("--s-max", s_max);
  surf->add_option("--s-steps", s_steps);
  surf->add_option("--out", out);

  auto* table = app.add_subcommand("table2",
                                   "MergeSort misprediction harness: "
                                   "experimental vs theoretical rates");
  table->add_option("--n", n);
  table->add_option("--seed", seed);
  table->add_option("--cfg", cfg_specs, "counter config as m,p (repeatable)");
  table->add_option("--out", out);

  auto* dp = app.add_subcommand("dp-check",
                                "Pointwise (epsilon, delta) check of the "
                                "attack-output distributions");
  dp->add_option("--m", m);
  dp->add_option("--p", p);
  dp->add_option("--eps,--epsilon", eps);
  dp->add_option("--delta", delta);
  dp->add_option("--c-max", c_max);
  dp->add_option("--out", out);

  auto* synth = app.add_subcommand("synthesize",
                                   "Feasible p intervals for a privacy "
                                   "target at fixed m");
  synth->add_option("--m", m);
  synth->add_option("--eps,--epsilon", eps);
  synth->add_option("--delta", delta);
  synth->add_option("--resolution", resolution);
  synth->add_option("--c-max", c_max);
  synth->add_option("--out", out);
  synth->add_option("--grid-csv", grid_csv);

  auto* sim = app.add_subcommand("simulate",
                                 "Seeded Monte Carlo runs of the cut-off "
                                 "attack");
  sim->add_option("--m", m);
  sim->add_option("--p", p);
  sim->add_option("--victim", victim);
  sim->add_option("--trials", trials);
  sim->add_option("--seed", seed);
  sim->add_option("--probe-len", probe_len);
  sim->add_option("--prime", prime, "ideal or finite");
  sim->add_option("--prime-iters", prime_iters);
  sim->add_option("--out", out);

  auto* steady = app.add_subcommand("steady-state",
                                    "Exact stationary distribution and "
                                    "misprediction rate");
  steady->add_option("--m", m);
  steady->add_option("--p", p);
  steady->add_option("--s", s);
  steady->add_option("--out", out);

  auto* dump = app.add_subcommand("dump-chain",
                                  "Serialize a constructed chain as JSON");
  dump->add_option("--kind", kind, "attack or stationary");
  dump->add_option("--m", m);
  dump->add_option("--p", p);
  dump->add_option("--victim", victim);
  dump->add_option("--s", s);
  dump->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dist->parsed()) return cmd_attack_dist(m, p, c_max, out);
    if (succ->parsed()) return cmd_attack_success(m, p, c_max, out);
    if (surf->parsed()) return cmd_surface(p_steps, s_min, s_max, s_steps, out);
    if (table->parsed()) return cmd_table2(n, seed, cfg_specs, out);
    if (dp->parsed()) return cmd_dp_check(m, p, eps, delta, c_max, out);
    if (synth->parsed()) {
      return cmd_synthesize(m, eps, delta, resolution, c_max, out, grid_csv);
    }
    if (sim->parsed()) {
      return cmd_simulate(m, p, victim, trials, seed, probe_len, prime,
                          prime_iters, out);
    }
    if (steady->parsed()) return cmd_steady_state(m, p, s, out);
    if (dump->parsed()) return cmd_dump_chain(kind, m, p, victim, s, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const std::domain_error& e) {
    std::cerr << "degenerate model: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitBadArgs;
}
