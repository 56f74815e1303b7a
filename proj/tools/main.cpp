// mistake_lab command-line front end.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mistake_lab/class_core.hpp"
#include "mistake_lab/dimension.hpp"
#include "mistake_lab/errors.hpp"
#include "mistake_lab/experts.hpp"
#include "mistake_lab/game.hpp"
#include "mistake_lab/learners.hpp"
#include "mistake_lab/tree.hpp"

using namespace mistake_lab;
using json = nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t budget_states = 5'000'000;
  std::string out;
};

struct ClassArgs {
  std::string file;
  int n = 0;
  int k = 0;
};

void add_class_options(CLI::App* cmd, ClassArgs& c, bool positional) {
  if (positional) {
    cmd->add_option("class", c.file, "class JSON file");
  } else {
    cmd->add_option("--class", c.file, "class JSON file");
  }
  cmd->add_option("--n", c.n, "use the universal class on n experts instead of a file");
  cmd->add_option("--k", c.k, "mistake budget of every expert (with --n)");
}

WeightedClass load(const ClassArgs& c) {
  if (!c.file.empty()) return load_class_file(c.file);
  if (c.n > 0) return universal_class(c.n, c.k);
  throw PreconditionError("no class given: pass a class file or --n/--k");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw PreconditionError("cannot write '" + path + "'");
  f << text;
}

void emit_value(const Globals& g, const std::string& label, const std::string& exact, const std::string& decimal,
                std::size_t states, double ms) {
  std::cout << exact << " (" << decimal << ")\n";
  std::cerr << label << "; states visited: " << states << "; wall time: " << ms << " ms\n";
  if (!g.out.empty()) {
    json j;
    j["value"] = exact;
    j["decimal"] = decimal;
    j["states_visited"] = states;
    write_file(g.out, j.dump(2) + "\n");
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(parse_rational(item)));
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ParseError("not an integer: '" + item + "'");
    }
  }
  return out;
}

// --- dim -------------------------------------------------------------------

struct DimArgs {
  ClassArgs cls;
  std::string mode = "rand";
  int horizon = -1;
};

void run_dim(const Globals& g, const DimArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  WeightedClass w = load(a.cls);
  DimensionEngine engine(w);
  engine.set_max_states(g.budget_states);
  DimValue v = DimValue::empty();
  std::string label;
  if (a.mode == "rand") {
    v = a.horizon >= 0 ? engine.bounded_randomized_littlestone(w, a.horizon) : engine.randomized_littlestone(w);
    label = a.horizon >= 0 ? "RL(W, " + std::to_string(a.horizon) + ")" : "RL(W)";
  } else {
    v = a.horizon >= 0 ? engine.bounded_littlestone(w, a.horizon) : engine.littlestone(w);
    label = a.horizon >= 0 ? "L(W, " + std::to_string(a.horizon) + ")" : "L(W)";
  }
  if (w.duplicates_collapsed() > 0) {
    std::cerr << "note: " << w.duplicates_collapsed() << " duplicate member(s) collapsed\n";
  }
  if (v.is_empty()) {
    emit_value(g, label, "EMPTY", "-1", engine.states_visited(), elapsed_ms(start));
  } else {
    emit_value(g, label, to_string(v.value()), to_decimal(v.value()), engine.states_visited(), elapsed_ms(start));
  }
}

// --- experts ---------------------------------------------------------------

struct ExpertsArgs {
  std::int64_t n = 0;
  int k = 0;
  std::string what = "dim";
  std::string beta;
};

void run_experts(const Globals& g, const ExpertsArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  if (a.n < 1) throw PreconditionError("experts: n must be at least 1");
  if (a.k < 0) throw PreconditionError("experts: k must be non-negative");
  if (a.what == "dim") {
    if (a.n > 1'000'000) throw PreconditionError("experts: n too large for the exact recursion");
    ExpertsEngine engine;
    engine.set_max_states(g.budget_states);
    Rational v = engine.randomized_littlestone(static_cast<int>(a.n), a.k).value();
    emit_value(g, "RL(U_n, k)", to_string(v), to_decimal(v), engine.states_visited(), elapsed_ms(start));
  } else if (a.what == "ldim") {
    ExpertsEngine engine;
    engine.set_max_states(g.budget_states);
    Rational v = engine.littlestone(static_cast<int>(a.n), a.k).value();
    emit_value(g, "L(U_n, k)", to_string(v), to_decimal(v), engine.states_visited(), elapsed_ms(start));
  } else if (a.what == "D") {
    const int d = experts::capacity_D(a.n, a.k);
    emit_value(g, "D(n, k)", std::to_string(d), std::to_string(d), 0, elapsed_ms(start));
  } else if (a.what == "dstar") {
    if (a.k < 1) throw PreconditionError("experts: dstar requires k >= 1");
    auto v = experts::d_star(a.n, a.k);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.value);
    emit_value(g, "d*(n, k) by root finding, residual " + std::to_string(v.residual), buf, buf, 0, elapsed_ms(start));
  } else if (a.what == "up") {
    char buf[64];
    if (!a.beta.empty()) {
      auto v = experts::vovk_up(a.n, a.k, to_double(parse_rational(a.beta)));
      std::snprintf(buf, sizeof buf, "%.17g", v.value);
      emit_value(g, "up(n, k, beta)", buf, buf, 0, elapsed_ms(start));
    } else {
      auto v = experts::up_minimum(a.n, a.k);
      std::snprintf(buf, sizeof buf, "%.17g", v.value);
      emit_value(g, "min over beta of up(n, k, beta), attained near beta = " + std::to_string(v.beta), buf, buf, 0,
                 elapsed_ms(start));
    }
  } else {
    throw PreconditionError("experts: unknown quantity '" + a.what + "' (dim | ldim | D | dstar | up)");
  }
}

// --- tree ------------------------------------------------------------------

struct TreeExtractArgs {
  ClassArgs cls;
  int horizon = -1;
  std::string slack;
};

void run_tree_extract(const Globals& g, const TreeExtractArgs& a) {
  WeightedClass w = load(a.cls);
  DimensionEngine engine(w);
  engine.set_max_states(g.budget_states);
  int horizon = a.horizon;
  if (horizon < 0) {
    if (a.slack.empty()) throw PreconditionError("tree extract: pass --horizon or --slack");
    horizon = engine.horizon_for_slack(w, parse_rational(a.slack));
  }
  MistakeTree t = engine.extract_optimal_tree(w, horizon);
  const Rational e = expected_branch_length(t);
  std::cerr << "horizon: " << horizon << "\n"
            << "E_T: " << render(e) << "\n"
            << "E_T/2: " << render(e / 2) << "\n"
            << "min branch length: " << min_branch_length(t) << "\n"
            << "distinct nodes: " << distinct_nodes(t) << "\n";
  const std::string text = tree_to_json(t, nullptr, 2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_file(g.out, text);
  }
}

struct TreeAnalyzeArgs {
  std::string tree_file;
  ClassArgs cls;
};

void run_tree_analyze(const Globals& g, const TreeAnalyzeArgs& a) {
  std::ifstream f(a.tree_file);
  if (!f) throw PreconditionError("cannot read '" + a.tree_file + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  auto [t, wf] = tree_from_json(buf.str());
  json j;
  const Rational e = expected_branch_length(t);
  j["E_T"] = to_string(e);
  j["E_T_decimal"] = to_decimal(e);
  j["min_branch_length"] = min_branch_length(t);
  j["depth"] = depth(t);
  j["monotone"] = is_monotone(t);
  QuasiBalance qb = quasi_balance_weights(t);
  if (qb.ok()) {
    json weights = json::object();
    for (const auto& [pos, w] : qb.weights->entries()) weights[pos.empty() ? "root" : pos] = to_string(w.w0);
    j["quasi_balanced_w0"] = weights;
  } else {
    j["quasi_balance_violation"] = *qb.violation;
  }
  if (!wf.entries().empty()) {
    auto common = common_branch_weight(t, &wf);
    j["given_weights_common_branch_weight"] = common ? json(to_string(*common)) : json();
  }
  if (!a.cls.file.empty() || a.cls.n > 0) {
    ShatterReport report = shatter_check(t, load(a.cls));
    j["shattered"] = report.shattered;
    json failing = json::array();
    for (const auto& b : report.failing) {
      json branch = json::array();
      for (const auto& ex : b) branch.push_back({ex.point, ex.label});
      failing.push_back(branch);
    }
    j["failing_branches"] = failing;
  }
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!g.out.empty()) write_file(g.out, text);
}

// --- play ------------------------------------------------------------------

struct PlayArgs {
  ClassArgs cls;
  std::string learner = "randsoa";
  std::string adversary = "threshold";
  std::string tree_file;
  std::string slack = "1/64";
  int trials = 1;
  std::size_t max_rounds = 100000;
};

void run_play(const Globals& g, const PlayArgs& a) {
  if (a.trials < 1) throw PreconditionError("play: trials must be positive");
  std::optional<WeightedClass> w;
  if (a.adversary != "proper" || !a.cls.file.empty() || a.learner != "ftl") w = load(a.cls);
  std::shared_ptr<DimensionEngine> engine;
  if (w) {
    engine = std::make_shared<DimensionEngine>(*w);
    engine->set_max_states(g.budget_states);
  }

  MistakeTree tree;
  std::optional<WeightFunction> wf;
  std::optional<Rational> guarantee;
  int horizon = 0;
  if (a.adversary == "threshold" || a.adversary == "branch") {
    if (!a.tree_file.empty()) {
      std::ifstream f(a.tree_file);
      if (!f) throw PreconditionError("cannot read '" + a.tree_file + "'");
      std::stringstream buf;
      buf << f.rdbuf();
      auto parsed = tree_from_json(buf.str());
      tree = parsed.first;
      if (!parsed.second.entries().empty()) wf = parsed.second;
    } else {
      horizon = engine->horizon_for_slack(*w, parse_rational(a.slack));
      tree = engine->extract_optimal_tree(*w, horizon);
      guarantee = expected_branch_length(tree) / 2;
    }
    horizon = std::max(horizon, depth(tree));
  } else if (a.adversary != "proper") {
    throw PreconditionError("play: unknown adversary '" + a.adversary + "' (threshold | branch | proper)");
  }

  std::string transcripts;
  Rational sum = 0;
  std::optional<Rational> lo;
  std::optional<Rational> hi;
  bool all_realizable = true;
  for (int trial = 0; trial < a.trials; ++trial) {
    std::unique_ptr<Learner> learner;
    if (!w) {
      learner = std::make_unique<FtlLearner>(static_cast<std::size_t>(a.cls.n));
    } else {
      learner = make_learner(a.learner, *w, horizon, engine);
    }
    std::unique_ptr<Adversary> adv;
    if (a.adversary == "proper") {
      adv = proper_adversary(w ? static_cast<int>(w->base_size()) : a.cls.n);
    } else if (a.adversary == "branch") {
      adv = random_branch_adversary(tree, *w);
    } else {
      adv = threshold_adversary(tree, *w, wf ? &*wf : nullptr);
    }
    Transcript t = play(*learner, *adv, a.max_rounds, g.seed + static_cast<std::uint64_t>(trial));
    sum += t.total;
    if (!lo || t.total < *lo) lo = t.total;
    if (!hi || t.total > *hi) hi = t.total;
    all_realizable = all_realizable && t.certificate.realizable;
    if (!g.out.empty()) transcripts += transcript_to_jsonl(t);
  }
  const Rational mean = sum / a.trials;
  std::cout << "learner: " << a.learner << "\n"
            << "adversary: " << a.adversary << "\n"
            << "trials: " << a.trials << "\n"
            << "mean total loss: " << render(mean) << "\n"
            << "min total loss: " << render(*lo) << "\n"
            << "max total loss: " << render(*hi) << "\n"
            << "realizable: " << (all_realizable ? "all trials" : "NOT all trials") << "\n";
  if (guarantee) {
    std::cout << "tree horizon: " << horizon << ", slack " << a.slack << "\n"
              << "E_T/2 of played tree: " << render(*guarantee) << "\n";
  }
  if (!g.out.empty()) write_file(g.out, transcripts);
}

// --- tables ----------------------------------------------------------------

struct TablesArgs {
  std::string kind;
  int kmax = 4;
  int nmax = 8;
  std::string ns = "2,4";
};

int run_tables(const Globals& g, const TablesArgs& a) {
  std::ostringstream csv;
  int status = 0;
  if (a.kind == "proper") {
    csv << "n,H_n_minus_1,decimal\n";
    for (int n = 2; n <= a.nmax; ++n) {
      const Rational v = experts::harmonic_minus_one(n);
      csv << n << ',' << to_string(v) << ',' << to_decimal(v) << '\n';
    }
  } else if (a.kind == "mstar2") {
    csv << "k,mstar2,decimal,dp\n";
    ExpertsEngine engine;
    engine.set_max_states(g.budget_states);
    for (int k = 0; k <= a.kmax; ++k) {
      const Rational v = experts::mstar2_closed_form(k);
      std::string dp;
      try {
        dp = to_string(engine.randomized_littlestone(2, k).value());
      } catch (const BudgetExceeded&) {
        csv << "# partial: state budget exhausted at k=" << k << '\n';
        status = 3;
        break;
      }
      csv << k << ',' << to_string(v) << ',' << to_decimal(v) << ',' << dp << '\n';
    }
  } else if (a.kind == "dnk") {
    std::vector<int> ks;
    for (int k = 0; k <= a.kmax; ++k) ks.push_back(k);
    csv << experts::dnk_table_csv(parse_ints(a.ns), ks);
  } else {
    throw PreconditionError("tables: unknown kind '" + a.kind + "' (mstar2 | dnk | proper)");
  }
  if (g.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(g.out, csv.str());
  }
  return status;
}

// --- check -----------------------------------------------------------------

struct ConcentrationArgs {
  ClassArgs cls{"", 2, 5};
  std::string slack = "1/64";
  std::size_t samples = 100000;
  std::string eps = "0.1,0.2,0.3";
};

int run_concentration(const Globals& g, const ConcentrationArgs& a) {
  WeightedClass w = load(a.cls);
  DimensionEngine engine(w);
  engine.set_max_states(g.budget_states);
  const int horizon = engine.horizon_for_slack(w, parse_rational(a.slack));
  MistakeTree t = engine.extract_optimal_tree(w, horizon);
  ConcentrationReport r = concentration_check(t, parse_doubles(a.eps), a.samples, g.seed);
  std::ostringstream csv;
  csv << "eps,lower_freq,lower_bound,lower_stderr,upper_freq,upper_bound,upper_stderr,ok\n";
  for (const auto& c : r.tails) {
    csv << c.eps << ',' << c.lower_freq << ',' << c.lower_bound << ',' << c.lower_stderr << ',' << c.upper_freq << ','
        << c.upper_bound << ',' << c.upper_stderr << ',' << (c.ok ? "yes" : "no") << '\n';
  }
  std::cerr << "horizon " << horizon << ", E_T = " << render(r.expected_length) << ", sample mean "
            << r.mean_length << " over " << r.samples << " branches\n";
  if (g.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(g.out, csv.str());
  }
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact mistake bounds for online learning"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "seed for every random choice (std::mt19937_64)")->capture_default_str();
  app.add_option("--budget-states", g.budget_states, "cap on memoized states (0 = unlimited)")->capture_default_str();
  app.add_option("--out", g.out, "write the result to this file");

  DimArgs dim;
  auto* dim_cmd = app.add_subcommand("dim", "Littlestone / randomized Littlestone dimension of a class");
  add_class_options(dim_cmd, dim.cls, true);
  dim_cmd->add_option("--mode", dim.mode, "det or rand")->check(CLI::IsMember({"det", "rand"}))->capture_default_str();
  dim_cmd->add_option("--horizon", dim.horizon, "bounded-horizon version");

  ExpertsArgs ex;
  auto* ex_cmd = app.add_subcommand("experts", "quantities for n experts with k mistakes");
  ex_cmd->add_option("--n", ex.n)->required();
  ex_cmd->add_option("--k", ex.k)->required();
  ex_cmd->add_option("--what", ex.what, "dim | ldim | D | dstar | up")->capture_default_str();
  ex_cmd->add_option("--beta", ex.beta, "beta for up (default: minimize over beta)");

  auto* tree_cmd = app.add_subcommand("tree", "optimal tree extraction and tree analysis");
  tree_cmd->require_subcommand(1);
  TreeExtractArgs tx;
  auto* tx_cmd = tree_cmd->add_subcommand("extract", "extract an optimal shattered tree with its weights");
  add_class_options(tx_cmd, tx.cls, true);
  tx_cmd->add_option("--horizon", tx.horizon);
  tx_cmd->add_option("--slack", tx.slack, "pick the horizon from RL(W) - slack");
  TreeAnalyzeArgs ta;
  auto* ta_cmd = tree_cmd->add_subcommand("analyze", "E_T, m_T, monotonicity, quasi-balance and shattering");
  ta_cmd->add_option("tree", ta.tree_file)->required();
  add_class_options(ta_cmd, ta.cls, false);

  PlayArgs pl;
  auto* pl_cmd = app.add_subcommand("play", "play learners against adversaries");
  add_class_options(pl_cmd, pl.cls, false);
  pl_cmd->add_option("--learner", pl.learner, "soa | randsoa | bounded-randsoa | ftl | squint | constant:<p>")
      ->capture_default_str();
  pl_cmd->add_option("--adversary", pl.adversary, "threshold | branch | proper")->capture_default_str();
  pl_cmd->add_option("--tree", pl.tree_file, "tree file for threshold/branch (default: extracted optimal tree)");
  pl_cmd->add_option("--slack", pl.slack, "slack for the extracted tree")->capture_default_str();
  pl_cmd->add_option("--trials", pl.trials)->capture_default_str();
  pl_cmd->add_option("--max-rounds", pl.max_rounds)->capture_default_str();

  TablesArgs tb;
  auto* tb_cmd = app.add_subcommand("tables", "CSV tables");
  tb_cmd->add_option("kind", tb.kind, "mstar2 | dnk | proper")->required();
  tb_cmd->add_option("--kmax", tb.kmax)->capture_default_str();
  tb_cmd->add_option("--nmax", tb.nmax)->capture_default_str();
  tb_cmd->add_option("--ns", tb.ns, "comma-separated n values for dnk")->capture_default_str();

  auto* ck_cmd = app.add_subcommand("check", "empirical checks");
  ck_cmd->require_subcommand(1);
  ConcentrationArgs cc;
  auto* cc_cmd = ck_cmd->add_subcommand("concentration", "branch-length tails of an extracted optimal tree");
  add_class_options(cc_cmd, cc.cls, false);
  cc_cmd->add_option("--slack", cc.slack)->capture_default_str();
  cc_cmd->add_option("--samples", cc.samples)->capture_default_str();
  cc_cmd->add_option("--eps", cc.eps)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*dim_cmd) run_dim(g, dim);
    if (*ex_cmd) run_experts(g, ex);
    if (*tx_cmd) run_tree_extract(g, tx);
    if (*ta_cmd) run_tree_analyze(g, ta);
    if (*pl_cmd) run_play(g, pl);
    if (*tb_cmd) return run_tables(g, tb);
    if (*cc_cmd) return run_concentration(g, cc);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
