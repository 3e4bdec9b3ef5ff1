// clausekit command line: convert, solve, train, features, bench, generate.
//
// Exit codes: 10 Sat, 20 Unsat, 0 Unknown or success, 1 usage error,
// 2 input error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "clausekit/bench/dataset.hpp"
#include "clausekit/bench/generator.hpp"
#include "clausekit/bench/harness.hpp"
#include "clausekit/dimacs.hpp"
#include "clausekit/features.hpp"
#include "clausekit/logic/http_translator.hpp"
#include "clausekit/logic/pipeline.hpp"
#include "clausekit/rl/checkpoint.hpp"
#include "clausekit/rl/train.hpp"
#include "clausekit/solver/random_heuristic.hpp"
#include "clausekit/solver/solver.hpp"
#include "clausekit/solver/vsids.hpp"
#include "clausekit/version.hpp"

namespace fs = std::filesystem;
using namespace clausekit;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_all(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

// --- convert ---------------------------------------------------------------

struct ConvertArgs {
  std::string input;
  std::string mode = "expr";
  std::string translator;
  std::string translator_url;
  std::string model = "o1-mini";
  std::string out;
  std::string symbols;
  std::size_t clause_cap = logic::kDefaultClauseCap;
};

std::unique_ptr<logic::TranslatorClient> make_translator(const ConvertArgs& a) {
  if (a.translator.rfind("stub:", 0) == 0) {
    std::ifstream in(a.translator.substr(5));
    if (!in) throw InputError("cannot open stub fixtures " + a.translator.substr(5));
    return std::make_unique<logic::StubTranslator>(logic::StubTranslator::from_stream(in));
  }
  if (a.translator == "http") {
    if (a.translator_url.empty()) throw CLI::ValidationError("--translator http needs --translator-url");
    logic::HttpTranslatorConfig cfg;
    cfg.endpoint = a.translator_url;
    cfg.model = a.model;
    return std::make_unique<logic::HttpTranslator>(cfg);
  }
  throw CLI::ValidationError("--translator must be stub:FILE or http");
}

int cmd_convert(const ConvertArgs& a) {
  std::string text = read_all(a.input);
  logic::CompiledDocument doc;
  if (a.mode == "english") {
    if (a.translator.empty()) throw CLI::ValidationError("--mode english needs --translator");
    auto client = make_translator(a);
    doc = logic::compile_document(text, *client, a.clause_cap);
  } else {
    std::istringstream in(text);
    doc = logic::compile_expressions(logic::read_expressions(in), a.clause_cap);
  }

  if (a.out.empty() || a.out == "-") {
    write_dimacs(std::cout, doc.cnf);
  } else {
    auto out = open_out(a.out);
    write_dimacs(out, doc.cnf);
  }
  std::string sym_path = a.symbols;
  if (sym_path.empty() && !a.out.empty() && a.out != "-") sym_path = a.out + ".sym";
  if (!sym_path.empty()) {
    auto out = open_out(sym_path);
    for (Var v = 1; v <= doc.symbols.size(); ++v) {
      const std::string& atom = doc.symbols.name(v);
      auto it = doc.glossary.find(atom);
      out << atom << '\t' << v << '\t' << (it == doc.glossary.end() ? "" : it->second) << '\n';
    }
  }
  return 0;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string cnf;
  std::string heuristic = "vsids";
  std::string policy;
  std::uint64_t max_decisions = 0;
  std::uint64_t timeout_ms = 0;
  std::uint64_t seed = 1;
  bool restarts = false;
  bool delete_learned = false;
};

int cmd_solve(const SolveArgs& a) {
  CnfFormula f = parse_dimacs(read_all(a.cnf));
  solver::Limits limits;
  limits.max_decisions = a.max_decisions;
  limits.timeout = std::chrono::milliseconds(a.timeout_ms);
  solver::SolverOptions opts;
  opts.restarts = a.restarts;
  opts.delete_learned = a.delete_learned;

  solver::SolveResult r;
  if (a.heuristic == "vsids") {
    solver::Vsids h(f.num_vars());
    r = solver::solve(f, h, limits, opts);
  } else if (a.heuristic == "random") {
    solver::RandomPick h(a.seed);
    r = solver::solve(f, h, limits, opts);
  } else {
    if (a.policy.empty()) throw CLI::ValidationError("--heuristic rl needs --policy");
    rl::Policy p = rl::load_policy_file(a.policy, rl::shape_of(f));
    rl::RlHeuristic h(p, rl::DecisionMode::Greedy, a.seed);
    r = solver::solve(f, h, limits, opts);
  }

  switch (r.verdict) {
    case solver::Verdict::Sat: std::cout << "s SATISFIABLE\n"; break;
    case solver::Verdict::Unsat: std::cout << "s UNSATISFIABLE\n"; break;
    case solver::Verdict::Unknown: std::cout << "s UNKNOWN\n"; break;
  }
  if (r.verdict == solver::Verdict::Sat) {
    std::cout << 'v';
    for (Var v = 1; v <= r.model.size(); ++v) std::cout << ' ' << (r.model[v] == Tribool::True ? "" : "-") << v;
    std::cout << " 0\n";
  }
  const auto& s = r.stats;
  std::cout << "c heuristic=" << a.heuristic << " decisions=" << s.decisions << " conflicts=" << s.conflicts
            << " propagations=" << s.propagations << " learned=" << s.learned_clauses << " restarts=" << s.restarts
            << " time_s=" << s.wall_time_s;
  if (r.limit != solver::LimitReason::None) std::cout << " limit=" << solver::to_string(r.limit);
  std::cout << '\n';
  return r.verdict == solver::Verdict::Sat ? 10 : r.verdict == solver::Verdict::Unsat ? 20 : 0;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::uint64_t steps = 100000;
  double lr = 0.0002;
  std::uint64_t seed = 1;
  std::string out;
  std::string log;
  std::optional<std::uint64_t> split_seed;
  double split_ratio = 0.8;
  std::size_t window = 2048;
  std::size_t hidden = 256;
  std::uint64_t max_episode_decisions = 500;
  std::string reward_mode = "absolute";
  std::size_t checkpoint_every = 10;
  bool strict = false;
};

bench::Dataset load_split(const std::string& dir, std::optional<std::uint64_t> split_seed, double ratio,
                          bool want_train, bool strict, bool check) {
  auto files = bench::list_cnf_files(dir);
  if (split_seed) {
    auto split = bench::split_dataset(files, ratio, *split_seed);
    files = want_train ? split.train : split.test;
  }
  bench::Dataset d = bench::load_files(files, {.strict = strict, .check_uf20_91 = check});
  for (const auto& e : d.errors) std::cerr << "warning: skipped " << e.file << ": " << e.message << '\n';
  return d;
}

int cmd_train(const TrainArgs& a) {
  bench::Dataset d = load_split(a.dataset, a.split_seed, a.split_ratio, true, a.strict, false);
  if (d.formulas.empty()) throw InputError("no usable instances in " + a.dataset);
  rl::PpoConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.rollout_window = a.window;
  cfg.hidden_size = a.hidden;
  cfg.max_episode_decisions = a.max_episode_decisions;
  cfg.reward_mode = rl::reward_mode_from_string(a.reward_mode);
  rl::Policy p(rl::shape_of(d.formulas.front()), cfg, a.seed);

  std::string log_path = a.log.empty() ? a.out + ".log.csv" : a.log;
  auto log_out = open_out(log_path);
  log_out << "window,steps,mean_reward,mean_decisions\n";
  rl::TrainOptions opts;
  opts.checkpoint_path = a.out;
  opts.checkpoint_every = a.checkpoint_every;
  opts.on_window = [&](const rl::TrainLogRow& r) {
    log_out << r.window << ',' << r.steps << ',' << r.mean_reward << ',' << r.mean_decisions << '\n' << std::flush;
    std::cerr << "window " << r.window << " steps " << r.steps << " mean_reward " << r.mean_reward
              << " mean_decisions " << r.mean_decisions << '\n';
  };
  rl::train(p, d.formulas, a.steps, opts);
  rl::save_policy_file(p, a.out);
  std::cout << "trained on " << d.formulas.size() << " instances for " << a.steps << " steps; policy written to "
            << a.out << "; log " << log_path << '\n';
  return 0;
}

// --- features --------------------------------------------------------------

int cmd_features(const std::string& path, bool schema) {
  if (schema) {
    std::cout << "feature_schema=" << kFeatureSchemaVersion << '\n';
    for (const auto& n : feature_names()) std::cout << n << '\n';
    return 0;
  }
  FeatureVector fv = extract_features(parse_dimacs(read_all(path)));
  std::cout << std::setprecision(17);
  for (std::size_t i = 0; i < kNumFeatures; ++i) std::cout << feature_names()[i] << '=' << fv[i] << '\n';
  return 0;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string dataset;
  std::string policy;
  std::uint64_t split_seed = 0;
  double split_ratio = 0.8;
  bool all = false;
  std::size_t reps = 3;
  std::uint64_t timeout_ms = 0;
  std::uint64_t max_decisions = 0;
  std::string out = "bench.csv";
  std::size_t parallel = 1;
  std::uint64_t seed = 1;
  bool strict = false;
  bool check = false;
};

int cmd_bench(const BenchArgs& a) {
  bench::Dataset d = load_split(a.dataset, a.all ? std::nullopt : std::optional(a.split_seed), a.split_ratio, false,
                                a.strict, a.check);
  if (d.formulas.empty()) throw InputError("no usable test instances in " + a.dataset);
  rl::Policy p = rl::load_policy_file(a.policy, rl::shape_of(d.formulas.front()));
  bench::ComparisonOptions opts;
  opts.limits.timeout = std::chrono::milliseconds(a.timeout_ms);
  opts.limits.max_decisions = a.max_decisions;
  opts.repetitions = a.reps;
  opts.parallel = a.parallel;
  opts.seed = a.seed;
  bench::Comparison c = bench::run_comparison(d.names, d.formulas, p, opts);
  for (const auto& w : c.warnings) std::cerr << "warning: " << w << '\n';

  {
    auto out = open_out(a.out);
    bench::write_csv(out, c.records);
  }
  {
    auto out = open_out(a.out + ".features.csv");
    bench::write_feature_times_csv(out, c.feature_times);
  }
  bench::Summary s = bench::summarize(c.records);
  double feat = 0;
  for (const auto& t : c.feature_times) feat += t.time_s / static_cast<double>(c.feature_times.size());
  {
    auto out = open_out(a.out + ".summary");
    bench::write_summary_kv(out, s, feat);
  }
  bench::write_summary_text(std::cout, s);
  std::cout << "mean feature extraction time (s): " << feat << '\n';
  std::cout << "records: " << a.out << ", summary: " << a.out << ".summary\n";
  return 0;
}

// --- generate --------------------------------------------------------------

int cmd_generate(const std::string& dir, std::size_t count, std::uint64_t seed, std::size_t vars, std::size_t clauses) {
  auto formulas = bench::generate_satisfiable(count, seed, vars, clauses);
  auto paths = bench::write_instances(dir, formulas);
  std::cout << "wrote " << paths.size() << " satisfiable instances to " << dir << '\n';
  return 0;
}

void print_version() {
  std::cout << "clausekit " << kVersion << '\n'
            << "checkpoint_schema=" << rl::kCheckpointVersion << '\n'
            << "feature_schema=" << kFeatureSchemaVersion << '\n'
            << "csv_schema=" << bench::kCsvSchemaVersion << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clausekit: text and expressions to CNF, CDCL solving with VSIDS or a learned policy"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print the effective configuration");
  app.add_flag_callback("--version", [] {
    print_version();
    throw CLI::Success();
  }, "Print version and schema versions");

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Compile expressions or English text to DIMACS");
  convert->add_option("input", ca.input, "Input file (default: stdin)");
  convert->add_option("--mode", ca.mode, "Input kind")->check(CLI::IsMember({"english", "expr"}))->capture_default_str();
  convert->add_option("--translator", ca.translator, "stub:FILE or http");
  convert->add_option("--translator-url", ca.translator_url, "Endpoint for --translator http");
  convert->add_option("--model", ca.model, "Model name sent to the translator")->capture_default_str();
  convert->add_option("-o,--out", ca.out, "DIMACS output (default: stdout)");
  convert->add_option("--symbols", ca.symbols, "Symbol table output (default: OUT.sym)");
  convert->add_option("--clause-cap", ca.clause_cap, "Distribution clause cap")->capture_default_str();

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a DIMACS file");
  solve->add_option("cnf", sa.cnf, "DIMACS file")->required();
  solve->add_option("--heuristic", sa.heuristic)->check(CLI::IsMember({"vsids", "rl", "random"}))->capture_default_str();
  solve->add_option("--policy", sa.policy, "Policy checkpoint for --heuristic rl");
  solve->add_option("--max-decisions", sa.max_decisions, "0 = unlimited")->capture_default_str();
  solve->add_option("--timeout-ms", sa.timeout_ms, "0 = unlimited")->capture_default_str();
  solve->add_option("--seed", sa.seed)->capture_default_str();
  solve->add_flag("--restarts", sa.restarts, "Luby restarts");
  solve->add_flag("--delete-learned", sa.delete_learned, "Activity-based learned clause deletion");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a policy with PPO");
  train->add_option("--dataset", ta.dataset, "Directory of .cnf files")->required();
  train->add_option("--steps", ta.steps, "Decision transitions")->capture_default_str();
  train->add_option("--lr", ta.lr)->capture_default_str();
  train->add_option("--seed", ta.seed)->capture_default_str();
  train->add_option("--out", ta.out, "Policy checkpoint")->required();
  train->add_option("--log", ta.log, "Training log CSV (default: OUT.log.csv)");
  train->add_option("--split-seed", ta.split_seed, "Train on the training part of this split");
  train->add_option("--split-ratio", ta.split_ratio)->capture_default_str();
  train->add_option("--window", ta.window, "Rollout window")->capture_default_str();
  train->add_option("--hidden", ta.hidden, "Hidden layer width")->capture_default_str();
  train->add_option("--max-episode-decisions", ta.max_episode_decisions)->capture_default_str();
  train->add_option("--reward-mode", ta.reward_mode)->check(CLI::IsMember({"absolute", "delta"}))->capture_default_str();
  train->add_option("--checkpoint-every", ta.checkpoint_every, "Windows between checkpoints")->capture_default_str();
  train->add_flag("--strict", ta.strict, "Abort on unreadable files");

  std::string feat_path;
  bool feat_schema = false;
  auto* features = app.add_subcommand("features", "Print the 48 instance features");
  features->add_option("cnf", feat_path, "DIMACS file");
  features->add_flag("--schema", feat_schema, "Print the feature names instead");

  BenchArgs ba;
  auto* benchc = app.add_subcommand("bench", "Compare VSIDS and the policy on a test set");
  benchc->add_option("--dataset", ba.dataset, "Directory of .cnf files")->required();
  benchc->add_option("--policy", ba.policy, "Policy checkpoint")->required();
  benchc->add_option("--split-seed", ba.split_seed, "Use the test part of this split")->capture_default_str();
  benchc->add_option("--split-ratio", ba.split_ratio)->capture_default_str();
  benchc->add_flag("--all", ba.all, "Use every instance instead of the test split");
  benchc->add_option("--reps", ba.reps, "Repetitions; the minimum time is kept")->capture_default_str();
  benchc->add_option("--timeout-ms", ba.timeout_ms, "0 = unlimited")->capture_default_str();
  benchc->add_option("--max-decisions", ba.max_decisions, "0 = unlimited")->capture_default_str();
  benchc->add_option("--out", ba.out, "Record CSV")->capture_default_str();
  benchc->add_option("--parallel", ba.parallel, "Concurrent instances")->capture_default_str();
  benchc->add_option("--seed", ba.seed)->capture_default_str();
  benchc->add_flag("--strict", ba.strict, "Abort on unreadable files");
  benchc->add_flag("--check-uf20-91", ba.check, "Require 20 variables and 91 clauses");

  std::string gen_dir;
  std::size_t gen_count = 100, gen_vars = 20, gen_clauses = 91;
  std::uint64_t gen_seed = 1;
  auto* generate = app.add_subcommand("generate", "Write satisfiable uniform random 3-SAT instances");
  generate->add_option("--out", gen_dir, "Output directory")->required();
  generate->add_option("--count", gen_count)->capture_default_str();
  generate->add_option("--seed", gen_seed)->capture_default_str();
  generate->add_option("--vars", gen_vars)->capture_default_str()->check(CLI::Range(3, 24));
  generate->add_option("--clauses", gen_clauses)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (verbose) std::cerr << app.config_to_str(true, false);

  try {
    if (*convert) return cmd_convert(ca);
    if (*solve) return cmd_solve(sa);
    if (*train) return cmd_train(ta);
    if (*features) {
      if (!feat_schema && feat_path.empty()) throw CLI::ValidationError("features needs a DIMACS file");
      return cmd_features(feat_path, feat_schema);
    }
    if (*benchc) return cmd_bench(ba);
    if (*generate) return cmd_generate(gen_dir, gen_count, gen_seed, gen_vars, gen_clauses);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const logic::DocumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& s : e.errors()) std::cerr << "  sentence " << s.index << ": " << s.message << '\n';
    return kExitInput;
  } catch (const DimacsError& e) {
    std::cerr << "error: DIMACS " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}
