// fairstream command line: run, gen, adversary, search, audit, list.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fairstream/harness.hpp"

using namespace fairstream;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBoundFailed = 1;
constexpr int kExitError = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A JSON array of decision strings, or whitespace-separated tokens.
std::vector<Decision> load_decisions(const std::string& path) {
  std::string text = slurp(path);
  std::vector<Decision> out;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    for (const auto& d : json::parse(text)) {
      out.push_back(d.is_number_integer() ? Decision::assign(d.get<int>()) : Decision::parse(d.get<std::string>()));
    }
    return out;
  }
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) out.push_back(Decision::parse(tok));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

Rational parse_epsilon(const std::string& text) {
  Rational eps = eval_expression(text, Rational(0));
  if (eps <= Rational(0) || eps >= Rational(1)) throw ConfigError("epsilon must lie in (0,1)");
  return eps;
}

struct GenFlags {
  std::string klass = "binary";
  std::string direction = "goods";
  int n = 2;
  int t = 6;
  std::uint64_t seed = 0;
  int categories = 4;
  int max_weight = 10;
  int deadline = 0;
  double loop_rate = 0.15;
  std::vector<std::string> agent_classes;
  bool identical_binary = false;

  void attach(CLI::App* app) {
    app->add_option("--class", klass, "binary | bivalued(a,b) | trivalued(a,b,z) | partition-matroid | supermod-complement | monotone");
    app->add_option("--direction", direction, "goods or chores")->check(CLI::IsMember({"goods", "chores"}));
    app->add_option("--n", n, "agents")->check(CLI::PositiveNumber);
    app->add_option("--t", t, "items")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "generator seed");
    app->add_option("--categories", categories, "matroid labels per agent")->check(CLI::PositiveNumber);
    app->add_option("--max-weight", max_weight, "monotone weights lie in 0..max");
    app->add_option("--deadline", deadline, "0 or 1")->check(CLI::Range(0, 1));
    app->add_option("--loop-rate", loop_rate, "matroid loop probability")->check(CLI::Range(0.0, 1.0));
    app->add_option("--agent-class", agent_classes, "per-agent class, repeat n times");
    app->add_flag("--identical-binary", identical_binary, "agents 1..n-1 share one row");
  }

  GenSpec spec(std::uint64_t s) const {
    GenSpec g;
    g.klass = klass;
    g.direction = parse_direction(direction);
    g.n = n;
    g.t = t;
    g.seed = s;
    g.categories = categories;
    g.max_weight = max_weight;
    g.deadline = deadline;
    g.loop_rate = loop_rate;
    g.agent_classes = agent_classes;
    g.identical_binary = identical_binary;
    return g;
  }
};

struct AuditFlags {
  bool no_mms = false;
  bool no_welfare = false;
  std::vector<std::string> bounds;

  void attach(CLI::App* app) {
    app->add_flag("--no-mms", no_mms, "skip MMS");
    app->add_flag("--no-welfare", no_welfare, "skip USW/USC");
    app->add_option("--bound", bounds, "e.g. EF1>=1/2 (repeatable)");
  }

  void apply(RunConfig& cfg) const {
    cfg.audit.mms = !no_mms;
    cfg.audit.welfare = !no_welfare;
    for (const auto& b : bounds) cfg.bounds.push_back(parse_bound(b));
  }
};

int report_exit(const RunReport& r) { return r.passed() ? kExitOk : kExitBoundFailed; }

void print_summary(const RunReport& r) {
  auto cell = [](const std::optional<Ratio>& v) { return v ? v->str() : std::string("skipped"); };
  std::cerr << r.algorithm << " " << to_string(r.direction) << " n=" << r.n << " t=" << r.t
            << " ef1=" << cell(r.summary.ef1) << " mms=" << cell(r.summary.mms)
            << " welfare=" << cell(r.summary.welfare) << " violations=" << r.constraint_violations;
  for (const auto& f : r.failed_bounds) std::cerr << " FAILED " << f;
  std::cerr << '\n';
}

int cmd_run(const std::string& algorithm, const std::string& instance_path, const std::string& decisions_path,
            const GenFlags& gen, int count, unsigned threads, bool monotone, const AuditFlags& audit,
            const std::string& json_out, const std::string& csv_out, bool timing) {
  RunConfig cfg;
  cfg.algorithm = algorithm;
  cfg.params.monotone = monotone;
  audit.apply(cfg);
  if (!decisions_path.empty()) cfg.decisions = load_decisions(decisions_path);
  if (cfg.algorithm.empty() && !cfg.decisions) throw ConfigError("run needs --algorithm or --decisions");

  if (!instance_path.empty()) {
    RunReport r = run(load_instance(instance_path), cfg);
    write_text(json_out, to_json(r, timing).dump(2) + "\n");
    write_text(csv_out, to_csv(r));
    print_summary(r);
    return report_exit(r);
  }

  std::vector<Instance> instances;
  for (int k = 0; k < count; ++k) instances.push_back(generate(gen.spec(gen.seed + static_cast<std::uint64_t>(k))));
  auto reports = run_batch(instances, cfg, threads);
  int failed = 0;
  json all = json::array();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (!reports[k].passed()) {
      ++failed;
      if (failed <= 5) print_summary(reports[k]);
    }
    if (count == 1) {
      all = to_json(reports[k], timing);
    } else {
      json row = to_json(reports[k], timing);
      all.push_back({{"seed", gen.seed + k}, {"summary", row["summary"]}, {"passed", row["passed"]},
                     {"failed_bounds", row["failed_bounds"]}});
    }
  }
  write_text(json_out, all.dump(2) + "\n");
  if (count == 1) write_text(csv_out, to_csv(reports.front()));
  std::cerr << reports.size() - static_cast<std::size_t>(failed) << "/" << reports.size() << " runs passed\n";
  return failed == 0 ? kExitOk : kExitBoundFailed;
}

int cmd_gen(const GenFlags& gen, const std::string& out) {
  Instance inst = generate(gen.spec(gen.seed));
  std::ostringstream ss;
  write_instance(ss, inst);
  write_text(out.empty() ? "-" : out, ss.str());
  return kExitOk;
}

Metric default_metric(const ScriptedAdversary& adv) {
  const auto& doc = adv.document();
  if (doc.contains("queries") && !doc["queries"].empty()) {
    return parse_metric(doc["queries"][0].at("metric").get<std::string>());
  }
  return Metric::EF1;
}

int cmd_adversary(const std::string& name, const std::string& eps_text, const std::string& algorithm,
                  const std::string& command, int timeout_ms, bool unchecked, const std::string& metric_text,
                  const std::string& json_out) {
  Rational eps = parse_epsilon(eps_text);
  auto adv = builtin_adversary(name, eps);
  Metric metric = metric_text.empty() ? default_metric(*adv) : parse_metric(metric_text);
  std::unique_ptr<Allocator> alloc;
  if (!command.empty()) {
    alloc = std::make_unique<ExternalAllocator>(command, std::chrono::milliseconds(timeout_ms), adv->representation());
  } else {
    alloc = make_allocator(algorithm);
  }
  AllocatorParams params;
  params.unchecked = unchecked;
  AdversaryRun live = play(*adv, *alloc, params);
  GameValue gv = game_value_at_epsilon(name, metric, eps);
  Ratio achieved = final_metric(metric, live.report.allocation, ValuationOracle(live.stream));
  json out = {{"adversary", name},
              {"epsilon", eps.str()},
              {"metric", to_string(metric)},
              {"achieved", achieved.str()},
              {"legal", satisfies(adv->constraint(), live.report.allocation, ValuationOracle(live.stream))},
              {"report", to_json(live.report)},
              {"game_value", to_json(gv)}};
  write_text(json_out.empty() ? "-" : json_out, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_search(const std::string& name, const std::string& eps_text, const std::string& metric_text,
               const std::string& gate_text, const std::string& tree_out, unsigned threads,
               const std::string& json_out) {
  Rational eps = parse_epsilon(eps_text);
  auto adv = builtin_adversary(name, eps);
  Metric metric = metric_text.empty() ? default_metric(*adv) : parse_metric(metric_text);
  GameOptions opts;
  opts.threads = threads;
  opts.record_tree = !tree_out.empty();
  GameValue gv;
  if (gate_text.empty()) {
    gv = game_value_at_epsilon(name, metric, eps, opts);
  } else {
    Bound b = parse_bound(gate_text);
    GameQuery q;
    q.metric = metric;
    q.gate = Gate{b.metric, b.op, b.value};
    gv = solve_game(*adv, q, opts);
  }
  if (opts.record_tree) write_text(tree_out, gv.tree.dump(2) + "\n");
  json out = to_json(gv);
  out["adversary"] = name;
  out["epsilon"] = eps.str();
  out.erase("tree");
  write_text(json_out.empty() ? "-" : json_out, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_audit(const std::string& instance_path, const std::string& trace_path, const AuditFlags& audit,
              const std::string& json_out, const std::string& csv_out) {
  RunConfig cfg;
  audit.apply(cfg);
  RunReport r = audit_trace(load_instance(instance_path), load_decisions(trace_path), cfg);
  write_text(json_out, to_json(r).dump(2) + "\n");
  write_text(csv_out, to_csv(r));
  print_summary(r);
  return report_exit(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online fair allocation engine"};
  app.require_subcommand(1);

  std::string algorithm, instance_path, decisions_path, json_out, csv_out;
  int count = 1;
  unsigned threads = 1;
  bool monotone = false, timing = false;
  GenFlags gen;
  AuditFlags audit;
  auto* run_cmd = app.add_subcommand("run", "stream an instance through an allocator and audit every round");
  run_cmd->add_option("-a,--algorithm", algorithm, "allocator name");
  run_cmd->add_option("-i,--instance", instance_path, "JSONL instance file")->check(CLI::ExistingFile);
  run_cmd->add_option("-d,--decisions", decisions_path, "decision override file")->check(CLI::ExistingFile);
  run_cmd->add_option("--count", count, "generated instances, seeds seed..seed+count-1")->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", threads, "batch worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--monotone", monotone, "accept general additive streams with monotone weights");
  run_cmd->add_option("--json", json_out, "JSON report path, - for stdout");
  run_cmd->add_option("--csv", csv_out, "CSV report path");
  run_cmd->add_flag("--timing", timing, "include wall-clock time in the JSON report");
  gen.attach(run_cmd);
  audit.attach(run_cmd);

  GenFlags gen_only;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "write a seeded random instance");
  gen_only.attach(gen_cmd);
  gen_cmd->add_option("-o,--out", gen_out, "output path (stdout by default)");

  std::string adv_name, eps_text = "1/10", command, metric_text, adv_json;
  std::string adv_algorithm = "marginal_greedy";
  int timeout_ms = 10000;
  bool unchecked = false;
  auto* adv_cmd = app.add_subcommand("adversary", "play a builtin adversary against an allocator");
  adv_cmd->add_option("name", adv_name, "adversary name")->required();
  adv_cmd->add_option("--eps", eps_text, "epsilon, e.g. 1/10 or 0.05");
  adv_cmd->add_option("-a,--algorithm", adv_algorithm, "builtin allocator");
  adv_cmd->add_option("--command", command, "external allocator command (stdio protocol)");
  adv_cmd->add_option("--timeout-ms", timeout_ms, "per-reply timeout")->check(CLI::PositiveNumber);
  adv_cmd->add_flag("--unchecked", unchecked, "run the allocator outside its admissible class");
  adv_cmd->add_option("--metric", metric_text, "EF1, MMS, USW or USC");
  adv_cmd->add_option("--json", adv_json, "output path (stdout by default)");

  std::string search_name, search_eps = "1/10", search_metric, gate_text, tree_out, search_json;
  unsigned search_threads = 1;
  auto* search_cmd = app.add_subcommand("search", "certify a game value by exhaustive search");
  search_cmd->add_option("name", search_name, "adversary name")->required();
  search_cmd->add_option("--eps", search_eps, "epsilon");
  search_cmd->add_option("--metric", search_metric, "EF1, MMS, USW or USC");
  search_cmd->add_option("--gate", gate_text, "fairness gate, e.g. EF1>=1");
  search_cmd->add_option("--tree", tree_out, "write the explored tree as JSON");
  search_cmd->add_option("--threads", search_threads, "root fan-out threads")->check(CLI::PositiveNumber);
  search_cmd->add_option("--json", search_json, "output path (stdout by default)");

  std::string audit_instance, trace_path, audit_json, audit_csv;
  AuditFlags audit_flags;
  auto* audit_cmd = app.add_subcommand("audit", "re-audit a recorded decision trace");
  audit_cmd->add_option("-i,--instance", audit_instance, "JSONL instance file")->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("-d,--trace", trace_path, "decision trace")->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--json", audit_json, "JSON report path, - for stdout");
  audit_cmd->add_option("--csv", audit_csv, "CSV report path");
  audit_flags.attach(audit_cmd);

  auto* list_cmd = app.add_subcommand("list", "list builtin allocators and adversaries");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      return cmd_run(algorithm, instance_path, decisions_path, gen, count, threads, monotone, audit, json_out,
                     csv_out, timing);
    }
    if (*gen_cmd) return cmd_gen(gen_only, gen_out);
    if (*adv_cmd) return cmd_adversary(adv_name, eps_text, adv_algorithm, command, timeout_ms, unchecked, metric_text,
                                         adv_json);
    if (*search_cmd) {
      return cmd_search(search_name, search_eps, search_metric, gate_text, tree_out, search_threads, search_json);
    }
    if (*audit_cmd) return cmd_audit(audit_instance, trace_path, audit_flags, audit_json, audit_csv);
    if (*list_cmd) {
      std::cout << "allocators:";
      for (const auto& a : allocator_names()) std::cout << ' ' << a;
      std::cout << "\nadversaries:";
      for (const auto& a : builtin_adversary_names()) std::cout << ' ' << a;
      std::cout << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
