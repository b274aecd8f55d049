#include "fairstream/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace fairstream {

using nlohmann::json;

namespace {

Rational rational_from_json(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw ConfigError("expected a rational, got " + j.dump());
}

std::string mask_key(std::uint64_t mask) {
  std::string out;
  for (int bit = 0; bit < 64; ++bit) {
    if (!(mask >> bit & 1U)) continue;
    if (!out.empty()) out += ",";
    out += std::to_string(bit + 1);
  }
  return out;
}

std::uint64_t key_mask(const std::string& key) {
  std::uint64_t mask = 0;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    int id = std::stoi(part);
    if (id < 1 || id > 63) throw ConfigError("bad subset key '" + key + "'");
    mask |= std::uint64_t{1} << (id - 1);
  }
  return mask;
}

Representation representation_from(const std::string& s) {
  if (s == "additive") return Representation::Additive;
  if (s == "matroid") return Representation::Matroid;
  if (s == "setfunction") return Representation::SetFunction;
  throw ConfigError("unknown representation '" + s + "'");
}

}  // namespace

json item_to_json(const Item& item) {
  json j;
  if (const auto* r = std::get_if<AdditiveRow>(&item.payload)) {
    j["values"] = json::array();
    for (const auto& v : r->values) j["values"].push_back(v.str());
  } else if (const auto* c = std::get_if<CategoryRow>(&item.payload)) {
    j["categories"] = json::array();
    for (const auto& cat : c->categories) j["categories"].push_back(cat ? json(*cat) : json(nullptr));
  } else {
    const auto& s = std::get<SetFunctionRow>(item.payload);
    j["sets"] = json::array();
    for (const auto& ext : s.extensions) {
      json m = json::object();
      for (const auto& [mask, v] : ext) m[mask_key(mask)] = v.str();
      j["sets"].push_back(m);
    }
  }
  return j;
}

Item item_from_json(const json& j, ItemId id, int n) {
  if (!j.is_object()) throw ConfigError("item line must be an object");
  if (j.contains("id") && j["id"].get<int>() != id) throw ConfigError("item ids must be consecutive from 1");
  Item item;
  item.id = id;
  if (j.contains("values")) {
    AdditiveRow row;
    for (const auto& v : j["values"]) row.values.push_back(rational_from_json(v));
    item.payload = std::move(row);
  } else if (j.contains("categories")) {
    CategoryRow row;
    for (const auto& c : j["categories"]) {
      if (c.is_null()) row.categories.emplace_back();
      else row.categories.emplace_back(c.is_string() ? c.get<std::string>() : c.dump());
    }
    item.payload = std::move(row);
  } else if (j.contains("sets")) {
    SetFunctionRow row;
    for (const auto& agent : j["sets"]) {
      std::map<std::uint64_t, Rational> ext;
      for (const auto& [k, v] : agent.items()) ext[key_mask(k)] = rational_from_json(v);
      row.extensions.push_back(std::move(ext));
    }
    item.payload = std::move(row);
  } else {
    throw ConfigError("item line carries no values, categories, or sets");
  }
  if (item.width() != static_cast<std::size_t>(n)) throw ConfigError("item row width differs from n");
  return item;
}

Instance read_instance(std::istream& in) {
  Instance inst;
  std::string line;
  bool have_header = false;
  std::optional<std::string> rep;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("bad instance line: ") + e.what());
    }
    if (!have_header) {
      inst.stream.direction = parse_direction(j.at("direction").get<std::string>());
      inst.stream.n = j.at("n").get<int>();
      inst.stream.deadline = j.value("deadline", 0);
      if (j.contains("representation")) rep = j["representation"].get<std::string>();
      if (j.contains("classes")) {
        for (const auto& c : j["classes"]) inst.classes.push_back(ValuationClass::parse(c.get<std::string>()));
      }
      have_header = true;
      continue;
    }
    Item item = item_from_json(j, inst.stream.t() + 1, inst.stream.n);
    if (!rep && inst.stream.items.empty()) inst.stream.representation = representation_of(item.payload);
    inst.stream.items.push_back(std::move(item));
  }
  if (!have_header) {
    // An empty file is an empty two-agent goods stream.
    inst.stream.n = 2;
    return inst;
  }
  if (rep) inst.stream.representation = representation_from(*rep);
  if (!inst.classes.empty() && static_cast<int>(inst.classes.size()) != inst.stream.n) {
    throw ConfigError("header lists a class count different from n");
  }
  inst.stream.validate();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_instance(in);
}

void write_instance(std::ostream& out, const Instance& instance) {
  const Stream& s = instance.stream;
  json header = {{"direction", to_string(s.direction)},
                 {"n", s.n},
                 {"representation", to_string(s.representation)},
                 {"deadline", s.deadline}};
  if (!instance.classes.empty()) {
    header["classes"] = json::array();
    for (const auto& c : instance.classes) header["classes"].push_back(c.str());
  }
  out << header.dump() << '\n';
  for (const Item& item : s.items) out << item_to_json(item).dump() << '\n';
}

void save_instance(const std::string& path, const Instance& instance) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_instance(out, instance);
}

std::vector<ValuationClass> infer_classes(const Stream& stream) {
  std::vector<ValuationClass> out;
  switch (stream.representation) {
    case Representation::Matroid:
      out.assign(static_cast<std::size_t>(stream.n), stream.direction == Direction::Goods
                                                         ? ValuationClass::submodular_binary()
                                                         : ValuationClass::supermodular_binary());
      return out;
    case Representation::SetFunction:
      out.assign(static_cast<std::size_t>(stream.n), ValuationClass::general());
      return out;
    case Representation::Additive: break;
  }
  ValuationOracle oracle(stream);
  for (AgentId i = 1; i <= stream.n; ++i) out.push_back(classify(oracle, i));
  return out;
}

Instance generate(const GenSpec& spec) {
  if (spec.n < 1 || spec.t < 0) throw ConfigError("generator needs n >= 1 and t >= 0");
  std::mt19937_64 rng(spec.seed);
  Instance inst;
  Stream& s = inst.stream;
  s.n = spec.n;
  s.deadline = spec.deadline;
  s.direction = spec.direction;
  auto n = static_cast<std::size_t>(spec.n);

  if (spec.klass == "partition-matroid" || spec.klass == "supermod-complement") {
    if (spec.categories < 1) throw ConfigError("matroid generator needs at least one category");
    s.direction = spec.klass == "partition-matroid" ? Direction::Goods : Direction::Chores;
    s.representation = Representation::Matroid;
    std::uniform_int_distribution<int> cat(0, spec.categories - 1);
    std::bernoulli_distribution loop(std::clamp(spec.loop_rate, 0.0, 1.0));
    for (int k = 1; k <= spec.t; ++k) {
      CategoryRow row;
      for (std::size_t i = 0; i < n; ++i) {
        bool is_loop = loop(rng);
        int c = cat(rng);
        row.categories.push_back(is_loop ? Category{} : Category{"c" + std::to_string(c)});
      }
      s.items.push_back({k, row});
    }
    inst.classes = infer_classes(s);
    return inst;
  }

  s.representation = Representation::Additive;
  if (spec.klass == "monotone") {
    std::uniform_int_distribution<int> w(0, spec.max_weight);
    std::vector<std::vector<Rational>> cols(n);
    for (auto& col : cols) {
      for (int k = 0; k < spec.t; ++k) col.emplace_back(w(rng));
    }
    bool ascending = std::bernoulli_distribution(0.5)(rng);
    for (auto& col : cols) {
      if (ascending) std::sort(col.begin(), col.end());
      else std::sort(col.begin(), col.end(), std::greater<>());
    }
    for (int k = 0; k < spec.t; ++k) {
      AdditiveRow row;
      for (std::size_t i = 0; i < n; ++i) row.values.push_back(cols[i][static_cast<std::size_t>(k)]);
      s.items.push_back({k + 1, row});
    }
    inst.classes.assign(n, ValuationClass::general());
    return inst;
  }

  std::vector<ValuationClass> classes;
  if (!spec.agent_classes.empty()) {
    if (spec.agent_classes.size() != n) throw ConfigError("agent_classes needs one entry per agent");
    for (const auto& c : spec.agent_classes) classes.push_back(ValuationClass::parse(c));
  } else {
    classes.assign(n, ValuationClass::parse(spec.klass));
  }
  std::vector<std::vector<Rational>> levels;
  for (const auto& c : classes) {
    switch (c.kind) {
      case ValuationClass::Kind::Binary: levels.push_back({0, 1}); break;
      case ValuationClass::Kind::BiValued: levels.push_back({c.a, c.b}); break;
      case ValuationClass::Kind::TriValued: levels.push_back({c.a, c.b, c.z}); break;
      default: throw ConfigError("generator cannot draw from class '" + c.str() + "'");
    }
  }
  for (int k = 1; k <= spec.t; ++k) {
    AdditiveRow row;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& lv = levels[i];
      std::uniform_int_distribution<std::size_t> pick(0, lv.size() - 1);
      row.values.push_back(lv[pick(rng)]);
    }
    if (spec.identical_binary) {
      for (std::size_t i = 1; i + 1 < n; ++i) row.values[i] = row.values[0];
    }
    s.items.push_back({k, row});
  }
  inst.classes = classes;
  return inst;
}

std::string Bound::str() const { return std::string(to_string(metric)) + op + value.str(); }

Bound parse_bound(std::string_view text) {
  for (std::string_view op : {">=", "<=", ">", "<"}) {
    auto pos = text.find(op);
    if (pos == std::string_view::npos) continue;
    Bound b;
    b.metric = parse_metric(text.substr(0, pos));
    b.op = std::string(op);
    b.value = Ratio::parse(text.substr(pos + op.size()));
    return b;
  }
  throw ConfigError("bad bound '" + std::string(text) + "'");
}

namespace {

class Recorder {
 public:
  Recorder(RunReport& report, const AuditOptions& options) : report_(report), options_(options) {}

  void record(const Allocation& alloc, const ValuationOracle& oracle, std::optional<ControllerMode> mode,
              std::vector<Decision> decisions) {
    RoundRecord r;
    r.metrics = audit_round(alloc, oracle, options_, &counter_);
    r.mode = mode;
    r.decisions = std::move(decisions);
    report_.rounds.push_back(std::move(r));
  }

  void finish(const Allocation& alloc, const std::vector<Bound>& bounds) {
    bool goods = report_.direction == Direction::Goods;
    auto fold = [&](std::optional<Ratio>& acc, const std::optional<Ratio>& v) {
      if (!v) return;
      if (!acc) acc = v;
      else acc = goods ? min(*acc, *v) : max(*acc, *v);
    };
    for (const auto& r : report_.rounds) {
      fold(report_.summary.ef1, r.metrics.ef1);
      fold(report_.summary.mms, r.metrics.mms);
      fold(report_.summary.welfare, r.metrics.welfare);
      if (!r.metrics.mms && options_.mms) ++report_.skipped_mms;
      if (!r.metrics.welfare && options_.welfare) ++report_.skipped_welfare;
      if (r.metrics.nw_ok == false || r.metrics.complete_ok == false) ++report_.constraint_violations;
    }
    if (!report_.rounds.empty()) {
      const auto& last = report_.rounds.back().metrics;
      report_.final = {last.ef1, last.mms, last.welfare};
    }
    for (const Bound& b : bounds) {
      std::optional<Ratio> v;
      switch (b.metric) {
        case Metric::EF1: v = report_.summary.ef1; break;
        case Metric::MMS: v = report_.summary.mms; break;
        case Metric::USW:
        case Metric::USC: v = report_.summary.welfare; break;
      }
      if (!v) continue;
      Gate g{b.metric, b.op, b.value};
      if (!g.admits(*v)) report_.failed_bounds.push_back(b.str() + " (got " + v->str() + ")");
    }
    report_.allocation = alloc;
    report_.enumeration_nodes = counter_.nodes;
  }

 private:
  RunReport& report_;
  AuditOptions options_;
  EnumerationCounter counter_;
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

RunReport replay_decisions(const Instance& instance, const std::vector<Decision>& decisions, const RunConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  const Stream& s = instance.stream;
  RunReport report;
  report.algorithm = config.algorithm.empty() ? "replay" : config.algorithm;
  report.direction = s.direction;
  report.n = s.n;
  report.t = s.t();
  Recorder rec(report, config.audit);
  Stream empty = s;
  empty.items.clear();
  ValuationOracle oracle(empty);
  Allocation alloc = Allocation::empty(s);
  std::size_t next = 0;
  auto take = [&]() {
    if (next >= decisions.size()) throw ConfigError("decision trace is shorter than the stream");
    return decisions[next++];
  };
  for (const Item& item : s.items) {
    oracle.append(item);
    std::vector<Decision> used;
    if (alloc.held) {
      used.push_back(take());
      alloc = resolve_held(std::move(alloc), used.back());
    }
    used.push_back(take());
    alloc = apply_decision(std::move(alloc), item, used.back());
    if (!alloc.held) rec.record(alloc, oracle, std::nullopt, std::move(used));
  }
  if (alloc.held) {
    Decision d = take();
    alloc = resolve_held(std::move(alloc), d);
    rec.record(alloc, oracle, std::nullopt, {d});
  }
  if (next != decisions.size()) throw ConfigError("decision trace is longer than the stream");
  rec.finish(alloc, config.bounds);
  report.wall_ms = elapsed_ms(t0);
  return report;
}

}  // namespace

RunReport run_with(const Instance& instance, Allocator& allocator, const RunConfig& config) {
  if (config.decisions) return replay_decisions(instance, *config.decisions, config);
  auto t0 = std::chrono::steady_clock::now();
  const Stream& s = instance.stream;
  std::vector<ValuationClass> classes = instance.classes.empty() ? infer_classes(s) : instance.classes;
  Session session(s.direction, s.n, s.deadline, s.representation, allocator, classes, config.params);
  RunReport report;
  report.algorithm = std::string(allocator.name());
  report.direction = s.direction;
  report.n = s.n;
  report.t = s.t();
  Recorder rec(report, config.audit);
  for (const Item& item : s.items) {
    Action a = session.offer(item);
    std::vector<Decision> used;
    if (a.held) used.push_back(*a.held);
    used.push_back(a.current);
    if (!session.allocation().held) rec.record(session.allocation(), session.oracle(), allocator.mode(), used);
  }
  auto held = session.allocation().held;
  if (session.finish()) {
    Decision d = Decision::assign(*session.allocation().owner(*held));
    rec.record(session.allocation(), session.oracle(), allocator.mode(), {d});
  }
  rec.finish(session.allocation(), config.bounds);
  report.transitions = allocator.transitions();
  report.wall_ms = elapsed_ms(t0);
  return report;
}

RunReport run(const Instance& instance, const RunConfig& config) {
  if (config.decisions) return replay_decisions(instance, *config.decisions, config);
  auto allocator = make_allocator(config.algorithm);
  return run_with(instance, *allocator, config);
}

RunReport audit_trace(const Instance& instance, const std::vector<Decision>& decisions, const RunConfig& config) {
  return replay_decisions(instance, decisions, config);
}

std::vector<RunReport> run_batch(const std::vector<Instance>& instances, const RunConfig& config, unsigned threads) {
  std::vector<RunReport> out(instances.size());
  std::vector<std::exception_ptr> errors(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < instances.size(); k = next++) {
      try {
        out[k] = run(instances[k], config);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, instances.size()))));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace {

json opt_ratio(const std::optional<Ratio>& r) { return r ? json(r->str()) : json(nullptr); }

json summary_json(const Summary& s) {
  return {{"ef1", opt_ratio(s.ef1)}, {"mms", opt_ratio(s.mms)}, {"welfare", opt_ratio(s.welfare)}};
}

std::string csv_cell(const std::optional<Ratio>& r) { return r ? r->str() : "skipped"; }

std::string flag(const std::optional<bool>& b) {
  if (!b) return "";
  return *b ? "true" : "false";
}

}  // namespace

json to_json(const RunReport& r, bool timing) {
  json out;
  out["algorithm"] = r.algorithm;
  out["direction"] = to_string(r.direction);
  out["n"] = r.n;
  out["t"] = r.t;
  json rounds = json::array();
  for (const auto& rec : r.rounds) {
    const auto& m = rec.metrics;
    json row = {{"round", m.round},
                {"ef1", m.ef1.str()},
                {"ef1_raw", m.ef1_raw.str()},
                {"mms", opt_ratio(m.mms)},
                {"mms_raw", opt_ratio(m.mms_raw)},
                {"welfare", opt_ratio(m.welfare)},
                {"welfare_value", m.welfare_value.str()},
                {"welfare_optimum", m.welfare_optimum ? json(m.welfare_optimum->str()) : json(nullptr)}};
    if (m.nw_ok) row["nw"] = *m.nw_ok;
    if (m.complete_ok) row["complete"] = *m.complete_ok;
    if (rec.mode) row["mode"] = to_string(*rec.mode);
    json ds = json::array();
    for (const auto& d : rec.decisions) ds.push_back(d.str());
    row["decisions"] = ds;
    rounds.push_back(row);
  }
  out["rounds"] = rounds;
  out["summary"] = summary_json(r.summary);
  out["final"] = summary_json(r.final);
  out["constraint_violations"] = r.constraint_violations;
  out["skipped"] = {{"mms", r.skipped_mms}, {"welfare", r.skipped_welfare}};
  out["failed_bounds"] = r.failed_bounds;
  out["passed"] = r.passed();
  json transitions = json::array();
  for (const auto& t : r.transitions) {
    transitions.push_back({{"item", t.item}, {"from", to_string(t.from)}, {"to", to_string(t.to)}, {"i", t.i}, {"j", t.j}});
  }
  out["transitions"] = transitions;
  json bundles = json::array();
  for (const auto& b : r.allocation.bundles) bundles.push_back(b);
  out["allocation"] = {{"bundles", bundles}, {"discarded", r.allocation.discarded}};
  out["enumeration_nodes"] = r.enumeration_nodes;
  if (timing) out["wall_ms"] = r.wall_ms;
  return out;
}

std::string to_csv(const RunReport& r) {
  std::ostringstream out;
  out << "round,ef1,ef1_raw,mms,mms_raw,welfare,welfare_value,welfare_optimum,nw,complete,mode\n";
  for (const auto& rec : r.rounds) {
    const auto& m = rec.metrics;
    out << m.round << ',' << m.ef1.str() << ',' << m.ef1_raw.str() << ',' << csv_cell(m.mms) << ','
        << csv_cell(m.mms_raw) << ',' << csv_cell(m.welfare) << ',' << m.welfare_value.str() << ','
        << (m.welfare_optimum ? m.welfare_optimum->str() : "skipped") << ',' << flag(m.nw_ok) << ','
        << flag(m.complete_ok) << ',' << (rec.mode ? std::string(to_string(*rec.mode)) : "") << '\n';
  }
  return out.str();
}

AdversaryRun play(const Adversary& adversary, Allocator& allocator, const AllocatorParams& params,
                  const AuditOptions& audit) {
  auto t0 = std::chrono::steady_clock::now();
  AdversaryRun out;
  out.stream.direction = adversary.direction();
  out.stream.n = adversary.n();
  out.stream.representation = adversary.representation();
  std::vector<ValuationClass> classes = adversary.classes();
  if (classes.empty()) classes = infer_classes(out.stream);
  Session session(adversary.direction(), adversary.n(), 0, adversary.representation(), allocator, classes, params);
  RunReport& report = out.report;
  report.algorithm = std::string(allocator.name());
  report.direction = adversary.direction();
  report.n = adversary.n();
  Recorder rec(report, audit);
  while (auto item = adversary.next(out.decisions)) {
    Action a = session.offer(*item);
    out.decisions.push_back(a.current);
    out.stream.items.push_back(std::move(*item));
    rec.record(session.allocation(), session.oracle(), allocator.mode(), {a.current});
  }
  report.t = out.stream.t();
  rec.finish(session.allocation(), {});
  report.transitions = allocator.transitions();
  report.wall_ms = elapsed_ms(t0);
  return out;
}

}  // namespace fairstream
