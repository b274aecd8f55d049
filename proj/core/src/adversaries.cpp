#include "fairstream/adversaries.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <future>
#include <map>
#include <sstream>

namespace fairstream {

namespace detail {
const std::map<std::string, std::string>& adversary_data();
}

using nlohmann::json;

std::string_view to_string(Constraint c) { return c == Constraint::NW ? "NW" : "Complete"; }

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::EF1: return "EF1";
    case Metric::MMS: return "MMS";
    case Metric::USW: return "USW";
    case Metric::USC: return "USC";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

Constraint parse_constraint(std::string_view s) {
  std::string u = upper(s);
  if (u == "NW") return Constraint::NW;
  if (u == "COMPLETE") return Constraint::Complete;
  throw ConfigError("unknown constraint '" + std::string(s) + "'");
}

Metric parse_metric(std::string_view s) {
  std::string u = upper(s);
  if (u == "EF1") return Metric::EF1;
  if (u == "MMS") return Metric::MMS;
  if (u == "USW") return Metric::USW;
  if (u == "USC") return Metric::USC;
  throw ConfigError("unknown metric '" + std::string(s) + "'");
}

namespace {

// expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
// factor := atom ('^' int)?; atom := number | eps | '(' expr ')'
class ExprParser {
 public:
  ExprParser(std::string_view text, const Rational& eps) : s_(text), eps_(eps) {}

  Rational run() {
    Rational v = expr();
    skip();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  [[noreturn]] void fail() const { throw ConfigError("bad expression '" + std::string(s_) + "'"); }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char ch) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }
  Rational expr() {
    Rational v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  Rational term() {
    Rational v = factor();
    for (;;) {
      if (eat('*')) v *= factor();
      else if (eat('/')) v /= factor();
      else return v;
    }
  }
  Rational factor() {
    Rational base = atom();
    if (!eat('^')) return base;
    skip();
    bool neg = eat('-');
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail();
    int k = std::stoi(std::string(s_.substr(start, pos_ - start)));
    Rational out(1);
    for (int i = 0; i < k; ++i) out *= base;
    return neg ? Rational(1) / out : out;
  }
  Rational atom() {
    skip();
    if (eat('(')) {
      Rational v = expr();
      if (!eat(')')) fail();
      return v;
    }
    if (s_.substr(pos_, 3) == "eps") {
      pos_ += 3;
      return eps_;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (start == pos_) fail();
    return Rational::parse(s_.substr(start, pos_ - start));
  }

  std::string_view s_;
  Rational eps_;
  std::size_t pos_ = 0;
};

ValuationClass parse_class_expr(const std::string& text, const Rational& eps) {
  auto open = text.find('(');
  if (open == std::string::npos) return ValuationClass::parse(text);
  std::string head = text.substr(0, open);
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::stringstream ss(inner);
  std::string part;
  std::string rebuilt = head + "(";
  bool first = true;
  while (std::getline(ss, part, ',')) {
    if (!first) rebuilt += ",";
    rebuilt += eval_expression(part, eps).str();
    first = false;
  }
  return ValuationClass::parse(rebuilt + ")");
}

Representation parse_representation(const std::string& s) {
  if (s == "additive") return Representation::Additive;
  if (s == "matroid") return Representation::Matroid;
  if (s == "setfunction") return Representation::SetFunction;
  throw ConfigError("unknown representation '" + s + "'");
}

std::string decision_key(const Decision& d, const std::vector<int>& perm) {
  switch (d.kind) {
    case Decision::Kind::Assign: return std::to_string(perm.at(static_cast<std::size_t>(d.agent - 1)));
    case Decision::Kind::Discard: return "discard";
    case Decision::Kind::Hold: return "hold";
  }
  return "";
}

std::uint64_t subset_mask(const std::string& key, ItemId before) {
  std::uint64_t mask = 0;
  if (key.empty()) return mask;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    int id = std::stoi(part);
    if (id < 1 || id >= before) throw ConfigError("set key '" + key + "' names a non-earlier item");
    mask |= std::uint64_t{1} << (id - 1);
  }
  return mask;
}

// Same revealed information for agents a and b (zero-based).
bool same_column(const Item& item, std::size_t a, std::size_t b) {
  if (const auto* r = std::get_if<AdditiveRow>(&item.payload)) return r->values[a] == r->values[b];
  if (const auto* r = std::get_if<CategoryRow>(&item.payload)) return r->categories[a] == r->categories[b];
  const auto& r = std::get<SetFunctionRow>(item.payload);
  return r.extensions[a] == r.extensions[b];
}

}  // namespace

Rational eval_expression(std::string_view text, const Rational& epsilon) { return ExprParser(text, epsilon).run(); }

ScriptedAdversary::ScriptedAdversary(std::string name, const json& doc, Rational epsilon)
    : name_(std::move(name)), doc_(doc), epsilon_(epsilon) {
  if (!(Rational(0) < epsilon && epsilon < Rational(1))) throw ConfigError("epsilon must lie in (0,1)");
  direction_ = parse_direction(doc_.at("direction").get<std::string>());
  n_ = doc_.at("n").get<int>();
  representation_ = parse_representation(doc_.value("representation", std::string("additive")));
  constraint_ = parse_constraint(doc_.value("constraint", std::string(direction_ == Direction::Goods ? "NW" : "Complete")));
  if (doc_.contains("classes")) {
    for (const auto& c : doc_["classes"]) classes_.push_back(parse_class_expr(c.get<std::string>(), epsilon_));
  }
  if (!doc_.contains("root")) throw ConfigError("adversary '" + name_ + "' has no root");
}

Payload ScriptedAdversary::payload(const json& node, const std::vector<int>& perm) const {
  auto n = static_cast<std::size_t>(n_);
  if (node.contains("values")) {
    const auto& v = node["values"];
    if (v.size() != n) throw ConfigError("adversary row width differs from n");
    AdditiveRow row;
    for (std::size_t a = 0; a < n; ++a) {
      row.values.push_back(eval_expression(v[static_cast<std::size_t>(perm[a] - 1)].get<std::string>(), epsilon_));
    }
    return row;
  }
  if (node.contains("categories")) {
    const auto& v = node["categories"];
    if (v.size() != n) throw ConfigError("adversary row width differs from n");
    CategoryRow row;
    for (std::size_t a = 0; a < n; ++a) {
      const auto& c = v[static_cast<std::size_t>(perm[a] - 1)];
      row.categories.push_back(c.is_null() ? Category{} : Category{c.get<std::string>()});
    }
    return row;
  }
  if (node.contains("sets")) {
    throw std::logic_error("set rows are built with the item id");
  }
  throw ConfigError("adversary node carries no item");
}

ScriptedAdversary::Cursor ScriptedAdversary::start() const {
  Cursor c;
  c.node = &doc_["root"];
  c.perm.resize(static_cast<std::size_t>(n_));
  for (int a = 0; a < n_; ++a) c.perm[static_cast<std::size_t>(a)] = a + 1;
  c.alloc = Allocation::empty(direction_, n_, 0);
  return c;
}

std::optional<Item> ScriptedAdversary::current(const Cursor& c) const {
  if (!c.node) return std::nullopt;
  Item item;
  item.id = static_cast<ItemId>(c.items.size()) + 1;
  if (c.node->contains("sets")) {
    std::map<std::uint64_t, Rational> ext;
    const auto& sets = (*c.node)["sets"];
    std::uint64_t subsets = std::uint64_t{1} << (item.id - 1);
    if (sets.contains("*")) {
      Rational v = eval_expression(sets["*"].get<std::string>(), epsilon_);
      for (std::uint64_t m = 0; m < subsets; ++m) ext[m] = v;
    }
    for (const auto& [k, v] : sets.items()) {
      if (k != "*") ext[subset_mask(k, item.id)] = eval_expression(v.get<std::string>(), epsilon_);
    }
    if (ext.size() != subsets) throw ConfigError("set node does not cover every earlier subset");
    item.payload = SetFunctionRow{std::vector<std::map<std::uint64_t, Rational>>(static_cast<std::size_t>(n_), ext)};
  } else {
    item.payload = payload(*c.node, c.perm);
  }
  return item;
}

ScriptedAdversary::Cursor ScriptedAdversary::advance(Cursor c, const Decision& d) const {
  auto item = current(c);
  if (!item) throw IllegalDecision("decision after the adversary stopped");
  const json* next = c.node->contains("next") ? &(*c.node)["next"] : nullptr;
  std::string key = decision_key(d, c.perm);
  const json* child = nullptr;
  if (next && next->contains(key)) {
    child = &(*next)[key];
  } else if (next && d.is_assign()) {
    auto a = static_cast<std::size_t>(d.agent - 1);
    for (int label = 1; label <= n_ && !child; ++label) {
      std::string k = std::to_string(label);
      if (!next->contains(k)) continue;
      auto b = static_cast<std::size_t>(std::find(c.perm.begin(), c.perm.end(), label) - c.perm.begin());
      if (b == a || !c.alloc.bundles[a].empty() || !c.alloc.bundles[b].empty()) continue;
      bool same = same_column(*item, a, b);
      for (const Item& past : c.items) same = same && same_column(past, a, b);
      if (!same) continue;
      std::swap(c.perm[a], c.perm[b]);
      child = &(*next)[k];
    }
  }
  c.alloc = apply_decision(std::move(c.alloc), *item, d);
  c.items.push_back(std::move(*item));
  c.node = child;
  return c;
}

std::optional<Item> ScriptedAdversary::next(const std::vector<Decision>& history) const {
  Cursor c = start();
  for (const Decision& d : history) c = advance(std::move(c), d);
  return current(c);
}

StreamAdversary::StreamAdversary(Stream stream, Constraint constraint, std::string name)
    : stream_(std::move(stream)), constraint_(constraint), name_(std::move(name)) {
  stream_.validate();
}

std::optional<Item> StreamAdversary::next(const std::vector<Decision>& history) const {
  auto k = static_cast<int>(history.size());
  if (k >= stream_.t()) return std::nullopt;
  return stream_.items[static_cast<std::size_t>(k)];
}

std::vector<std::string> builtin_adversary_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : detail::adversary_data()) out.push_back(k);
  return out;
}

std::unique_ptr<ScriptedAdversary> builtin_adversary(std::string_view name, Rational epsilon) {
  const auto& data = detail::adversary_data();
  auto it = data.find(std::string(name));
  if (it == data.end()) throw UnknownAdversary("unknown adversary '" + std::string(name) + "'");
  json doc = json::parse(it->second, nullptr, true, true);
  return std::make_unique<ScriptedAdversary>(std::string(name), doc, epsilon);
}

bool Gate::admits(const Ratio& value) const {
  if (op == ">=") return value >= bound;
  if (op == ">") return value > bound;
  if (op == "<=") return value <= bound;
  if (op == "<") return value < bound;
  throw ConfigError("unknown gate operator '" + op + "'");
}

std::string Gate::str() const { return std::string(to_string(metric)) + " " + op + " " + bound.str(); }

Ratio final_metric(Metric metric, const Allocation& alloc, const ValuationOracle& oracle, std::uint64_t budget) {
  switch (metric) {
    case Metric::EF1: return ef1_ratio(alloc, oracle);
    case Metric::MMS: return mms_ratio(alloc, oracle, budget);
    case Metric::USW:
    case Metric::USC: return welfare_ratio(alloc, oracle, budget);
  }
  throw std::logic_error("bad metric");
}

bool satisfies(Constraint constraint, const Allocation& alloc, const ValuationOracle& oracle) {
  return constraint == Constraint::NW ? check_nw(alloc, oracle) : check_complete(alloc);
}

namespace {

struct Outcome {
  bool feasible = false;
  Ratio value;
  std::vector<Decision> witness;
  Allocation alloc;
  std::uint64_t paths = 0;
  std::uint64_t legal = 0;
  json tree;
};

class Solver {
 public:
  Solver(const Adversary& adv, const GameQuery& q, const GameOptions& o)
      : adv_(adv), q_(q), o_(o), constraint_(q.constraint.value_or(adv.constraint())) {
    bool goods = adv.direction() == Direction::Goods;
    if ((q.metric == Metric::USW && !goods) || (q.metric == Metric::USC && goods)) {
      throw ConfigError(std::string(to_string(q.metric)) + " does not apply to " +
                        std::string(to_string(adv.direction())));
    }
    maximize_ = goods;
  }

  Outcome solve() {
    Stream s;
    s.direction = adv_.direction();
    s.n = adv_.n();
    s.representation = adv_.representation();
    ValuationOracle oracle(s);
    std::vector<Decision> path;
    return explore(path, Allocation::empty(s.direction, s.n, 0), oracle, o_.threads > 1);
  }

 private:
  std::vector<Decision> options() const {
    std::vector<Decision> out;
    for (AgentId a = 1; a <= adv_.n(); ++a) out.push_back(Decision::assign(a));
    if (adv_.direction() == Direction::Goods && constraint_ != Constraint::Complete) out.push_back(Decision::discard());
    return out;
  }

  bool better(const Ratio& a, const Ratio& b) const { return maximize_ ? a > b : a < b; }

  Outcome terminal(const std::vector<Decision>& path, const Allocation& alloc, const ValuationOracle& oracle) {
    Outcome out;
    out.paths = 1;
    if (++terminals_ > o_.budget) throw BudgetExceeded("game tree exceeds the enumeration budget");
    bool legal = satisfies(constraint_, alloc, oracle);
    json node;
    if (o_.record_tree) node["legal"] = legal;
    if (legal && q_.gate) {
      Ratio g = final_metric(q_.gate->metric, alloc, oracle, o_.budget);
      legal = q_.gate->admits(g);
      if (o_.record_tree) {
        node["gate_value"] = g.str();
        node["gate_ok"] = legal;
      }
    }
    if (legal) {
      out.feasible = true;
      out.legal = 1;
      out.value = final_metric(q_.metric, alloc, oracle, o_.budget);
      out.witness = path;
      out.alloc = alloc;
      if (o_.record_tree) node["value"] = out.value.str();
    }
    if (o_.record_tree) out.tree = std::move(node);
    return out;
  }

  void merge(Outcome& into, Outcome&& child, const Decision& d) {
    into.paths += child.paths;
    into.legal += child.legal;
    if (o_.record_tree) into.tree["decisions"].push_back({{"decision", d.str()}, {"outcome", std::move(child.tree)}});
    if (child.feasible && (!into.feasible || better(child.value, into.value))) {
      into.feasible = true;
      into.value = child.value;
      into.witness = std::move(child.witness);
      into.alloc = std::move(child.alloc);
    }
  }

  Outcome explore(std::vector<Decision>& path, const Allocation& alloc, const ValuationOracle& oracle, bool fan_out) {
    auto item = adv_.next(path);
    if (!item) return terminal(path, alloc, oracle);
    ValuationOracle grown = oracle;
    grown.append(*item);
    Outcome out;
    if (o_.record_tree) {
      json row = json::array();
      if (const auto* r = std::get_if<AdditiveRow>(&item->payload)) {
        for (const auto& v : r->values) row.push_back(v.str());
      } else if (const auto* r = std::get_if<CategoryRow>(&item->payload)) {
        for (const auto& c : r->categories) row.push_back(c ? json(*c) : json(nullptr));
      }
      out.tree = {{"round", item->id}, {"item", row}, {"decisions", json::array()}};
    }
    auto opts = options();
    if (fan_out) {
      std::vector<std::future<Outcome>> futures;
      for (const Decision& d : opts) {
        futures.push_back(std::async(std::launch::async, [this, path, &alloc, &grown, &item, d]() mutable {
          path.push_back(d);
          return explore(path, apply_decision(alloc, *item, d), grown, false);
        }));
      }
      for (std::size_t k = 0; k < opts.size(); ++k) merge(out, futures[k].get(), opts[k]);
      return out;
    }
    for (const Decision& d : opts) {
      path.push_back(d);
      Outcome child = explore(path, apply_decision(alloc, *item, d), grown, false);
      path.pop_back();
      merge(out, std::move(child), d);
    }
    return out;
  }

  const Adversary& adv_;
  GameQuery q_;
  GameOptions o_;
  Constraint constraint_;
  bool maximize_ = true;
  std::atomic<std::uint64_t> terminals_{0};
};

}  // namespace

GameValue solve_game(const Adversary& adversary, const GameQuery& query, const GameOptions& options) {
  Outcome o = Solver(adversary, query, options).solve();
  GameValue g;
  g.metric = query.metric;
  g.feasible = o.feasible;
  g.value = o.value;
  g.witness = std::move(o.witness);
  g.final_allocation = std::move(o.alloc);
  g.paths = o.paths;
  g.legal_paths = o.legal;
  g.tree = std::move(o.tree);
  return g;
}

GameValue game_value_at_epsilon(std::string_view name, Metric metric, Rational epsilon, const GameOptions& options) {
  auto adv = builtin_adversary(name, epsilon);
  GameQuery q;
  q.metric = metric;
  const auto& doc = adv->document();
  if (doc.contains("queries")) {
    for (const auto& entry : doc["queries"]) {
      if (parse_metric(entry.at("metric").get<std::string>()) != metric || !entry.contains("gate")) continue;
      const auto& g = entry["gate"];
      q.gate = Gate{parse_metric(g.at("metric").get<std::string>()), g.at("op").get<std::string>(),
                    Ratio::parse(g.at("bound").get<std::string>())};
    }
  }
  return solve_game(*adv, q, options);
}

Playthrough replay(const Adversary& adversary, const std::vector<Decision>& decisions) {
  Playthrough p;
  p.stream.direction = adversary.direction();
  p.stream.n = adversary.n();
  p.stream.representation = adversary.representation();
  p.allocation = Allocation::empty(p.stream.direction, p.stream.n, 0);
  std::vector<Decision> history;
  for (const Decision& d : decisions) {
    auto item = adversary.next(history);
    if (!item) throw IllegalDecision("decision after the adversary stopped");
    p.allocation = apply_decision(std::move(p.allocation), *item, d);
    p.stream.items.push_back(std::move(*item));
    history.push_back(d);
  }
  return p;
}

json to_json(const GameValue& g) {
  json out;
  out["metric"] = to_string(g.metric);
  out["feasible"] = g.feasible;
  out["value"] = g.feasible ? json(g.value.str()) : json(nullptr);
  json w = json::array();
  for (const Decision& d : g.witness) w.push_back(d.str());
  out["witness"] = w;
  out["paths"] = g.paths;
  out["legal_paths"] = g.legal_paths;
  if (g.feasible) {
    json bundles = json::array();
    for (const auto& b : g.final_allocation.bundles) bundles.push_back(b);
    out["final"] = {{"bundles", bundles}, {"discarded", g.final_allocation.discarded}};
  }
  if (!g.tree.is_null()) out["tree"] = g.tree;
  return out;
}

}  // namespace fairstream
