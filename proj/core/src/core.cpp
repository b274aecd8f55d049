#include "fairstream/core.hpp"

#include <charconv>

#include <algorithm>
#include <set>

namespace fairstream {

std::string_view to_string(Direction d) { return d == Direction::Goods ? "goods" : "chores"; }

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::Additive: return "additive";
    case Representation::Matroid: return "matroid";
    case Representation::SetFunction: return "setfunction";
  }
  return "?";
}

Direction parse_direction(std::string_view s) {
  if (s == "goods") return Direction::Goods;
  if (s == "chores") return Direction::Chores;
  throw ConfigError("unknown direction '" + std::string(s) + "'");
}

std::size_t Item::width() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, AdditiveRow>) return p.values.size();
        else if constexpr (std::is_same_v<P, CategoryRow>) return p.categories.size();
        else return p.extensions.size();
      },
      payload);
}

Representation representation_of(const Payload& p) {
  if (std::holds_alternative<AdditiveRow>(p)) return Representation::Additive;
  if (std::holds_alternative<CategoryRow>(p)) return Representation::Matroid;
  return Representation::SetFunction;
}

const Item& Stream::item(ItemId id) const {
  if (id < 1 || id > t()) throw UnknownItem("unknown item e" + std::to_string(id));
  return items[static_cast<std::size_t>(id - 1)];
}

void Stream::validate() const {
  if (n < 1) throw ConfigError("stream needs n >= 1");
  if (deadline != 0 && deadline != 1) throw ConfigError("deadline must be 0 or 1");
  for (std::size_t k = 0; k < items.size(); ++k) {
    const Item& it = items[k];
    if (it.id != static_cast<ItemId>(k + 1)) throw ConfigError("item ids must be consecutive from 1");
    if (representation_of(it.payload) != representation) throw ConfigError("mixed item representations");
    if (it.width() != static_cast<std::size_t>(n)) throw ConfigError("item row width differs from n");
    if (const auto* row = std::get_if<AdditiveRow>(&it.payload)) {
      for (const auto& v : row->values) {
        if (v < Rational(0)) throw ConfigError("negative item weight");
      }
    }
    if (const auto* row = std::get_if<SetFunctionRow>(&it.payload)) {
      if (k >= 63) throw ConfigError("set-function streams hold at most 63 items");
      for (const auto& ext : row->extensions) {
        for (const auto& [mask, v] : ext) {
          if (mask >> k) throw ConfigError("set-function row refers to a later item");
          if (v < Rational(0)) throw ConfigError("negative set value");
        }
      }
    }
  }
}

std::string Decision::str() const {
  switch (kind) {
    case Kind::Assign: return "assign(" + std::to_string(agent) + ")";
    case Kind::Discard: return "discard";
    case Kind::Hold: return "hold";
  }
  return "?";
}

Decision Decision::parse(std::string_view text) {
  if (text == "discard") return discard();
  if (text == "hold") return hold();
  std::string_view digits = text;
  if (text.starts_with("assign(") && text.ends_with(")")) digits = text.substr(7, text.size() - 8);
  int agent = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), agent);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || agent < 1) {
    throw ConfigError("bad decision '" + std::string(text) + "'");
  }
  return assign(agent);
}

Allocation Allocation::empty(Direction d, int n, int deadline) {
  if (n < 1) throw ConfigError("allocation needs n >= 1");
  Allocation a;
  a.direction = d;
  a.deadline = deadline;
  a.bundles.assign(static_cast<std::size_t>(n), {});
  return a;
}

std::optional<AgentId> Allocation::owner(ItemId id) const {
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (std::find(bundles[i].begin(), bundles[i].end(), id) != bundles[i].end()) {
      return static_cast<AgentId>(i + 1);
    }
  }
  return std::nullopt;
}

void Allocation::check_invariants() const {
  std::set<ItemId> seen;
  auto add = [&](ItemId id) {
    if (!seen.insert(id).second) throw std::logic_error("item e" + std::to_string(id) + " placed twice");
  };
  for (const auto& b : bundles) std::for_each(b.begin(), b.end(), add);
  std::for_each(discarded.begin(), discarded.end(), add);
  if (held) add(*held);
  if (static_cast<int>(seen.size()) != round) throw std::logic_error("conservation violated");
  if (!seen.empty() && (*seen.begin() != 1 || *seen.rbegin() != round)) {
    throw std::logic_error("allocation does not cover the arrived prefix");
  }
}

namespace {

void place(Allocation& alloc, ItemId id, const Decision& decision) {
  switch (decision.kind) {
    case Decision::Kind::Assign:
      if (decision.agent < 1 || decision.agent > alloc.n()) {
        throw IllegalDecision("assign to agent " + std::to_string(decision.agent) + " out of range");
      }
      alloc.bundles[static_cast<std::size_t>(decision.agent - 1)].push_back(id);
      break;
    case Decision::Kind::Discard:
      if (alloc.direction == Direction::Chores) throw IllegalDecision("chores cannot be discarded");
      alloc.discarded.push_back(id);
      break;
    case Decision::Kind::Hold:
      if (alloc.deadline != 1) throw IllegalDecision("hold requires a deadline-1 stream");
      if (alloc.held) throw IllegalDecision("hold with full buffer");
      alloc.held = id;
      break;
  }
}

}  // namespace

Allocation apply_decision(Allocation alloc, const Item& item, const Decision& decision) {
  if (item.id != alloc.round + 1) {
    throw IllegalDecision("item e" + std::to_string(item.id) + " is not the next arrival");
  }
  if (item.width() != static_cast<std::size_t>(alloc.n())) throw IllegalDecision("item row width differs from n");
  if (alloc.held) throw IllegalDecision("held item e" + std::to_string(*alloc.held) + " must be resolved first");
  place(alloc, item.id, decision);
  ++alloc.round;
  return alloc;
}

Allocation resolve_held(Allocation alloc, const Decision& decision) {
  if (!alloc.held) throw IllegalDecision("no held item to resolve");
  if (decision.kind == Decision::Kind::Hold) throw IllegalDecision("held item cannot be held again");
  ItemId id = *alloc.held;
  alloc.held.reset();
  place(alloc, id, decision);
  return alloc;
}

std::vector<ItemId> prefix_items(const Stream& stream, int k) {
  if (k < 0 || k > stream.t()) throw OutOfRange("prefix round " + std::to_string(k) + " out of range");
  std::vector<ItemId> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = i + 1;
  return out;
}

Stream prefix_stream(const Stream& stream, int k) {
  if (k < 0 || k > stream.t()) throw OutOfRange("prefix round " + std::to_string(k) + " out of range");
  Stream s = stream;
  s.items.resize(static_cast<std::size_t>(k));
  return s;
}

}  // namespace fairstream
