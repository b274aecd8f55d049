#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairstream/errors.hpp"
#include "fairstream/rational.hpp"

namespace fairstream {

// Items are arrival ordinals 1..t, agents are 1..n.
using ItemId = int;
using AgentId = int;

enum class Direction { Goods, Chores };
enum class Representation { Additive, Matroid, SetFunction };

std::string_view to_string(Direction d);
std::string_view to_string(Representation r);
Direction parse_direction(std::string_view s);

struct AdditiveRow {
  std::vector<Rational> values;
  friend bool operator==(const AdditiveRow&, const AdditiveRow&) = default;
};

// Per-agent category label; nullopt marks an item worthless to that agent
// (a loop of the agent's partition matroid).
using Category = std::optional<std::string>;

struct CategoryRow {
  std::vector<Category> categories;
  friend bool operator==(const CategoryRow&, const CategoryRow&) = default;
};

// S + {this item} for every subset S of earlier items (bit k-1 = item k).
// Values must be monotone in S; share searches rely on it.
struct SetFunctionRow {
  std::vector<std::map<std::uint64_t, Rational>> extensions;
  friend bool operator==(const SetFunctionRow&, const SetFunctionRow&) = default;
};

using Payload = std::variant<AdditiveRow, CategoryRow, SetFunctionRow>;

struct Item {
  ItemId id = 0;
  Payload payload;

  std::size_t width() const;
  friend bool operator==(const Item&, const Item&) = default;
};

struct Stream {
  Direction direction = Direction::Goods;
  int n = 1;
  std::vector<Item> items;
  Representation representation = Representation::Additive;
  int deadline = 0;

  int t() const { return static_cast<int>(items.size()); }
  const Item& item(ItemId id) const;
  // Throws if any invariant of the stream is broken.
  void validate() const;
  friend bool operator==(const Stream&, const Stream&) = default;
};

Representation representation_of(const Payload& p);

struct Decision {
  enum class Kind { Assign, Discard, Hold };
  Kind kind = Kind::Discard;
  AgentId agent = 0;

  static Decision assign(AgentId a) { return {Kind::Assign, a}; }
  static Decision discard() { return {Kind::Discard, 0}; }
  static Decision hold() { return {Kind::Hold, 0}; }

  bool is_assign() const { return kind == Kind::Assign; }
  std::string str() const;
  // Accepts "assign(i)", "i", "discard", "hold".
  static Decision parse(std::string_view text);
  friend bool operator==(const Decision&, const Decision&) = default;
};

struct Allocation {
  Direction direction = Direction::Goods;
  int deadline = 0;
  std::vector<std::vector<ItemId>> bundles;
  std::vector<ItemId> discarded;
  std::optional<ItemId> held;
  int round = 0;

  static Allocation empty(Direction d, int n, int deadline = 0);
  static Allocation empty(const Stream& s) { return empty(s.direction, s.n, s.deadline); }

  int n() const { return static_cast<int>(bundles.size()); }
  const std::vector<ItemId>& bundle(AgentId a) const { return bundles.at(static_cast<std::size_t>(a - 1)); }
  std::optional<AgentId> owner(ItemId id) const;
  void check_invariants() const;
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

Allocation apply_decision(Allocation alloc, const Item& item, const Decision& decision);
// Resolves a buffered item (deadline streams). Hold is not a valid resolution.
Allocation resolve_held(Allocation alloc, const Decision& decision);

std::vector<ItemId> prefix_items(const Stream& stream, int k);
Stream prefix_stream(const Stream& stream, int k);

}  // namespace fairstream
