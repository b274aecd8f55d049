#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairstream/core.hpp"

namespace fairstream {

struct AdditiveTable {
  Direction direction = Direction::Goods;
  // weights[agent-1][item-1]
  std::vector<std::vector<Rational>> weights;
};

// rank(S) = number of distinct categories of S under the agent's labeling.
struct PartitionMatroidRank {
  // categories[agent-1][item-1]; -1 marks a loop
  std::vector<std::vector<int>> categories;
  std::vector<std::vector<std::string>> names;
};

// cost(S) = |S| - rank(S)
struct SupermodularComplementCost {
  PartitionMatroidRank inner;
};

struct ExplicitSetFunction {
  Direction direction = Direction::Goods;
  // rows[agent-1][item-1] maps subsets of earlier items to v(S + item)
  std::vector<std::vector<std::map<std::uint64_t, Rational>>> rows;
};

struct ValuationClass {
  enum class Kind { Binary, BiValued, TriValued, GeneralAdditive, SubmodularBinary, SupermodularBinary };
  Kind kind = Kind::GeneralAdditive;
  Rational a, b, z;

  static ValuationClass binary() { return {Kind::Binary, 0, 1, 0}; }
  static ValuationClass bivalued(Rational a, Rational b);
  static ValuationClass trivalued(Rational a, Rational b, Rational z);
  static ValuationClass general() { return {Kind::GeneralAdditive, 0, 0, 0}; }
  static ValuationClass submodular_binary() { return {Kind::SubmodularBinary, 0, 0, 0}; }
  static ValuationClass supermodular_binary() { return {Kind::SupermodularBinary, 0, 0, 0}; }

  // "binary", "bivalued(a,b)", "trivalued(a,b,z)", "additive", "submodular-binary", "supermodular-binary"
  std::string str() const;
  static ValuationClass parse(std::string_view text);
  // Whether an additive weight is one of the class's levels.
  bool admits(const Rational& w) const;
  friend bool operator==(const ValuationClass&, const ValuationClass&) = default;
};

class ValuationOracle {
 public:
  using Backing = std::variant<AdditiveTable, PartitionMatroidRank, SupermodularComplementCost, ExplicitSetFunction>;

  ValuationOracle() = default;
  explicit ValuationOracle(const Stream& stream);

  // Extends the ground set by one arriving item.
  void append(const Item& item);

  Direction direction() const { return direction_; }
  int n() const { return n_; }
  int t() const { return t_; }
  const Backing& backing() const { return backing_; }
  bool additive() const { return std::holds_alternative<AdditiveTable>(backing_); }
  bool matroid_backed() const {
    return std::holds_alternative<PartitionMatroidRank>(backing_) ||
           std::holds_alternative<SupermodularComplementCost>(backing_);
  }

  Rational value(AgentId agent, std::span<const ItemId> set) const;
  Rational marginal(AgentId agent, std::span<const ItemId> base, ItemId e) const;

  // Additive weight of a single item; throws for non-additive oracles.
  const Rational& weight(AgentId agent, ItemId e) const;
  // Category index of an item for an agent (-1 for a loop); matroid-backed only.
  int category(AgentId agent, ItemId e) const;
  int category_count(AgentId agent) const;

 private:
  void check(AgentId agent, ItemId e) const;

  Direction direction_ = Direction::Goods;
  int n_ = 0;
  int t_ = 0;
  Backing backing_;
};

Rational set_value(const ValuationOracle& oracle, AgentId agent, std::span<const ItemId> set);
Rational marginal(const ValuationOracle& oracle, AgentId agent, std::span<const ItemId> base, ItemId e);
ValuationClass classify(const ValuationOracle& oracle, AgentId agent);

// Each agent's additive weight sequence is entirely non-decreasing or non-increasing.
bool is_monotone(const ValuationOracle& oracle);

}  // namespace fairstream
