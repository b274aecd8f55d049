#include "fairstream/valuations.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace fairstream {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

std::size_t idx(int one_based) { return static_cast<std::size_t>(one_based - 1); }

int distinct_categories(const std::vector<int>& cats, std::span<const ItemId> set, int universe) {
  if (set.size() <= 16) {
    int out = 0;
    for (std::size_t a = 0; a < set.size(); ++a) {
      int c = cats[idx(set[a])];
      if (c < 0) continue;
      bool fresh = true;
      for (std::size_t b = 0; b < a && fresh; ++b) fresh = cats[idx(set[b])] != c;
      out += fresh ? 1 : 0;
    }
    return out;
  }
  std::vector<char> seen(static_cast<std::size_t>(universe), 0);
  int out = 0;
  for (ItemId e : set) {
    int c = cats[idx(e)];
    if (c >= 0 && !seen[static_cast<std::size_t>(c)]) {
      seen[static_cast<std::size_t>(c)] = 1;
      ++out;
    }
  }
  return out;
}

}  // namespace

ValuationClass ValuationClass::bivalued(Rational a, Rational b) {
  if (!(Rational(0) < a && a <= b)) throw ConfigError("bi-valued class needs 0 < a <= b");
  return {Kind::BiValued, a, b, 0};
}

ValuationClass ValuationClass::trivalued(Rational a, Rational b, Rational z) {
  if (!(Rational(0) < a && a <= b && b <= z)) throw ConfigError("tri-valued class needs 0 < a <= b <= z");
  return {Kind::TriValued, a, b, z};
}

std::string ValuationClass::str() const {
  switch (kind) {
    case Kind::Binary: return "binary";
    case Kind::BiValued: return "bivalued(" + a.str() + "," + b.str() + ")";
    case Kind::TriValued: return "trivalued(" + a.str() + "," + b.str() + "," + z.str() + ")";
    case Kind::GeneralAdditive: return "additive";
    case Kind::SubmodularBinary: return "submodular-binary";
    case Kind::SupermodularBinary: return "supermodular-binary";
  }
  return "?";
}

ValuationClass ValuationClass::parse(std::string_view text) {
  auto open = text.find('(');
  std::string_view head = text.substr(0, open);
  std::vector<Rational> args;
  if (open != std::string_view::npos) {
    if (text.back() != ')') throw ConfigError("bad class '" + std::string(text) + "'");
    std::string inner(text.substr(open + 1, text.size() - open - 2));
    std::stringstream ss(inner);
    std::string part;
    while (std::getline(ss, part, ',')) args.push_back(Rational::parse(part));
  }
  auto want = [&](std::size_t k) {
    if (args.size() != k) throw ConfigError("class '" + std::string(head) + "' takes " + std::to_string(k) + " levels");
  };
  if (head == "binary") return want(0), binary();
  if (head == "bivalued") return want(2), bivalued(args[0], args[1]);
  if (head == "trivalued") return want(3), trivalued(args[0], args[1], args[2]);
  if (head == "additive") return want(0), general();
  if (head == "submodular-binary") return want(0), submodular_binary();
  if (head == "supermodular-binary") return want(0), supermodular_binary();
  throw ConfigError("unknown valuation class '" + std::string(text) + "'");
}

bool ValuationClass::admits(const Rational& w) const {
  switch (kind) {
    case Kind::Binary: return w == Rational(0) || w == Rational(1);
    case Kind::BiValued: return w == a || w == b;
    case Kind::TriValued: return w == a || w == b || w == z;
    case Kind::GeneralAdditive: return w >= Rational(0);
    default: return false;
  }
}

ValuationOracle::ValuationOracle(const Stream& stream) : direction_(stream.direction), n_(stream.n) {
  switch (stream.representation) {
    case Representation::Additive:
      backing_ = AdditiveTable{stream.direction, std::vector<std::vector<Rational>>(idx(n_ + 1))};
      break;
    case Representation::Matroid: {
      PartitionMatroidRank rank{std::vector<std::vector<int>>(idx(n_ + 1)),
                                std::vector<std::vector<std::string>>(idx(n_ + 1))};
      if (stream.direction == Direction::Goods) backing_ = std::move(rank);
      else backing_ = SupermodularComplementCost{std::move(rank)};
      break;
    }
    case Representation::SetFunction:
      backing_ = ExplicitSetFunction{stream.direction,
                                     std::vector<std::vector<std::map<std::uint64_t, Rational>>>(idx(n_ + 1))};
      break;
  }
  for (const Item& it : stream.items) append(it);
}

void ValuationOracle::append(const Item& item) {
  if (item.id != t_ + 1) throw UnknownItem("oracle expects item e" + std::to_string(t_ + 1));
  if (item.width() != static_cast<std::size_t>(n_)) throw ConfigError("item row width differs from n");
  auto add_categories = [&](PartitionMatroidRank& rank) {
    const auto* row = std::get_if<CategoryRow>(&item.payload);
    if (!row) throw ConfigError("matroid oracle needs category rows");
    for (std::size_t i = 0; i < row->categories.size(); ++i) {
      const Category& c = row->categories[i];
      int id = -1;
      if (c) {
        auto& names = rank.names[i];
        auto it = std::find(names.begin(), names.end(), *c);
        id = static_cast<int>(it - names.begin());
        if (it == names.end()) names.push_back(*c);
      }
      rank.categories[i].push_back(id);
    }
  };
  std::visit(overloaded{
                 [&](AdditiveTable& table) {
                   const auto* row = std::get_if<AdditiveRow>(&item.payload);
                   if (!row) throw ConfigError("additive oracle needs value rows");
                   for (std::size_t i = 0; i < row->values.size(); ++i) {
                     if (row->values[i] < Rational(0)) throw ConfigError("negative item weight");
                     table.weights[i].push_back(row->values[i]);
                   }
                 },
                 [&](PartitionMatroidRank& rank) { add_categories(rank); },
                 [&](SupermodularComplementCost& cost) { add_categories(cost.inner); },
                 [&](ExplicitSetFunction& fn) {
                   const auto* row = std::get_if<SetFunctionRow>(&item.payload);
                   if (!row) throw ConfigError("set-function oracle needs set-function rows");
                   if (t_ >= 63) throw ConfigError("set-function oracle holds at most 63 items");
                   for (std::size_t i = 0; i < row->extensions.size(); ++i) fn.rows[i].push_back(row->extensions[i]);
                 },
             },
             backing_);
  ++t_;
}

void ValuationOracle::check(AgentId agent, ItemId e) const {
  if (agent < 1 || agent > n_) throw OutOfRange("agent " + std::to_string(agent) + " out of range");
  if (e < 1 || e > t_) throw UnknownItem("unknown item e" + std::to_string(e));
}

Rational ValuationOracle::value(AgentId agent, std::span<const ItemId> set) const {
  if (agent < 1 || agent > n_) throw OutOfRange("agent " + std::to_string(agent) + " out of range");
  for (ItemId e : set) check(agent, e);
  return std::visit(
      overloaded{
          [&](const AdditiveTable& table) {
            Rational sum;
            for (ItemId e : set) sum += table.weights[idx(agent)][idx(e)];
            return sum;
          },
          [&](const PartitionMatroidRank& rank) {
            return Rational(distinct_categories(rank.categories[idx(agent)], set,
                                                static_cast<int>(rank.names[idx(agent)].size())));
          },
          [&](const SupermodularComplementCost& cost) {
            int r = distinct_categories(cost.inner.categories[idx(agent)], set,
                                        static_cast<int>(cost.inner.names[idx(agent)].size()));
            return Rational(static_cast<std::int64_t>(set.size()) - r);
          },
          [&](const ExplicitSetFunction& fn) {
            if (set.empty()) return Rational(0);
            std::uint64_t mask = 0;
            ItemId top = 0;
            for (ItemId e : set) {
              mask |= std::uint64_t{1} << (e - 1);
              top = std::max(top, e);
            }
            mask &= ~(std::uint64_t{1} << (top - 1));
            const auto& ext = fn.rows[idx(agent)][idx(top)];
            auto it = ext.find(mask);
            if (it == ext.end()) throw UnknownItem("set function undefined on the requested subset");
            return it->second;
          },
      },
      backing_);
}

Rational ValuationOracle::marginal(AgentId agent, std::span<const ItemId> base, ItemId e) const {
  check(agent, e);
  if (std::find(base.begin(), base.end(), e) != base.end()) throw UnknownItem("marginal item already in base");
  if (const auto* table = std::get_if<AdditiveTable>(&backing_)) return table->weights[idx(agent)][idx(e)];
  std::vector<ItemId> with(base.begin(), base.end());
  with.push_back(e);
  return value(agent, with) - value(agent, base);
}

const Rational& ValuationOracle::weight(AgentId agent, ItemId e) const {
  check(agent, e);
  const auto* table = std::get_if<AdditiveTable>(&backing_);
  if (!table) throw ClassMismatch("additive weights requested from a non-additive oracle");
  return table->weights[idx(agent)][idx(e)];
}

int ValuationOracle::category(AgentId agent, ItemId e) const {
  check(agent, e);
  if (const auto* rank = std::get_if<PartitionMatroidRank>(&backing_)) return rank->categories[idx(agent)][idx(e)];
  if (const auto* cost = std::get_if<SupermodularComplementCost>(&backing_)) {
    return cost->inner.categories[idx(agent)][idx(e)];
  }
  throw ClassMismatch("categories requested from a non-matroid oracle");
}

int ValuationOracle::category_count(AgentId agent) const {
  if (const auto* rank = std::get_if<PartitionMatroidRank>(&backing_)) {
    return static_cast<int>(rank->names.at(idx(agent)).size());
  }
  if (const auto* cost = std::get_if<SupermodularComplementCost>(&backing_)) {
    return static_cast<int>(cost->inner.names.at(idx(agent)).size());
  }
  throw ClassMismatch("categories requested from a non-matroid oracle");
}

Rational set_value(const ValuationOracle& oracle, AgentId agent, std::span<const ItemId> set) {
  return oracle.value(agent, set);
}

Rational marginal(const ValuationOracle& oracle, AgentId agent, std::span<const ItemId> base, ItemId e) {
  return oracle.marginal(agent, base, e);
}

ValuationClass classify(const ValuationOracle& oracle, AgentId agent) {
  if (std::holds_alternative<PartitionMatroidRank>(oracle.backing())) return ValuationClass::submodular_binary();
  if (std::holds_alternative<SupermodularComplementCost>(oracle.backing())) {
    return ValuationClass::supermodular_binary();
  }
  const auto* table = std::get_if<AdditiveTable>(&oracle.backing());
  if (!table) return ValuationClass::general();
  if (agent < 1 || agent > oracle.n()) throw OutOfRange("agent out of range");
  std::set<Rational> levels(table->weights[idx(agent)].begin(), table->weights[idx(agent)].end());
  bool binary = std::all_of(levels.begin(), levels.end(), [](const Rational& w) { return w == 0 || w == 1; });
  if (binary) return ValuationClass::binary();
  if (levels.count(Rational(0))) return ValuationClass::general();
  std::vector<Rational> v(levels.begin(), levels.end());
  if (v.size() == 1) return ValuationClass::bivalued(v[0], v[0]);
  if (v.size() == 2) return ValuationClass::bivalued(v[0], v[1]);
  if (v.size() == 3) return ValuationClass::trivalued(v[0], v[1], v[2]);
  return ValuationClass::general();
}

bool is_monotone(const ValuationOracle& oracle) {
  const auto* table = std::get_if<AdditiveTable>(&oracle.backing());
  if (!table) return false;
  auto all = [&](auto cmp) {
    return std::all_of(table->weights.begin(), table->weights.end(), [&](const auto& row) {
      return std::is_sorted(row.begin(), row.end(), cmp);
    });
  };
  return all(std::less<Rational>()) || all(std::greater<Rational>());
}

}  // namespace fairstream
