#include "fairstream/audit.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>

namespace fairstream {

namespace {

bool goods(const ValuationOracle& o) { return o.direction() == Direction::Goods; }

std::vector<ItemId> first_items(int k) {
  std::vector<ItemId> out(static_cast<std::size_t>(k));
  std::iota(out.begin(), out.end(), 1);
  return out;
}

void require_budget(int n, int k, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) {
    if (total > budget / static_cast<std::uint64_t>(n)) {
      throw BudgetExceeded(std::to_string(n) + "^" + std::to_string(k) + " assignments exceed the budget of " +
                           std::to_string(budget));
    }
    total *= static_cast<std::uint64_t>(n);
  }
  if (total > budget) throw BudgetExceeded("enumeration budget exceeded");
}

void tick(EnumerationCounter* counter, std::uint64_t nodes = 1) {
  if (counter) counter->nodes += nodes;
}

// Share over grouped additive weights: bundles are chosen as count vectors in
// sorted order (ascending value for goods, descending for chores).
class LevelSearch {
 public:
  LevelSearch(std::vector<Rational> levels, std::vector<int> counts, int n, bool goods, EnumerationCounter* counter)
      : levels_(std::move(levels)), counts_(std::move(counts)), n_(n), goods_(goods), counter_(counter) {}

  Rational solve() {
    Rational total = value(counts_);
    if (n_ == 1) return total;
    std::vector<int> rem = counts_;
    std::vector<int> pick(levels_.size(), 0);
    if (goods_) {
      best_ = Rational(0);
      limit_ = total / Rational(n_);
    } else {
      best_ = total;
      limit_ = total / Rational(n_);
      for (std::size_t l = 0; l < levels_.size(); ++l) {
        if (counts_[l] > 0) limit_ = std::max(limit_, levels_[l]);
      }
    }
    first(0, rem, pick, Rational(0));
    return best_;
  }

 private:
  Rational value(const std::vector<int>& c) const {
    Rational v;
    for (std::size_t l = 0; l < c.size(); ++l) {
      if (c[l]) v += levels_[l] * Rational(c[l]);
    }
    return v;
  }

  bool done() const { return goods_ ? best_ >= limit_ : best_ <= limit_; }

  // Enumerate the first bundle; its value is the min (goods) or max (chores).
  void first(std::size_t l, std::vector<int>& rem, std::vector<int>& pick, Rational acc) {
    if (done()) return;
    if (l == levels_.size()) {
      tick(counter_);
      bool better = goods_ ? acc > best_ : acc < best_;
      if (!better) return;
      if (goods_ ? acc > limit_ : acc < limit_) return;
      if (feasible(1, rem, acc)) best_ = acc;
      return;
    }
    // Larger picks first so good incumbents appear early.
    for (int c = rem[l]; c >= 0; --c) {
      Rational next = acc + levels_[l] * Rational(c);
      if (!goods_ && next >= best_) continue;
      pick[l] = c;
      rem[l] -= c;
      first(l + 1, rem, pick, next);
      rem[l] += c;
      pick[l] = 0;
      if (done()) return;
    }
  }

  // Can rem be split into bundles b..n-1 whose values keep the sorted order from prev?
  bool feasible(int b, std::vector<int>& rem, const Rational& prev) {
    if (b == n_ - 1) {
      tick(counter_);
      Rational v = value(rem);
      return goods_ ? v >= prev : v <= prev;
    }
    std::vector<int> pick(levels_.size(), 0);
    return sub(b, 0, rem, pick, Rational(0), prev);
  }

  bool sub(int b, std::size_t l, std::vector<int>& rem, std::vector<int>& pick, Rational acc, const Rational& prev) {
    if (l == levels_.size()) {
      tick(counter_);
      if (goods_ ? acc < prev : acc > prev) return false;
      return feasible(b + 1, rem, acc);
    }
    for (int c = rem[l]; c >= 0; --c) {
      Rational next = acc + levels_[l] * Rational(c);
      if (!goods_ && next > prev) continue;
      rem[l] -= c;
      bool ok = sub(b, l + 1, rem, pick, next, prev);
      rem[l] += c;
      if (ok) return true;
    }
    return false;
  }

  std::vector<Rational> levels_;
  std::vector<int> counts_;
  int n_;
  bool goods_;
  EnumerationCounter* counter_;
  Rational best_;
  Rational limit_;
};

// Canonical-order branch and bound over items (restricted growth: item m may
// open at most one new bundle). Works for any monotone oracle.
class ItemSearch {
 public:
  ItemSearch(const ValuationOracle& oracle, AgentId agent, std::vector<ItemId> items, int n, std::uint64_t budget,
             EnumerationCounter* c)
      : oracle_(oracle), agent_(agent), items_(std::move(items)), n_(n), goods_(goods(oracle)), budget_(budget),
        counter_(c) {}

  Rational solve() {
    if (oracle_.additive()) {
      std::sort(items_.begin(), items_.end(), [&](ItemId a, ItemId b) {
        return oracle_.weight(agent_, a) > oracle_.weight(agent_, b);
      });
      suffix_.assign(items_.size() + 1, Rational(0));
      for (std::size_t m = items_.size(); m-- > 0;) suffix_[m] = suffix_[m + 1] + oracle_.weight(agent_, items_[m]);
    }
    bundles_.assign(static_cast<std::size_t>(n_), {});
    values_.assign(static_cast<std::size_t>(n_), Rational(0));
    found_ = false;
    go(0, 0);
    return best_;
  }

 private:
  Rational evaluate(const std::vector<ItemId>& b) const { return oracle_.value(agent_, b); }

  void go(std::size_t m, int used) {
    tick(counter_);
    if (++nodes_ > budget_) throw BudgetExceeded("share search exceeded the budget of " + std::to_string(budget_));
    if (m == items_.size()) {
      Rational score = values_[0];
      for (int b = 1; b < n_; ++b) {
        score = goods_ ? std::min(score, values_[static_cast<std::size_t>(b)])
                       : std::max(score, values_[static_cast<std::size_t>(b)]);
      }
      if (!found_ || (goods_ ? score > best_ : score < best_)) {
        best_ = score;
        found_ = true;
      }
      return;
    }
    if (found_ && prune(m, used)) return;
    int open = std::min(used + 1, n_);
    for (int b = 0; b < open; ++b) {
      auto& bundle = bundles_[static_cast<std::size_t>(b)];
      Rational saved = values_[static_cast<std::size_t>(b)];
      bundle.push_back(items_[m]);
      values_[static_cast<std::size_t>(b)] =
          oracle_.additive() ? saved + oracle_.weight(agent_, items_[m]) : evaluate(bundle);
      go(m + 1, std::max(used, b + 1));
      bundle.pop_back();
      values_[static_cast<std::size_t>(b)] = saved;
    }
  }

  bool prune(std::size_t m, int used) const {
    if (goods_) {
      int remaining = static_cast<int>(items_.size() - m);
      if (n_ - used > remaining && best_ >= Rational(0)) return true;
      if (!oracle_.additive()) return false;
      for (int b = 0; b < used; ++b) {
        if (values_[static_cast<std::size_t>(b)] + suffix_[m] <= best_) return true;
      }
      return false;
    }
    for (int b = 0; b < used; ++b) {
      if (values_[static_cast<std::size_t>(b)] >= best_) return true;
    }
    return false;
  }

  const ValuationOracle& oracle_;
  AgentId agent_;
  std::vector<ItemId> items_;
  int n_;
  bool goods_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  EnumerationCounter* counter_;
  std::vector<std::vector<ItemId>> bundles_;
  std::vector<Rational> values_;
  std::vector<Rational> suffix_;
  Rational best_;
  bool found_ = false;
};

// Per-agent category counts over the first k items (loops counted separately).
struct CategoryCounts {
  std::vector<int> per_category;
  int loops = 0;
};

CategoryCounts count_categories(const ValuationOracle& oracle, AgentId agent, int k) {
  CategoryCounts out;
  out.per_category.assign(static_cast<std::size_t>(oracle.category_count(agent)), 0);
  for (ItemId e = 1; e <= k; ++e) {
    int c = oracle.category(agent, e);
    if (c < 0) ++out.loops;
    else ++out.per_category[static_cast<std::size_t>(c)];
  }
  return out;
}

// Maximum matching between items and (agent, category) slots.
int slot_matching(const ValuationOracle& oracle, int k) {
  int n = oracle.n();
  std::vector<int> offset(static_cast<std::size_t>(n) + 1, 0);
  for (AgentId i = 1; i <= n; ++i) offset[static_cast<std::size_t>(i)] = offset[static_cast<std::size_t>(i - 1)] + oracle.category_count(i);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(k));
  for (ItemId e = 1; e <= k; ++e) {
    for (AgentId i = 1; i <= n; ++i) {
      int c = oracle.category(i, e);
      if (c >= 0) adj[static_cast<std::size_t>(e - 1)].push_back(offset[static_cast<std::size_t>(i - 1)] + c);
    }
  }
  std::vector<int> slot_owner(static_cast<std::size_t>(offset.back()), -1);
  std::vector<int> seen(static_cast<std::size_t>(offset.back()), -1);
  std::function<bool(int, int)> augment = [&](int item, int stamp) {
    for (int s : adj[static_cast<std::size_t>(item)]) {
      if (seen[static_cast<std::size_t>(s)] == stamp) continue;
      seen[static_cast<std::size_t>(s)] = stamp;
      int& owner = slot_owner[static_cast<std::size_t>(s)];
      if (owner < 0 || augment(owner, stamp)) {
        owner = item;
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (int e = 0; e < k; ++e) size += augment(e, e) ? 1 : 0;
  return size;
}

Rational bundle_value(const Allocation& alloc, const ValuationOracle& oracle, AgentId i, AgentId j) {
  return oracle.value(i, alloc.bundle(j));
}

// min over e in B of v_i(B - e)
Rational value_without_best(const ValuationOracle& oracle, AgentId i, const std::vector<ItemId>& bundle) {
  if (oracle.additive()) {
    Rational sum, top;
    for (ItemId e : bundle) {
      const Rational& w = oracle.weight(i, e);
      sum += w;
      top = std::max(top, w);
    }
    return sum - top;
  }
  std::optional<Rational> best;
  std::vector<ItemId> rest;
  for (std::size_t skip = 0; skip < bundle.size(); ++skip) {
    rest.clear();
    for (std::size_t m = 0; m < bundle.size(); ++m) {
      if (m != skip) rest.push_back(bundle[m]);
    }
    Rational v = oracle.value(i, rest);
    if (!best || v < *best) best = v;
  }
  return best.value_or(Rational(0));
}

}  // namespace

std::uint64_t default_budget() {
  if (const char* env = std::getenv("FAIRSTREAM_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultBudget;
}

Ratio ef1_raw(const Allocation& alloc, const ValuationOracle& oracle) {
  int n = alloc.n();
  Ratio out = goods(oracle) ? Ratio::infinity() : Ratio(0);
  bool any = false;
  for (AgentId i = 1; i <= n; ++i) {
    for (AgentId j = 1; j <= n; ++j) {
      if (i == j) continue;
      if (goods(oracle)) {
        if (alloc.bundle(j).empty()) continue;
        Ratio r = Ratio::of(bundle_value(alloc, oracle, i, i), value_without_best(oracle, i, alloc.bundle(j)));
        out = min(out, r);
      } else {
        if (alloc.bundle(i).empty()) continue;
        Ratio r = Ratio::of(value_without_best(oracle, i, alloc.bundle(i)), bundle_value(alloc, oracle, i, j));
        out = max(out, r);
      }
      any = true;
    }
  }
  return any ? out : Ratio(1);
}

Ratio ef1_ratio(const Allocation& alloc, const ValuationOracle& oracle) {
  Ratio raw = ef1_raw(alloc, oracle);
  return goods(oracle) ? min(raw, Ratio(1)) : max(raw, Ratio(1));
}

Rational mms_share(AgentId agent, int k, int n, const ValuationOracle& oracle, std::uint64_t budget,
                   EnumerationCounter* counter) {
  if (k < 0 || k > oracle.t()) throw OutOfRange("mms round out of range");
  if (agent < 1 || agent > oracle.n()) throw OutOfRange("agent out of range");
  if (n < 1) throw ConfigError("mms needs n >= 1");
  if (k == 0) return Rational(0);
  if (oracle.matroid_backed()) {
    // Cyclic placement of per-category tokens meets the counting bound exactly.
    CategoryCounts counts = count_categories(oracle, agent, k);
    std::int64_t tokens = 0;
    std::int64_t excess = counts.loops;
    for (int m : counts.per_category) {
      tokens += std::min(m, n);
      excess += std::max(m - n, 0);
    }
    tick(counter);
    if (goods(oracle)) return Rational(tokens / n);
    return Rational((excess + n - 1) / n);
  }
  if (oracle.additive()) {
    std::vector<std::pair<Rational, int>> grouped;
    for (ItemId e = 1; e <= k; ++e) {
      const Rational& w = oracle.weight(agent, e);
      auto it = std::find_if(grouped.begin(), grouped.end(), [&](const auto& g) { return g.first == w; });
      if (it == grouped.end()) grouped.emplace_back(w, 1);
      else ++it->second;
    }
    if (grouped.size() <= 3) {
      std::vector<Rational> levels;
      std::vector<int> counts;
      for (auto& [w, c] : grouped) {
        levels.push_back(w);
        counts.push_back(c);
      }
      return LevelSearch(levels, counts, n, goods(oracle), counter).solve();
    }
  }
  return ItemSearch(oracle, agent, first_items(k), n, budget, counter).solve();
}

Ratio mms_raw(const Allocation& alloc, const ValuationOracle& oracle, std::uint64_t budget,
              EnumerationCounter* counter) {
  int n = alloc.n();
  Ratio out = goods(oracle) ? Ratio::infinity() : Ratio(0);
  for (AgentId i = 1; i <= n; ++i) {
    Rational share = mms_share(i, alloc.round, n, oracle, budget, counter);
    Ratio r = Ratio::of(oracle.value(i, alloc.bundle(i)), share);
    out = goods(oracle) ? min(out, r) : max(out, r);
  }
  return out;
}

Ratio mms_ratio(const Allocation& alloc, const ValuationOracle& oracle, std::uint64_t budget,
                EnumerationCounter* counter) {
  Ratio raw = mms_raw(alloc, oracle, budget, counter);
  return goods(oracle) ? min(raw, Ratio(1)) : max(raw, Ratio(1));
}

Rational optimal_welfare(int k, int n, const ValuationOracle& oracle, std::uint64_t budget,
                         EnumerationCounter* counter) {
  if (k < 0 || k > oracle.t()) throw OutOfRange("welfare round out of range");
  if (n != oracle.n()) throw ConfigError("welfare agent count differs from the oracle");
  if (oracle.additive()) {
    Rational total;
    for (ItemId e = 1; e <= k; ++e) {
      Rational pick = oracle.weight(1, e);
      for (AgentId i = 2; i <= n; ++i) {
        pick = goods(oracle) ? std::max(pick, oracle.weight(i, e)) : std::min(pick, oracle.weight(i, e));
      }
      total += pick;
    }
    tick(counter, static_cast<std::uint64_t>(k));
    return total;
  }
  if (oracle.matroid_backed()) {
    int matched = slot_matching(oracle, k);
    tick(counter, static_cast<std::uint64_t>(k));
    return goods(oracle) ? Rational(matched) : Rational(k - matched);
  }
  require_budget(n, k, budget);
  std::vector<int> owner(static_cast<std::size_t>(k), 0);
  std::optional<Rational> best;
  std::vector<std::vector<ItemId>> bundles(static_cast<std::size_t>(n));
  while (true) {
    tick(counter);
    for (auto& b : bundles) b.clear();
    for (int m = 0; m < k; ++m) bundles[static_cast<std::size_t>(owner[static_cast<std::size_t>(m)])].push_back(m + 1);
    Rational sum;
    for (AgentId i = 1; i <= n; ++i) sum += oracle.value(i, bundles[static_cast<std::size_t>(i - 1)]);
    if (!best || (goods(oracle) ? sum > *best : sum < *best)) best = sum;
    int m = 0;
    while (m < k && ++owner[static_cast<std::size_t>(m)] == n) owner[static_cast<std::size_t>(m++)] = 0;
    if (m == k) break;
  }
  return best.value_or(Rational(0));
}

Rational welfare(const Allocation& alloc, const ValuationOracle& oracle) {
  Rational sum;
  for (AgentId i = 1; i <= alloc.n(); ++i) sum += oracle.value(i, alloc.bundle(i));
  return sum;
}

Ratio welfare_ratio(const Allocation& alloc, const ValuationOracle& oracle, std::uint64_t budget,
                    EnumerationCounter* counter) {
  return Ratio::of(welfare(alloc, oracle), optimal_welfare(alloc.round, alloc.n(), oracle, budget, counter));
}

bool check_nw(const Allocation& alloc, const ValuationOracle& oracle) {
  std::vector<ItemId> rest;
  for (AgentId i = 1; i <= alloc.n(); ++i) {
    const auto& bundle = alloc.bundle(i);
    for (ItemId e : bundle) {
      rest.clear();
      std::copy_if(bundle.begin(), bundle.end(), std::back_inserter(rest), [e](ItemId x) { return x != e; });
      if (oracle.marginal(i, rest, e) <= Rational(0)) return false;
    }
  }
  for (ItemId e : alloc.discarded) {
    for (AgentId i = 1; i <= alloc.n(); ++i) {
      if (oracle.marginal(i, alloc.bundle(i), e) != Rational(0)) return false;
    }
  }
  return true;
}

bool check_complete(const Allocation& alloc) { return alloc.discarded.empty() && !alloc.held; }

RoundMetrics audit_round(const Allocation& alloc, const ValuationOracle& oracle, const AuditOptions& options,
                         EnumerationCounter* counter) {
  RoundMetrics m;
  m.round = alloc.round;
  m.ef1_raw = ef1_raw(alloc, oracle);
  m.ef1 = goods(oracle) ? min(m.ef1_raw, Ratio(1)) : max(m.ef1_raw, Ratio(1));
  if (options.mms) {
    try {
      m.mms_raw = mms_raw(alloc, oracle, options.budget, counter);
      m.mms = goods(oracle) ? min(*m.mms_raw, Ratio(1)) : max(*m.mms_raw, Ratio(1));
    } catch (const BudgetExceeded&) {
    }
  }
  m.welfare_value = welfare(alloc, oracle);
  if (options.welfare) {
    try {
      m.welfare_optimum = optimal_welfare(alloc.round, alloc.n(), oracle, options.budget, counter);
      m.welfare = Ratio::of(m.welfare_value, *m.welfare_optimum);
    } catch (const BudgetExceeded&) {
    }
  }
  if (goods(oracle)) m.nw_ok = check_nw(alloc, oracle);
  else m.complete_ok = check_complete(alloc);
  return m;
}

}  // namespace fairstream
