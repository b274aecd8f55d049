#include "fairstream/algorithms.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>

namespace fairstream {

std::string_view to_string(ControllerMode m) {
  switch (m) {
    case ControllerMode::Base: return "BASE";
    case ControllerMode::Pbc: return "PBC";
    case ControllerMode::Dbc: return "DBC";
  }
  return "?";
}

const std::vector<ModeTransition>& Allocator::transitions() const {
  static const std::vector<ModeTransition> none;
  return none;
}

namespace {

using Kind = ValuationClass::Kind;

std::size_t at(int zero_based) { return static_cast<std::size_t>(zero_based); }

const std::vector<Rational>& row_of(const ItemView& item, std::string_view who) {
  if (!item.values) throw ClassMismatch(std::string(who) + " needs additive rows");
  return *item.values;
}

void require_direction(Direction got, Direction want, std::string_view who) {
  if (got != want) throw ClassMismatch(std::string(who) + " handles " + std::string(to_string(want)) + " only");
}

void require_two(int n, std::string_view who) {
  if (n != 2) throw WrongAgentCount(std::string(who) + " needs exactly two agents");
}

std::array<std::pair<Rational, Rational>, 2> bivalued_levels(const std::vector<ValuationClass>& classes,
                                                             std::string_view who) {
  std::array<std::pair<Rational, Rational>, 2> out;
  for (std::size_t k = 0; k < 2; ++k) {
    if (classes.at(k).kind != Kind::BiValued) throw ClassMismatch(std::string(who) + " needs bi-valued agents");
    out[k] = {classes[k].a, classes[k].b};
  }
  return out;
}

// Online check of the common-direction monotone condition.
class MonotoneGuard {
 public:
  void observe(const std::vector<Rational>& row) {
    if (last_.empty()) {
      last_ = row;
      return;
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      int step = row[i] > last_[i] ? 1 : (row[i] < last_[i] ? -1 : 0);
      if (step == 0) continue;
      if (direction_ == 0) direction_ = step;
      else if (direction_ != step) throw NotMonotone("stream is not monotone");
    }
    last_ = row;
  }

 private:
  std::vector<Rational> last_;
  int direction_ = 0;
};

// Cross-valuation table val[i][j] = f_i(A_j) kept from additive rows.
class Ledger {
 public:
  void reset(int n) {
    val_.assign(at(n), std::vector<Rational>(at(n), Rational(0)));
    size_.assign(at(n), 0);
  }
  void give(int agent, const std::vector<Rational>& row) {
    for (std::size_t k = 0; k < val_.size(); ++k) val_[k][at(agent)] += row[k];
    ++size_[at(agent)];
  }
  const Rational& v(int i, int j) const { return val_[at(i)][at(j)]; }
  int size(int j) const { return size_[at(j)]; }

 private:
  std::vector<std::vector<Rational>> val_;
  std::vector<int> size_;
};

class GreedyNw final : public Allocator {
 public:
  std::string_view name() const override { return "greedy_nw"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    require_direction(d, Direction::Goods, name());
    for (const auto& c : classes) {
      if (c.kind != Kind::SubmodularBinary && c.kind != Kind::Binary) {
        throw ClassMismatch("greedy_nw needs submodular-binary valuations");
      }
    }
    n_ = n;
  }
  Action step(const ItemView& item) override {
    for (int i = 0; i < n_; ++i) {
      const Rational& m = item.marginals[at(i)];
      if (m != 0 && m != 1) throw ClassMismatch("greedy_nw saw a non-binary marginal");
    }
    for (int i = 0; i < n_; ++i) {
      if (item.marginals[at(i)] == 1) return {Decision::assign(i + 1), {}};
    }
    return {Decision::discard(), {}};
  }

 private:
  int n_ = 0;
};

class MarginalGreedy final : public Allocator {
 public:
  std::string_view name() const override { return "marginal_greedy"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams& p) override {
    require_direction(d, Direction::Goods, name());
    monotone_ = p.monotone;
    unchecked_ = p.unchecked;
    for (const auto& c : classes) {
      if (unchecked_) break;
      bool ok = c.kind == Kind::SubmodularBinary || c.kind == Kind::Binary;
      if (monotone_) ok = c.kind != Kind::SubmodularBinary && c.kind != Kind::SupermodularBinary;
      if (!ok) throw ClassMismatch("marginal_greedy needs binary marginals or a monotone additive stream");
    }
    pi_.resize(at(n));
    std::iota(pi_.begin(), pi_.end(), 0);
    guard_ = {};
  }
  Action step(const ItemView& item) override {
    if (monotone_) {
      guard_.observe(row_of(item, name()));
    } else if (!unchecked_) {
      for (const auto& m : item.marginals) {
        if (m != 0 && m != 1) throw ClassMismatch("marginal_greedy saw a non-binary marginal");
      }
    }
    for (std::size_t p = 0; p < pi_.size(); ++p) {
      int agent = pi_[p];
      if (item.marginals[at(agent)] > 0) {
        pi_.erase(pi_.begin() + static_cast<std::ptrdiff_t>(p));
        pi_.push_back(agent);
        return {Decision::assign(agent + 1), {}};
      }
    }
    return {Decision::discard(), {}};
  }
  const std::vector<int>& order() const { return pi_; }

 private:
  std::vector<int> pi_;
  bool monotone_ = false;
  bool unchecked_ = false;
  MonotoneGuard guard_;
};

// Shared machinery of the two-agent bi-valued controllers.
class TwoAgentController : public Allocator {
 public:
  std::optional<ControllerMode> mode() const override { return mode_; }
  const std::vector<ModeTransition>& transitions() const override { return log_; }

 protected:
  void setup(Direction d, Direction want, int n, const std::vector<ValuationClass>& classes) {
    require_direction(d, want, name());
    require_two(n, name());
    levels_ = bivalued_levels(classes, name());
    ledger_.reset(2);
    mode_ = ControllerMode::Base;
    lambda_ = 1;
    mu_ = 0;
    log_.clear();
  }
  bool is_a(int k) const { return (*row_)[at(k)] == levels_[at(k)].first; }
  bool is_b(int k) const { return (*row_)[at(k)] == levels_[at(k)].second; }
  const Rational& w(int k) const { return (*row_)[at(k)]; }

  Action load(const ItemView& item) {
    row_ = &row_of(item, name());
    for (int k = 0; k < 2; ++k) {
      if (!classes_admit(k)) throw ClassMismatch(std::string(name()) + " saw a value outside the agent's levels");
    }
    return {};
  }
  bool classes_admit(int k) const { return is_a(k) || is_b(k); }

  Action give(int agent) {
    ledger_.give(agent, *row_);
    return {Decision::assign(agent + 1), {}};
  }
  void switch_to(ControllerMode to) {
    log_.push_back({id_, mode_, to, i_ + 1, j_ + 1});
    mode_ = to;
    lambda_ = 1;
    mu_ = 0;
  }

  std::array<std::pair<Rational, Rational>, 2> levels_;
  Ledger ledger_;
  ControllerMode mode_ = ControllerMode::Base;
  int lambda_ = 1;
  int mu_ = 0;
  int i_ = 0;
  int j_ = 1;
  ItemId id_ = 0;
  const std::vector<Rational>* row_ = nullptr;
  std::vector<ModeTransition> log_;
};

class BivaluedTwoGoods final : public TwoAgentController {
 public:
  std::string_view name() const override { return "bivalued_two_goods"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    setup(d, Direction::Goods, n, classes);
  }
  Action step(const ItemView& item) override {
    load(item);
    id_ = item.id;
    switch (mode_) {
      case ControllerMode::Base: return base();
      case ControllerMode::Pbc: return pbc();
      case ControllerMode::Dbc: return dbc();
    }
    throw std::logic_error("bad controller mode");
  }

 private:
  bool envies(int x) const { return ledger_.v(x, x) < ledger_.v(x, 1 - x); }

  Action base() {
    bool e0 = envies(0);
    bool e1 = envies(1);
    if (!e0 && !e1) {
      bool all_a = is_a(0) && is_a(1);
      bool all_b = is_b(0) && is_b(1);
      if (all_a || all_b) return give(0);
      return give(is_b(0) ? 0 : 1);
    }
    if (e0 && e1) throw std::logic_error("envy cycle while in BASE mode");
    // The unenvied agent is the one who envies.
    int i = e0 ? 0 : 1;
    int j = 1 - i;
    bool i_still_envies = ledger_.v(i, i) + w(i) < ledger_.v(i, j);
    bool j_would_envy = ledger_.v(j, j) < ledger_.v(j, i) + w(j);
    if (i_still_envies && j_would_envy) {
      i_ = i;
      j_ = j;
      switch_to(ControllerMode::Pbc);
      return pbc();
    }
    return give(i);
  }

  Action pbc() {
    if (lambda_ == 1) {
      if (ledger_.size(j_) == 1) {
        Action a = give(j_);
        switch_to(ControllerMode::Base);
        return a;
      }
      Action a;
      if (is_b(j_)) {
        a = give(j_);
        mu_ = 1;
      } else {
        a = give(i_);
        mu_ = 2;
      }
      lambda_ = 2;
      return a;
    }
    if (mu_ == 1) {
      Action a = give(i_);
      switch_to(ControllerMode::Base);
      return a;
    }
    if (is_a(i_)) {
      Action a = give(j_);
      switch_to(ControllerMode::Base);
      return a;
    }
    Action a = give(i_);
    switch_to(ControllerMode::Dbc);
    return a;
  }

  Action dbc() {
    Action a;
    if (lambda_ == 1) {
      if (is_a(i_) && is_b(j_)) {
        a = give(j_);
        mu_ = 1;
      } else if (is_b(i_) && is_b(j_)) {
        a = give(j_);
        mu_ = 2;
      } else if (is_a(i_) && is_a(j_)) {
        a = give(j_);
        mu_ = 3;
      } else {
        a = give(i_);
        mu_ = 4;
      }
      lambda_ = 2;
      return a;
    }
    switch (mu_) {
      case 1: a = give(j_); break;
      case 2:
        if (is_b(i_)) {
          a = give(i_);
          lambda_ = 1;
        } else {
          a = give(j_);
        }
        break;
      case 3:
        if (is_b(j_)) {
          a = give(j_);
        } else {
          a = give(i_);
          lambda_ = 1;
        }
        break;
      default:
        a = give(j_);
        lambda_ = 1;
        break;
    }
    if (lambda_ == 2) switch_to(ControllerMode::Base);
    return a;
  }
};

class BivaluedTwoChores final : public TwoAgentController {
 public:
  std::string_view name() const override { return "bivalued_two_chores"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    setup(d, Direction::Chores, n, classes);
  }
  Action step(const ItemView& item) override {
    load(item);
    id_ = item.id;
    switch (mode_) {
      case ControllerMode::Base: return base();
      case ControllerMode::Pbc: return pbc();
      case ControllerMode::Dbc: return dbc();
    }
    throw std::logic_error("bad controller mode");
  }

 private:
  bool envies(int x) const { return ledger_.v(x, x) > ledger_.v(x, 1 - x); }

  Action base() {
    bool e0 = envies(0);
    bool e1 = envies(1);
    if (!e0 && !e1) {
      bool all_a = is_a(0) && is_a(1);
      bool all_b = is_b(0) && is_b(1);
      if (all_a || all_b) return give(0);
      return give(is_a(0) ? 0 : 1);
    }
    if (e0 && e1) throw std::logic_error("envy cycle while in BASE mode");
    // i does not envy, j envies.
    int i = e0 ? 1 : 0;
    int j = 1 - i;
    bool j_still_envies = ledger_.v(j, j) > ledger_.v(j, i) + w(j);
    bool i_would_envy = ledger_.v(i, i) + w(i) > ledger_.v(i, j);
    if (j_still_envies && i_would_envy) {
      i_ = i;
      j_ = j;
      switch_to(ControllerMode::Pbc);
      return pbc();
    }
    return give(i);
  }

  Action pbc() {
    if (lambda_ == 1) {
      if (ledger_.size(j_) == 1) {
        Action a = give(j_);
        switch_to(ControllerMode::Base);
        return a;
      }
      Action a;
      if (is_b(i_)) {
        a = give(j_);
        mu_ = 1;
      } else {
        a = give(i_);
        mu_ = 2;
      }
      lambda_ = 2;
      return a;
    }
    if (mu_ == 1) {
      Action a = give(i_);
      switch_to(ControllerMode::Base);
      return a;
    }
    if (is_a(j_)) {
      Action a = give(j_);
      switch_to(ControllerMode::Base);
      return a;
    }
    Action a = give(i_);
    switch_to(ControllerMode::Dbc);
    return a;
  }

  Action dbc() {
    Action a;
    if (lambda_ == 1) {
      if (is_a(j_) && is_b(i_)) {
        a = give(j_);
        mu_ = 1;
      } else if (is_b(j_) && is_b(i_)) {
        a = give(j_);
        mu_ = 2;
      } else if (is_a(j_) && is_a(i_)) {
        a = give(j_);
        mu_ = 3;
      } else {
        a = give(i_);
        mu_ = 4;
      }
      lambda_ = 2;
      return a;
    }
    switch (mu_) {
      case 1: a = give(j_); break;
      case 2:
        if (is_b(j_)) {
          a = give(i_);
          lambda_ = 1;
        } else {
          a = give(j_);
        }
        break;
      case 3:
        if (is_b(i_)) {
          a = give(j_);
        } else {
          a = give(i_);
          lambda_ = 1;
        }
        break;
      default:
        a = give(j_);
        lambda_ = 1;
        break;
    }
    if (lambda_ == 2) switch_to(ControllerMode::Base);
    return a;
  }
};

// Agents 1..n-1 binary, agent n bi-valued.
class PickingBase : public Allocator {
 protected:
  void setup(Direction d, Direction want, int n, const std::vector<ValuationClass>& classes) {
    require_direction(d, want, name());
    if (n < 2) throw WrongAgentCount(std::string(name()) + " needs at least two agents");
    for (int i = 0; i + 1 < n; ++i) {
      if (classes.at(at(i)).kind != Kind::Binary) throw ClassMismatch(std::string(name()) + " needs binary agents 1..n-1");
    }
    if (classes.at(at(n - 1)).kind != Kind::BiValued) throw ClassMismatch(std::string(name()) + " needs bi-valued agent n");
    n_ = n;
    a_n_ = classes[at(n - 1)].a;
    b_n_ = classes[at(n - 1)].b;
    bundles_.assign(at(n), {});
    rows_.clear();
  }
  const std::vector<Rational>& load(const ItemView& item) {
    const auto& row = row_of(item, name());
    for (int i = 0; i + 1 < n_; ++i) {
      if (row[at(i)] != 0 && row[at(i)] != 1) throw ClassMismatch(std::string(name()) + " saw a non-binary value");
    }
    if (row[at(n_ - 1)] != a_n_ && row[at(n_ - 1)] != b_n_) {
      throw ClassMismatch(std::string(name()) + " saw a value outside agent n's levels");
    }
    rows_.push_back(row);
    return row;
  }
  Action give(int agent, ItemId id) {
    bundles_[at(agent)].push_back(id);
    return {Decision::assign(agent + 1), {}};
  }
  const Rational& value(int agent, ItemId id) const { return rows_[at(id - 1)][at(agent)]; }

  int n_ = 0;
  Rational a_n_, b_n_;
  std::vector<std::vector<ItemId>> bundles_;
  std::vector<std::vector<Rational>> rows_;
};

class AdaptedPicking final : public PickingBase {
 public:
  std::string_view name() const override { return "adapted_picking"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    setup(d, Direction::Goods, n, classes);
  }
  Action step(const ItemView& item) override {
    const auto& row = load(item);
    for (int i = 1; i + 1 < n_; ++i) {
      if (row[at(i)] != row[0]) throw ClassMismatch("adapted_picking needs identical binary agents 1..n-1");
    }
    int last = n_ - 1;
    int i_min = 0;
    for (int i = 1; i < last; ++i) {
      if (bundles_[at(i)].size() < bundles_[at(i_min)].size()) i_min = i;
    }
    auto min_size = static_cast<long>(bundles_[at(i_min)].size());
    long countable = std::count_if(bundles_[at(last)].begin(), bundles_[at(last)].end(),
                                   [&](ItemId g) { return value(i_min, g) > 0; });
    if (row[at(i_min)] == 0) return give(last, item.id);
    if (row[at(last)] == b_n_) return give(countable <= min_size ? last : i_min, item.id);
    return give(countable >= min_size ? i_min : last, item.id);
  }
};

class AdaptedChoresPicking final : public PickingBase {
 public:
  std::string_view name() const override { return "adapted_chores_picking"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    setup(d, Direction::Chores, n, classes);
  }
  Action step(const ItemView& item) override {
    const auto& row = load(item);
    int last = n_ - 1;
    for (int i = 0; i < n_; ++i) {
      if (row[at(i)] == 0) return give(i, item.id);
    }
    auto positive = [&](int i) {
      return static_cast<long>(std::count_if(bundles_[at(i)].begin(), bundles_[at(i)].end(),
                                             [&](ItemId f) { return value(i, f) > 0; }));
    };
    int i_min = 0;
    for (int i = 1; i < last; ++i) {
      if (positive(i) < positive(i_min)) i_min = i;
    }
    long pos = positive(i_min);
    auto size_n = static_cast<long>(bundles_[at(last)].size());
    if (row[at(last)] == a_n_) return give(pos >= size_n ? last : i_min, item.id);
    return give(pos <= size_n ? i_min : last, item.id);
  }
};

class CompelledGreedy final : public Allocator {
 public:
  std::string_view name() const override { return "compelled_greedy"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    require_direction(d, Direction::Chores, name());
    for (const auto& c : classes) {
      if (c.kind != Kind::Binary) throw ClassMismatch("compelled_greedy needs binary costs");
    }
    pi_.resize(at(n));
    std::iota(pi_.begin(), pi_.end(), 0);
  }
  Action step(const ItemView& item) override {
    const auto& row = row_of(item, name());
    for (const auto& c : row) {
      if (c != 0 && c != 1) throw ClassMismatch("compelled_greedy saw a non-binary cost");
    }
    for (int agent : pi_) {
      if (row[at(agent)] == 0) return {Decision::assign(agent + 1), {}};
    }
    int first = pi_.front();
    std::rotate(pi_.begin(), pi_.begin() + 1, pi_.end());
    return {Decision::assign(first + 1), {}};
  }

 private:
  std::vector<int> pi_;
};

class RoundRobin final : public Allocator {
 public:
  std::string_view name() const override { return "round_robin"; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    require_direction(d, Direction::Chores, name());
    for (const auto& c : classes) {
      if (c.kind == Kind::SubmodularBinary || c.kind == Kind::SupermodularBinary) {
        throw ClassMismatch("round_robin needs additive costs");
      }
    }
    n_ = n;
    guard_ = {};
  }
  Action step(const ItemView& item) override {
    guard_.observe(row_of(item, name()));
    return {Decision::assign(((item.id - 1) % n_) + 1), {}};
  }

 private:
  int n_ = 1;
  MonotoneGuard guard_;
};

class DeadlineMatching final : public Allocator {
 public:
  std::string_view name() const override { return "deadline_matching"; }
  bool uses_deadline() const override { return true; }
  void init(Direction d, int n, const std::vector<ValuationClass>& classes, const AllocatorParams&) override {
    require_two(n, name());
    goods_ = d == Direction::Goods;
    levels_ = bivalued_levels(classes, name());
    ledger_.reset(2);
    held_.reset();
  }
  Action step(const ItemView& item) override {
    const auto& row = row_of(item, name());
    for (int k = 0; k < 2; ++k) {
      if (row[at(k)] != levels_[at(k)].first && row[at(k)] != levels_[at(k)].second) {
        throw ClassMismatch("deadline_matching saw a value outside the agent's levels");
      }
    }
    if (!held_) {
      held_ = row;
      return {Decision::hold(), {}};
    }
    std::vector<Rational> e1 = *held_;
    const std::vector<Rational>& e2 = row;
    held_.reset();
    bool first_to_i = goods_ ? pair_goods(e1, e2) : pair_chores(e1, e2);
    int gets_e1 = first_to_i ? i_ : j_;
    int gets_e2 = first_to_i ? j_ : i_;
    ledger_.give(gets_e1, e1);
    ledger_.give(gets_e2, e2);
    return {Decision::assign(gets_e2 + 1), Decision::assign(gets_e1 + 1)};
  }
  std::optional<Decision> flush() override {
    if (!held_) return std::nullopt;
    std::vector<Rational> e1 = *held_;
    held_.reset();
    int target = 0;
    if (roles()) {
      if (goods_) target = e1[at(i_)] == b(i_) ? i_ : j_;
      else target = e1[at(j_)] == b(j_) ? i_ : j_;
    }
    ledger_.give(target, e1);
    return Decision::assign(target + 1);
  }

 private:
  const Rational& b(int k) const { return levels_[at(k)].second; }
  bool envies(int x) const {
    return goods_ ? ledger_.v(x, x) < ledger_.v(x, 1 - x) : ledger_.v(x, x) > ledger_.v(x, 1 - x);
  }
  // Sets i_/j_; returns whether any envy exists. Without envy, i = agent 1.
  bool roles() {
    bool e0 = envies(0);
    bool e1 = envies(1);
    i_ = 0;
    j_ = 1;
    if (!e0 && !e1) return false;
    if (goods_) i_ = e0 ? 0 : 1;  // i envies
    else i_ = e0 ? 1 : 0;         // i does not envy
    j_ = 1 - i_;
    return true;
  }
  // Whether e1 goes to i (and e2 to j).
  bool pair_goods(const std::vector<Rational>& e1, const std::vector<Rational>& e2) {
    if (roles()) {
      if (e1[at(i_)] == b(i_)) return true;
      if (e2[at(i_)] == b(i_)) return false;
      if (e1[at(j_)] == b(j_)) return false;
      return true;
    }
    if (e1[at(i_)] > e2[at(i_)]) return true;
    if (e1[at(i_)] < e2[at(i_)]) return false;
    return !(e1[at(j_)] > e2[at(j_)]);
  }
  bool pair_chores(const std::vector<Rational>& e1, const std::vector<Rational>& e2) {
    if (envies(0) && envies(1)) return mutual_chores(e1, e2);
    if (roles()) {
      if (e1[at(j_)] == b(j_)) return true;
      if (e2[at(j_)] == b(j_)) return false;
      if (e1[at(i_)] == b(i_)) return false;
      return true;
    }
    if (e1[at(j_)] > e2[at(j_)]) return true;
    if (e1[at(j_)] < e2[at(j_)]) return false;
    return !(e1[at(i_)] > e2[at(i_)]);
  }

  // Both agents envy: take the one-each matching that keeps every gap
  // c_x(A_x) - c_x(A_y) within b_x - a_x, agent 1 first on ties.
  bool mutual_chores(const std::vector<Rational>& e1, const std::vector<Rational>& e2) {
    i_ = 0;
    j_ = 1;
    auto fits = [&](const std::vector<Rational>& mine0, const std::vector<Rational>& mine1) {
      Rational gap0 = ledger_.v(0, 0) + mine0[0] - ledger_.v(0, 1) - mine1[0];
      Rational gap1 = ledger_.v(1, 1) + mine1[1] - ledger_.v(1, 0) - mine0[1];
      return gap0 <= b(0) - levels_[0].first && gap1 <= b(1) - levels_[1].first;
    };
    if (fits(e1, e2)) return true;
    return !fits(e2, e1);
  }

  bool goods_ = true;
  std::array<std::pair<Rational, Rational>, 2> levels_;
  Ledger ledger_;
  std::optional<std::vector<Rational>> held_;
  int i_ = 0;
  int j_ = 1;
};

using Factory = std::function<std::unique_ptr<Allocator>()>;

const std::map<std::string, Factory, std::less<>>& registry() {
  static const std::map<std::string, Factory, std::less<>> r = {
      {"greedy_nw", [] { return std::make_unique<GreedyNw>(); }},
      {"marginal_greedy", [] { return std::make_unique<MarginalGreedy>(); }},
      {"bivalued_two_goods", [] { return std::make_unique<BivaluedTwoGoods>(); }},
      {"adapted_picking", [] { return std::make_unique<AdaptedPicking>(); }},
      {"compelled_greedy", [] { return std::make_unique<CompelledGreedy>(); }},
      {"bivalued_two_chores", [] { return std::make_unique<BivaluedTwoChores>(); }},
      {"adapted_chores_picking", [] { return std::make_unique<AdaptedChoresPicking>(); }},
      {"deadline_matching", [] { return std::make_unique<DeadlineMatching>(); }},
      {"round_robin", [] { return std::make_unique<RoundRobin>(); }},
  };
  return r;
}

Stream empty_stream(Direction d, int n, int deadline, Representation r) {
  Stream s;
  s.direction = d;
  s.n = n;
  s.deadline = deadline;
  s.representation = r;
  return s;
}

}  // namespace

std::unique_ptr<Allocator> make_allocator(std::string_view name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw UnknownAlgorithm("unknown algorithm '" + std::string(name) + "'");
  return it->second();
}

std::vector<std::string> allocator_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

Session::Session(Direction direction, int n, int deadline, Representation representation, Allocator& allocator,
                 const std::vector<ValuationClass>& classes, const AllocatorParams& params)
    : allocator_(allocator),
      alloc_(Allocation::empty(direction, n, deadline)),
      oracle_(empty_stream(direction, n, deadline, representation)) {
  if (static_cast<int>(classes.size()) != n) throw ConfigError("one valuation class per agent is required");
  if (allocator.uses_deadline() && deadline != 1) {
    throw DeadlineUnsupported(std::string(allocator.name()) + " needs a deadline-1 stream");
  }
  if (!allocator.uses_deadline() && deadline != 0) {
    throw DeadlineUnsupported(std::string(allocator.name()) + " allocates immediately");
  }
  allocator.init(direction, n, classes, params);
}

ItemView Session::view(const Item& item) const {
  ItemView v;
  v.id = item.id;
  if (const auto* row = std::get_if<AdditiveRow>(&item.payload)) v.values = row->values;
  if (const auto* row = std::get_if<CategoryRow>(&item.payload)) v.categories = row->categories;
  v.marginals.reserve(static_cast<std::size_t>(alloc_.n()));
  for (AgentId i = 1; i <= alloc_.n(); ++i) v.marginals.push_back(oracle_.marginal(i, alloc_.bundle(i), item.id));
  return v;
}

Action Session::offer(const Item& item) {
  oracle_.append(item);
  Action action = allocator_.step(view(item));
  if (action.held) alloc_ = resolve_held(alloc_, *action.held);
  alloc_ = apply_decision(alloc_, item, action.current);
  return action;
}

bool Session::finish() {
  auto d = allocator_.flush();
  if (!d) return false;
  alloc_ = resolve_held(alloc_, *d);
  return true;
}

}  // namespace fairstream
