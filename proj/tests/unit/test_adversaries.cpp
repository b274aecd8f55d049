#include <doctest.h>

#include "fairstream/adversaries.hpp"
#include "helpers.hpp"
#include "literal.hpp"

using namespace fairstream;
using namespace fairstream::test;

namespace {
const std::vector<Rational>& row(const std::optional<Item>& item) { return std::get<AdditiveRow>(item->payload).values; }
}  // namespace

TEST_CASE("expressions") {
  Rational e = q(1, 10);
  CHECK(eval_expression("eps", e) == e);
  CHECK(eval_expression("eps^-1", e) == Rational(10));
  CHECK(eval_expression("2*eps^2", e) == q(1, 50));
  CHECK(eval_expression("1+eps", e) == q(11, 10));
  CHECK(eval_expression("1-eps", e) == q(9, 10));
  CHECK(eval_expression("3/4", e) == q(3, 4));
  CHECK_THROWS(eval_expression("eps^", e));
  CHECK_THROWS(eval_expression("foo", e));
}

TEST_CASE("builtin catalogue") {
  auto names = builtin_adversary_names();
  CHECK(names.size() == 18);
  for (const auto& n : names) CHECK_NOTHROW(builtin_adversary(n));
  CHECK_THROWS_AS(builtin_adversary("nope"), UnknownAdversary);
}

TEST_CASE("scripted items follow the decision history") {
  auto tg = builtin_adversary("trivalued_goods_2");
  CHECK(row(tg->next({Decision::assign(1)})) == std::vector<Rational>{10, q(1, 10)});

  auto bg = builtin_adversary("bivalued_goods");
  std::vector<Decision> h = assigns({1, 2, 1});
  CHECK(row(bg->next(h)) == std::vector<Rational>{1, 1});
  h.push_back(Decision::assign(1));
  CHECK_FALSE(bg->next(h).has_value());
}

TEST_CASE("identical preference chores emits five items on the scripted path") {
  auto adv = builtin_adversary("identical_pref_chores");
  std::vector<Decision> h = assigns({1, 2, 1, 2});
  CHECK(row(adv->next(assigns({1, 2}))) == std::vector<Rational>{10, 10});
  CHECK(row(adv->next(h)) == std::vector<Rational>{10, 10});
  h.push_back(Decision::assign(2));
  CHECK_FALSE(adv->next(h).has_value());
}

TEST_CASE("solve_game on a one-item stream") {
  Stream s = additive(Direction::Goods, 2, {{1, 1}});
  StreamAdversary adv(s, Constraint::NW);
  GameQuery qy;
  qy.metric = Metric::EF1;
  GameValue gv = solve_game(adv, qy);
  CHECK(gv.feasible);
  CHECK(gv.value == Ratio(1));
  CHECK(gv.witness.size() == 1);
}

TEST_CASE("certified game values") {
  CHECK(game_value_at_epsilon("submodbin_fairness", Metric::EF1, kDefaultEpsilon).value == Ratio(q(1, 2)));
  CHECK(game_value_at_epsilon("bivalued_chores_mms", Metric::MMS, kDefaultEpsilon).value == Ratio(q(3, 2)));
  // The search finds an EF1 completion on the first case's path.
  GameValue sm = game_value_at_epsilon("supermod_ef1", Metric::EF1, kDefaultEpsilon);
  CHECK(sm.value == Ratio(1));
  Playthrough p = replay(*builtin_adversary("supermod_ef1"), sm.witness);
  CHECK(oracle::literal_metric(oracle::Def::EF1Chores, p.allocation, p.stream) == Ratio(1));
  CHECK(game_value_at_epsilon("trivalued_goods_2", Metric::EF1, kDefaultEpsilon).value == Ratio(q(1, 10)));
  GameValue bg = game_value_at_epsilon("bivalued_goods", Metric::EF1, kDefaultEpsilon);
  CHECK(bg.value > Ratio(kDefaultEpsilon));
  CHECK(bg.value <= Ratio(q(1, 2)));
  CHECK_FALSE(game_value_at_epsilon("submod_nw", Metric::USW, kDefaultEpsilon).feasible);
}

TEST_CASE("witness replays to the reported value") {
  for (const char* name : {"trivalued_goods_2", "bivalued_chores", "identical_pref"}) {
    auto adv = builtin_adversary(name);
    GameQuery qy;
    qy.metric = Metric::EF1;
    GameValue gv = solve_game(*adv, qy);
    Playthrough p = replay(*adv, gv.witness);
    auto def = p.stream.direction == Direction::Goods ? oracle::Def::EF1Goods : oracle::Def::EF1Chores;
    CHECK(oracle::literal_metric(def, p.allocation, p.stream) == gv.value);
  }
}

TEST_CASE("gates") {
  Gate g{Metric::EF1, ">=", Ratio(q(1, 2))};
  CHECK(g.admits(Ratio(1)));
  CHECK_FALSE(g.admits(Ratio(q(1, 3))));
  Gate l{Metric::MMS, "<", Ratio(2)};
  CHECK(l.admits(Ratio(1)));
  CHECK_FALSE(l.admits(Ratio::infinity()));
}

TEST_CASE("game search budget") {
  auto adv = builtin_adversary("bivalued_goods");
  GameQuery qy;
  GameOptions opts;
  opts.budget = 2;
  CHECK_THROWS_AS(solve_game(*adv, qy, opts), BudgetExceeded);
}

TEST_CASE("threaded search agrees") {
  auto adv = builtin_adversary("identical_pref");
  GameQuery qy;
  GameOptions one;
  GameOptions many;
  many.threads = 3;
  CHECK(solve_game(*adv, qy, one).value == solve_game(*adv, qy, many).value);
}
