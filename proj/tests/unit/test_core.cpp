#include <doctest.h>

#include "fairstream/core.hpp"
#include "helpers.hpp"

using namespace fairstream;
using namespace fairstream::test;

TEST_CASE("decision parse and print") {
  CHECK(Decision::parse("assign(2)") == Decision::assign(2));
  CHECK(Decision::parse("3") == Decision::assign(3));
  CHECK(Decision::parse("discard") == Decision::discard());
  CHECK(Decision::parse("hold") == Decision::hold());
  CHECK(Decision::assign(4).str() == "assign(4)");
  CHECK_THROWS(Decision::parse("give"));
  CHECK_THROWS(Decision::parse("assign(x)"));
}

TEST_CASE("apply_decision bookkeeping") {
  Stream s = additive(Direction::Goods, 2, {{1, 2}, {3, 4}});
  Allocation a = apply_decision(Allocation::empty(s), s.items[0], Decision::assign(1));
  CHECK(a.bundle(1) == std::vector<ItemId>{1});
  CHECK(a.round == 1);
  a = apply_decision(std::move(a), s.items[1], Decision::discard());
  CHECK(a.discarded == std::vector<ItemId>{2});
  CHECK(a.round == 2);
  CHECK(a.owner(1) == 1);
  CHECK_FALSE(a.owner(2).has_value());
}

TEST_CASE("apply_decision rejects illegal moves") {
  Stream goods = additive(Direction::Goods, 2, {{1, 2}, {3, 4}});
  CHECK_THROWS_AS(apply_decision(Allocation::empty(goods), goods.items[0], Decision::assign(3)), IllegalDecision);
  CHECK_THROWS_AS(apply_decision(Allocation::empty(goods), goods.items[0], Decision::assign(0)), IllegalDecision);
  CHECK_THROWS_AS(apply_decision(Allocation::empty(goods), goods.items[1], Decision::assign(1)), IllegalDecision);
  CHECK_THROWS_AS(apply_decision(Allocation::empty(goods), goods.items[0], Decision::hold()), IllegalDecision);

  Stream chores = additive(Direction::Chores, 2, {{1, 2}});
  CHECK_THROWS_AS(apply_decision(Allocation::empty(chores), chores.items[0], Decision::discard()), IllegalDecision);
}

TEST_CASE("deadline hold must be resolved before the next hold") {
  Stream s = additive(Direction::Goods, 2, {{1, 2}, {3, 4}, {5, 6}}, 1);
  Allocation a = apply_decision(Allocation::empty(s), s.items[0], Decision::hold());
  CHECK(a.held == 1);
  CHECK(a.round == 1);
  CHECK_THROWS_AS(apply_decision(a, s.items[1], Decision::hold()), IllegalDecision);
  CHECK_THROWS_AS(resolve_held(a, Decision::hold()), IllegalDecision);
  a = resolve_held(std::move(a), Decision::assign(2));
  CHECK_FALSE(a.held);
  CHECK(a.bundle(2) == std::vector<ItemId>{1});
  a = apply_decision(std::move(a), s.items[1], Decision::hold());
  CHECK(a.held == 2);
  a.check_invariants();
}

TEST_CASE("prefix items") {
  Stream s = table_stream();
  CHECK(prefix_items(s, 0).empty());
  CHECK(prefix_items(s, 3) == std::vector<ItemId>{1, 2, 3});
  CHECK(prefix_items(s, 5).size() == 5);
  CHECK_THROWS_AS(prefix_items(s, 6), OutOfRange);
  CHECK_THROWS_AS(prefix_items(s, -1), OutOfRange);
  CHECK(prefix_stream(s, 2).t() == 2);
}

TEST_CASE("stream validation") {
  Stream s = table_stream();
  CHECK_NOTHROW(s.validate());
  s.items[2].id = 7;
  CHECK_THROWS(s.validate());
  Stream bad = additive(Direction::Goods, 2, {{1, 2, 3}});
  CHECK_THROWS(bad.validate());
  Stream neg = additive(Direction::Goods, 2, {{-1, 2}});
  CHECK_THROWS(neg.validate());
}

TEST_CASE("conservation holds through a run") {
  Stream s = table_stream();
  Allocation a = Allocation::empty(s);
  const Decision ds[] = {Decision::assign(1), Decision::discard(), Decision::assign(3), Decision::assign(1),
                         Decision::assign(2)};
  for (int k = 0; k < 5; ++k) {
    a = apply_decision(std::move(a), s.items[static_cast<std::size_t>(k)], ds[k]);
    std::size_t total = a.discarded.size();
    for (const auto& b : a.bundles) total += b.size();
    CHECK(total == static_cast<std::size_t>(a.round));
  }
}
