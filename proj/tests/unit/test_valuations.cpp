#include <doctest.h>

#include "fairstream/valuations.hpp"
#include "helpers.hpp"

using namespace fairstream;
using namespace fairstream::test;

namespace {
std::vector<ItemId> ids(std::initializer_list<ItemId> l) { return l; }
}  // namespace

TEST_CASE("additive values") {
  ValuationOracle o(table_stream());
  CHECK(set_value(o, 3, ids({1, 4})) == Rational(20));
  CHECK(set_value(o, 2, ids({})) == Rational(0));
  CHECK(marginal(o, 1, ids({2, 3}), 4) == Rational(9));
  CHECK(o.weight(2, 3) == Rational(10));
  CHECK_THROWS_AS(set_value(o, 1, ids({6})), UnknownItem);
  CHECK_THROWS(set_value(o, 4, ids({1})));
}

TEST_CASE("partition matroid rank") {
  Stream s = matroid(Direction::Goods, 2, {{"red", "x"}, {"red", "y"}, {"blue", std::nullopt}});
  ValuationOracle o(s);
  CHECK(set_value(o, 1, ids({1, 2, 3})) == Rational(2));
  CHECK(marginal(o, 1, ids({1}), 2) == Rational(0));
  CHECK(marginal(o, 1, ids({1}), 3) == Rational(1));
  CHECK(marginal(o, 2, ids({}), 3) == Rational(0));
  CHECK(o.category(2, 3) == -1);
  CHECK(classify(o, 1).kind == ValuationClass::Kind::SubmodularBinary);
}

TEST_CASE("supermodular complement cost") {
  Stream s = matroid(Direction::Chores, 1, {{"red"}, {"red"}, {"blue"}});
  ValuationOracle o(s);
  CHECK(marginal(o, 1, ids({1}), 3) == Rational(0));
  CHECK(marginal(o, 1, ids({1}), 2) == Rational(1));
  CHECK(set_value(o, 1, ids({1, 2, 3})) == Rational(1));
  CHECK(classify(o, 1).kind == ValuationClass::Kind::SupermodularBinary);
}

TEST_CASE("explicit set function") {
  Stream s;
  s.n = 1;
  s.representation = Representation::SetFunction;
  s.items.push_back({1, SetFunctionRow{{{{0, Rational(2)}}}}});
  s.items.push_back({2, SetFunctionRow{{{{0, Rational(1)}, {1, Rational(2)}}}}});
  ValuationOracle o(s);
  CHECK(set_value(o, 1, ids({1, 2})) == Rational(2));
  CHECK(marginal(o, 1, ids({1}), 2) == Rational(0));
  CHECK(set_value(o, 1, ids({2})) == Rational(1));
}

TEST_CASE("oracle grows with the stream") {
  Stream s = table_stream();
  ValuationOracle o(prefix_stream(s, 2));
  CHECK(o.t() == 2);
  CHECK_THROWS_AS(o.weight(1, 3), UnknownItem);
  o.append(s.items[2]);
  CHECK(o.weight(1, 3) == Rational(5));
}

TEST_CASE("classify additive classes") {
  Stream bin = additive(Direction::Goods, 1, {{0}, {1}, {1}});
  CHECK(classify(ValuationOracle(bin), 1) == ValuationClass::binary());
  Stream bi = additive(Direction::Goods, 1, {{q(1, 10)}, {1}});
  CHECK(classify(ValuationOracle(bi), 1) == ValuationClass::bivalued(q(1, 10), 1));
  Stream tri = additive(Direction::Goods, 1, {{q(1, 10)}, {1}, {10}});
  CHECK(classify(ValuationOracle(tri), 1) == ValuationClass::trivalued(q(1, 10), 1, 10));
  Stream gen = additive(Direction::Goods, 1, {{1}, {2}, {3}, {4}});
  CHECK(classify(ValuationOracle(gen), 1).kind == ValuationClass::Kind::GeneralAdditive);
}

TEST_CASE("class strings round trip") {
  for (const char* text : {"binary", "bivalued(1/1,5/1)", "trivalued(1/10,1/1,10/1)", "additive", "submodular-binary",
                           "supermodular-binary"}) {
    CHECK(ValuationClass::parse(text).str() == text);
  }
  CHECK(ValuationClass::parse("bivalued(1,5)") == ValuationClass::bivalued(1, 5));
  CHECK(ValuationClass::bivalued(1, 5).admits(5));
  CHECK_FALSE(ValuationClass::bivalued(1, 5).admits(2));
  CHECK_THROWS(ValuationClass::parse("bivalued(5,1)"));
  CHECK_THROWS(ValuationClass::parse("quadvalued"));
}

TEST_CASE("monotone detection") {
  CHECK(is_monotone(ValuationOracle(additive(Direction::Chores, 2, {{1, 1}, {2, 4}, {2, 5}}))));
  CHECK(is_monotone(ValuationOracle(additive(Direction::Chores, 2, {{3, 5}, {2, 4}, {2, 1}}))));
  // One direction must hold for every agent.
  CHECK_FALSE(is_monotone(ValuationOracle(additive(Direction::Chores, 2, {{1, 5}, {2, 4}, {2, 1}}))));
  CHECK_FALSE(is_monotone(ValuationOracle(additive(Direction::Chores, 2, {{1, 1}, {3, 4}, {2, 5}}))));
}
