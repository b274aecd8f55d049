#include <doctest.h>

#include "fairstream/harness.hpp"
#include "helpers.hpp"

using namespace fairstream;
using namespace fairstream::test;
using nlohmann::json;

namespace {
const std::string kData = FAIRSTREAM_TEST_DATA;
}

TEST_CASE("reply parsing") {
  CHECK(parse_reply(json{{"decision", "assign"}, {"agent", 2}}, Direction::Goods, 2, false) == Decision::assign(2));
  CHECK(parse_reply(json{{"decision", "discard"}}, Direction::Goods, 2, false) == Decision::discard());
  CHECK(parse_reply(json{{"decision", "hold"}}, Direction::Goods, 2, true) == Decision::hold());
  CHECK_THROWS_AS(parse_reply(json{{"decision", "discard"}}, Direction::Chores, 2, false), ProtocolError);
  CHECK_THROWS_AS(parse_reply(json{{"decision", "hold"}}, Direction::Goods, 2, false), ProtocolError);
  CHECK_THROWS_AS(parse_reply(json{{"decision", "assign"}, {"agent", 3}}, Direction::Goods, 2, false), ProtocolError);
  CHECK_THROWS_AS(parse_reply(json{{"decision", "assign"}}, Direction::Goods, 2, false), ProtocolError);
  CHECK_THROWS_AS(parse_reply(json{{"decision", "swap"}}, Direction::Goods, 2, false), ProtocolError);
  CHECK_THROWS_AS(parse_reply(json::array(), Direction::Goods, 2, false), ProtocolError);
}

TEST_CASE("external allocator plays a scripted adversary") {
  ExternalAllocator ext(kData + "/echo_assign_one.sh", std::chrono::seconds(5));
  auto adv = builtin_adversary("trivalued_goods_2");
  AdversaryRun r = play(*adv, ext);
  REQUIRE_FALSE(r.decisions.empty());
  for (const auto& d : r.decisions) CHECK(d == Decision::assign(1));
  CHECK(r.report.final.ef1 == Ratio(0));
}

TEST_CASE("external allocator errors") {
  {
    ExternalAllocator ext("read h; echo '{\"ack\":true}'; read l; echo '{\"decision\":\"discard\"}'");
    ext.init(Direction::Chores, 2, {});
    ItemView v;
    v.id = 1;
    v.values = std::vector<Rational>{1, 1};
    v.marginals = {1, 1};
    CHECK_THROWS_AS(ext.step(v), ProtocolError);
  }
  {
    ExternalAllocator ext("read h; echo '{\"ack\":true}'; read l; echo not-json");
    ext.init(Direction::Goods, 2, {});
    ItemView v;
    v.id = 1;
    v.values = std::vector<Rational>{1, 1};
    v.marginals = {1, 1};
    CHECK_THROWS_AS(ext.step(v), ProtocolError);
  }
  {
    ExternalAllocator ext("sleep 5", std::chrono::milliseconds(100));
    CHECK_THROWS_AS(ext.init(Direction::Goods, 2, {}), Timeout);
  }
  {
    ExternalAllocator ext("true", std::chrono::seconds(2));
    CHECK_THROWS_AS(ext.init(Direction::Goods, 2, {}), ProtocolError);
  }
}
