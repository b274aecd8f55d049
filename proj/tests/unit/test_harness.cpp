#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairstream/harness.hpp"
#include "helpers.hpp"

using namespace fairstream;
using namespace fairstream::test;

namespace {

const std::string kData = FAIRSTREAM_TEST_DATA;

int cli(const std::string& args) {
  std::string cmd = std::string(FAIRSTREAM_CLI) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cli_output(const std::string& args) {
  std::string cmd = std::string(FAIRSTREAM_CLI) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, p)) out.append(buf, got);
  pclose(p);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "fairstream_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("instance files round trip") {
  for (const char* klass : {"binary", "bivalued(1,5)", "trivalued(1,2,7)", "partition-matroid", "supermod-complement",
                            "monotone"}) {
    GenSpec g;
    g.klass = klass;
    g.direction = std::string(klass) == "supermod-complement" ? Direction::Chores : Direction::Goods;
    g.n = 3;
    g.t = 7;
    g.seed = 5;
    Instance inst = generate(g);
    std::stringstream ss;
    write_instance(ss, inst);
    CHECK(read_instance(ss) == inst);
  }
}

TEST_CASE("generator is deterministic and respects classes") {
  GenSpec g;
  g.klass = "bivalued(1,5)";
  g.t = 6;
  g.seed = 7;
  Instance a = generate(g);
  CHECK(a == generate(g));
  CHECK(a.stream.t() == 6);
  for (const auto& item : a.stream.items) {
    for (const auto& v : std::get<AdditiveRow>(item.payload).values) CHECK((v == Rational(1) || v == Rational(5)));
  }
  g.seed = 8;
  CHECK_FALSE(a == generate(g));

  GenSpec m;
  m.klass = "monotone";
  m.direction = Direction::Chores;
  m.n = 3;
  m.t = 9;
  CHECK(is_monotone(ValuationOracle(generate(m).stream)));

  GenSpec bad;
  bad.klass = "hexavalued";
  CHECK_THROWS_AS(generate(bad), ConfigError);
}

TEST_CASE("loading the sample instance") {
  Instance inst = load_instance(kData + "/five_goods.jsonl");
  CHECK(inst.stream == table_stream());
  std::istringstream empty("");
  CHECK(read_instance(empty).stream.t() == 0);
  std::istringstream junk("{\"direction\":\"goods\",\"n\":2}\n{\"values\":[\"1\"]}\n");
  CHECK_THROWS(read_instance(junk));
}

TEST_CASE("bounds") {
  Bound b = parse_bound("EF1>=1/2");
  CHECK(b.metric == Metric::EF1);
  CHECK(b.op == ">=");
  CHECK(b.value == Ratio(q(1, 2)));
  CHECK(parse_bound("MMS<5/3").op == "<");
  CHECK(parse_bound("USW>=inf").value.is_infinite());
  CHECK_THROWS(parse_bound("EF1~1"));
  CHECK_THROWS(parse_bound("XYZ>=1"));
}

TEST_CASE("run report on the sample instance") {
  Instance inst = load_instance(kData + "/five_goods.jsonl");
  RunConfig cfg;
  cfg.algorithm = "marginal_greedy";
  cfg.decisions = assigns({1, 2, 3, 1, 1});
  cfg.bounds = {parse_bound("EF1>=1/2"), parse_bound("MMS>3/4")};
  RunReport rep = run(inst, cfg);
  CHECK(rep.rounds.size() == 5);
  CHECK(rep.summary.welfare == Ratio(q(1, 2)));
  CHECK(rep.final.welfare == Ratio(q(8, 11)));
  CHECK(rep.failed_bounds.size() == 1);
  CHECK_FALSE(rep.passed());
  auto j = to_json(rep);
  CHECK(j["summary"]["ef1"] == "1/2");
  CHECK(to_csv(rep).find("5,1/2,") != std::string::npos);
  CHECK(to_json(rep).dump() == to_json(run(inst, cfg)).dump());
}

TEST_CASE("audit_trace equals the override run") {
  Instance inst = load_instance(kData + "/five_goods.jsonl");
  RunConfig cfg;
  cfg.decisions = assigns({1, 2, 3, 1, 1});
  CHECK(to_json(audit_trace(inst, *cfg.decisions)).dump() == to_json(run(inst, cfg)).dump());
}

TEST_CASE("batch keeps input order") {
  std::vector<Instance> batch;
  for (std::uint64_t s = 0; s < 12; ++s) {
    GenSpec g;
    g.klass = "partition-matroid";
    g.t = 5 + static_cast<int>(s % 4);
    g.seed = s;
    batch.push_back(generate(g));
  }
  RunConfig cfg;
  cfg.algorithm = "marginal_greedy";
  auto serial = run_batch(batch, cfg, 1);
  auto threaded = run_batch(batch, cfg, 4);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t k = 0; k < serial.size(); ++k) CHECK(to_json(serial[k]).dump() == to_json(threaded[k]).dump());
}

TEST_CASE("live play against an adversary") {
  auto adv = builtin_adversary("bivalued_goods");
  auto alloc = make_allocator("bivalued_two_goods");
  AdversaryRun r = play(*adv, *alloc);
  CHECK(r.report.final.ef1 >= Ratio(q(1, 2)));
  CHECK(r.decisions.size() == static_cast<std::size_t>(r.stream.t()));
}

TEST_CASE("cli exit codes") {
  std::string inst = kData + "/five_goods.jsonl";
  std::string dec = kData + "/five_goods_decisions.json";
  CHECK(cli("run -a marginal_greedy -i " + inst + " -d " + dec + " --bound 'EF1>=1/2'") == 0);
  CHECK(cli("run -a marginal_greedy -i " + inst + " -d " + dec + " --bound 'EF1>=3/4'") == 1);
  CHECK(cli("run -a no_such_algorithm -i " + inst) == 2);
  CHECK(cli("run -a marginal_greedy --class partition-matroid --n 3 --t 8 --count 200 --bound 'EF1>=1/2'") == 0);
  CHECK(cli("list") == 0);
  CHECK(cli("search submodbin_fairness --metric EF1") == 0);
  CHECK(cli("adversary nope") == 2);
}

TEST_CASE("cli csv and gen output") {
  std::string csv = cli_output("run -a marginal_greedy -i " + kData + "/five_goods.jsonl -d " + kData +
                               "/five_goods_decisions.json --csv -");
  CHECK(csv.find("4,3/4,") != std::string::npos);
  CHECK(csv.find("5,1/2,") != std::string::npos);
  auto out = scratch("gen.jsonl");
  CHECK(cli("gen --class 'bivalued(1,5)' --t 6 --seed 7 -o " + out.string()) == 0);
  GenSpec g;
  g.klass = "bivalued(1,5)";
  g.t = 6;
  g.seed = 7;
  CHECK(load_instance(out.string()) == generate(g));
}

TEST_CASE("cli drives an external allocator") {
  std::string json = cli_output("adversary trivalued_goods_2 --command " + kData + "/echo_assign_one.sh --json -");
  auto j = nlohmann::json::parse(json);
  CHECK(j.contains("game_value"));
  CHECK(j["report"]["final"]["ef1"] == "0/1");
  CHECK(cli("adversary trivalued_goods_2 --command 'sleep 5' --timeout-ms 200") == 2);
}
