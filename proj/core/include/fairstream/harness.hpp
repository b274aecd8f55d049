#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairstream/adversaries.hpp"
#include "fairstream/algorithms.hpp"
#include "fairstream/audit.hpp"
#include "fairstream/core.hpp"
#include "fairstream/valuations.hpp"

namespace fairstream {

// A stream plus the valuation class declared for each agent.
struct Instance {
  Stream stream;
  std::vector<ValuationClass> classes;
  friend bool operator==(const Instance&, const Instance&) = default;
};

// JSONL: one header object, then one object per item. Rationals are "p/q".
Instance read_instance(std::istream& in);
Instance load_instance(const std::string& path);
void write_instance(std::ostream& out, const Instance& instance);
void save_instance(const std::string& path, const Instance& instance);

nlohmann::json item_to_json(const Item& item);
Item item_from_json(const nlohmann::json& j, ItemId id, int n);

// Classes derived from the data when the header does not declare them.
std::vector<ValuationClass> infer_classes(const Stream& stream);

struct GenSpec {
  // binary | bivalued(a,b) | trivalued(a,b,z) | partition-matroid | supermod-complement | monotone
  std::string klass = "binary";
  Direction direction = Direction::Goods;
  int n = 2;
  int t = 6;
  std::uint64_t seed = 0;
  int categories = 4;    // matroid generators: labels per agent
  int max_weight = 10;   // monotone generator: weights drawn from 0..max_weight
  int deadline = 0;
  // Probability in [0,1] that a matroid item is a loop for a given agent.
  double loop_rate = 0.15;
  // Optional per-agent class strings overriding `klass` for additive classes.
  std::vector<std::string> agent_classes;
  // Agents 1..n-1 share one binary row (picking instances).
  bool identical_binary = false;
};

Instance generate(const GenSpec& spec);

struct Bound {
  Metric metric = Metric::EF1;
  std::string op = ">=";
  Ratio value;
  std::string str() const;
};
// "EF1>=1/2", "MMS<=5/3", "USW>=1/2" ...
Bound parse_bound(std::string_view text);

struct RunConfig {
  std::string algorithm;
  AllocatorParams params;
  AuditOptions audit;
  // When set, these decisions replace the algorithm's (one per round).
  std::optional<std::vector<Decision>> decisions;
  std::vector<Bound> bounds;
};

struct RoundRecord {
  RoundMetrics metrics;
  std::optional<ControllerMode> mode;
  std::vector<Decision> decisions;  // held resolution first, then the arrival
};

struct Summary {
  std::optional<Ratio> ef1;
  std::optional<Ratio> mms;
  std::optional<Ratio> welfare;
};

struct RunReport {
  std::string algorithm;
  Direction direction = Direction::Goods;
  int n = 0;
  int t = 0;
  std::vector<RoundRecord> rounds;
  Summary summary;
  Summary final;
  int constraint_violations = 0;
  int skipped_mms = 0;
  int skipped_welfare = 0;
  std::vector<std::string> failed_bounds;
  std::vector<ModeTransition> transitions;
  Allocation allocation;
  double wall_ms = 0;
  std::uint64_t enumeration_nodes = 0;

  bool passed() const { return failed_bounds.empty() && constraint_violations == 0; }
};

// Streams the instance through the allocator (or the configured decisions) and
// audits every round; deadline runs are audited only when nothing is held.
RunReport run(const Instance& instance, const RunConfig& config);
RunReport run_with(const Instance& instance, Allocator& allocator, const RunConfig& config);
// Re-audits a recorded trace of decisions.
RunReport audit_trace(const Instance& instance, const std::vector<Decision>& decisions, const RunConfig& config = {});

// Runs independent instances on worker threads; results keep input order.
std::vector<RunReport> run_batch(const std::vector<Instance>& instances, const RunConfig& config,
                                 unsigned threads = 1);

nlohmann::json to_json(const RunReport& report, bool timing = false);
std::string to_csv(const RunReport& report);

struct AdversaryRun {
  RunReport report;
  Stream stream;
  std::vector<Decision> decisions;
};

// Plays the adversary live against an allocator.
AdversaryRun play(const Adversary& adversary, Allocator& allocator, const AllocatorParams& params = {},
                  const AuditOptions& audit = {});

// Third-party allocator speaking the stdio line protocol through a child process.
class ExternalAllocator final : public Allocator {
 public:
  explicit ExternalAllocator(std::string command, std::chrono::milliseconds timeout = std::chrono::seconds(10),
                             Representation representation = Representation::Additive);
  ~ExternalAllocator() override;
  ExternalAllocator(const ExternalAllocator&) = delete;
  ExternalAllocator& operator=(const ExternalAllocator&) = delete;

  std::string_view name() const override { return name_; }
  void init(Direction direction, int n, const std::vector<ValuationClass>& classes,
            const AllocatorParams& params = {}) override;
  Action step(const ItemView& item) override;
  std::optional<Decision> flush() override;
  bool uses_deadline() const override { return deadline_ == 1; }
  void set_deadline(int d) { deadline_ = d; }

 private:
  void send(const nlohmann::json& message);
  nlohmann::json receive();
  Decision read_decision(bool allow_hold);
  void shutdown();

  std::string command_;
  std::string name_;
  std::chrono::milliseconds timeout_;
  Representation representation_;
  Direction direction_ = Direction::Goods;
  int n_ = 0;
  int deadline_ = 0;
  int round_ = 0;
  std::optional<ItemId> held_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// Parses one client reply line into a decision, enforcing the session's rules.
Decision parse_reply(const nlohmann::json& reply, Direction direction, int n, bool allow_hold);

}  // namespace fairstream
