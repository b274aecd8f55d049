#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairstream/audit.hpp"
#include "fairstream/core.hpp"
#include "fairstream/valuations.hpp"

namespace fairstream {

enum class Constraint { NW, Complete };
enum class Metric { EF1, MMS, USW, USC };

std::string_view to_string(Constraint c);
std::string_view to_string(Metric m);
Constraint parse_constraint(std::string_view s);
Metric parse_metric(std::string_view s);

inline const Rational kDefaultEpsilon{1, 10};

// Evaluates expressions such as "1", "eps", "eps^-1", "2*eps^2", "1+eps" at a given epsilon.
Rational eval_expression(std::string_view text, const Rational& epsilon);

// Adaptive item source. next() is a pure function of the decision history.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  virtual Direction direction() const = 0;
  virtual int n() const = 0;
  virtual Representation representation() const = 0;
  virtual Constraint constraint() const = 0;
  virtual std::optional<Rational> epsilon() const { return std::nullopt; }
  // Declared per-agent classes, when the construction fixes them.
  virtual std::vector<ValuationClass> classes() const { return {}; }
  // The item for round history.size()+1, or nullopt to stop.
  virtual std::optional<Item> next(const std::vector<Decision>& history) const = 0;
};

// A case-tree adversary loaded from its JSON description.
class ScriptedAdversary final : public Adversary {
 public:
  ScriptedAdversary(std::string name, const nlohmann::json& doc, Rational epsilon);

  std::string name() const override { return name_; }
  Direction direction() const override { return direction_; }
  int n() const override { return n_; }
  Representation representation() const override { return representation_; }
  Constraint constraint() const override { return constraint_; }
  std::optional<Rational> epsilon() const override { return epsilon_; }
  std::vector<ValuationClass> classes() const override { return classes_; }
  std::optional<Item> next(const std::vector<Decision>& history) const override;

  // Incremental replay state. The script labels agents; perm maps each real
  // agent to its script label and may swap indistinguishable agents.
  struct Cursor {
    const nlohmann::json* node = nullptr;
    std::vector<int> perm;
    std::vector<Item> items;
    Allocation alloc;
  };
  Cursor start() const;
  // Item offered at the cursor, or nullopt at a stop.
  std::optional<Item> current(const Cursor& c) const;
  // Follows one decision; the cursor's node becomes null when the script stops.
  Cursor advance(Cursor c, const Decision& d) const;

  const nlohmann::json& document() const { return doc_; }

 private:
  Payload payload(const nlohmann::json& node, const std::vector<int>& perm) const;

  std::string name_;
  nlohmann::json doc_;
  Rational epsilon_;
  Direction direction_ = Direction::Goods;
  int n_ = 2;
  Representation representation_ = Representation::Additive;
  Constraint constraint_ = Constraint::NW;
  std::vector<ValuationClass> classes_;
};

// Replays a fixed stream regardless of decisions.
class StreamAdversary final : public Adversary {
 public:
  StreamAdversary(Stream stream, Constraint constraint, std::string name = "stream");
  std::string name() const override { return name_; }
  Direction direction() const override { return stream_.direction; }
  int n() const override { return stream_.n; }
  Representation representation() const override { return stream_.representation; }
  Constraint constraint() const override { return constraint_; }
  std::optional<Item> next(const std::vector<Decision>& history) const override;

 private:
  Stream stream_;
  Constraint constraint_;
  std::string name_;
};

std::vector<std::string> builtin_adversary_names();
std::unique_ptr<ScriptedAdversary> builtin_adversary(std::string_view name, Rational epsilon = kDefaultEpsilon);

// Restricts a game to paths whose end-of-stream fairness passes a bound.
struct Gate {
  Metric metric = Metric::EF1;
  std::string op = ">=";  // one of >=, >, <=, <
  Ratio bound;
  bool admits(const Ratio& value) const;
  std::string str() const;
};

struct GameQuery {
  Metric metric = Metric::EF1;
  std::optional<Constraint> constraint;  // defaults to the adversary's
  std::optional<Gate> gate;
};

struct GameOptions {
  std::uint64_t budget = default_budget();
  unsigned threads = 1;
  bool record_tree = false;
};

struct GameValue {
  Metric metric = Metric::EF1;
  // False when no decision path is legal under the constraint (and gate).
  bool feasible = false;
  Ratio value;
  std::vector<Decision> witness;
  Allocation final_allocation;
  std::uint64_t paths = 0;
  std::uint64_t legal_paths = 0;
  nlohmann::json tree;  // filled when record_tree is set
};

// Best end-of-stream metric over all legal decision paths: max for goods, min for chores.
GameValue solve_game(const Adversary& adversary, const GameQuery& query, const GameOptions& options = {});
GameValue game_value_at_epsilon(std::string_view name, Metric metric, Rational epsilon,
                                const GameOptions& options = {});

// Plays decisions through the adversary and returns the final stream and allocation.
struct Playthrough {
  Stream stream;
  Allocation allocation;
};
Playthrough replay(const Adversary& adversary, const std::vector<Decision>& decisions);

// End-of-stream metric of a finished allocation.
Ratio final_metric(Metric metric, const Allocation& alloc, const ValuationOracle& oracle,
                   std::uint64_t budget = default_budget());
bool satisfies(Constraint constraint, const Allocation& alloc, const ValuationOracle& oracle);

nlohmann::json to_json(const GameValue& g);

}  // namespace fairstream
