#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairstream/core.hpp"
#include "fairstream/valuations.hpp"

namespace fairstream {

// What an allocator sees when an item arrives.
struct ItemView {
  ItemId id = 0;
  // Additive row, when the stream is additive.
  std::optional<std::vector<Rational>> values;
  // Category labels, when the stream is matroid-backed.
  std::optional<std::vector<Category>> categories;
  // Marginal of the item for each agent against that agent's current bundle.
  std::vector<Rational> marginals;
};

// The decision for the arriving item, plus the resolution of a buffered item
// (deadline streams). The held resolution is applied first.
struct Action {
  Decision current;
  std::optional<Decision> held;
};

struct AllocatorParams {
  // Accept general additive streams whose weights are monotone in arrival order.
  bool monotone = false;
  // marginal_greedy only: skip class checks and scan positive marginals on any stream.
  bool unchecked = false;
};

enum class ControllerMode { Base, Pbc, Dbc };
std::string_view to_string(ControllerMode m);

struct ModeTransition {
  ItemId item = 0;
  ControllerMode from = ControllerMode::Base;
  ControllerMode to = ControllerMode::Base;
  AgentId i = 0;
  AgentId j = 0;
};

class Allocator {
 public:
  virtual ~Allocator() = default;
  virtual std::string_view name() const = 0;
  virtual void init(Direction direction, int n, const std::vector<ValuationClass>& classes,
                    const AllocatorParams& params = {}) = 0;
  virtual Action step(const ItemView& item) = 0;
  // End of stream: resolution for a still-buffered item, if any.
  virtual std::optional<Decision> flush() { return std::nullopt; }
  virtual bool uses_deadline() const { return false; }
  // Two-agent controllers report their mode after the latest step.
  virtual std::optional<ControllerMode> mode() const { return std::nullopt; }
  virtual const std::vector<ModeTransition>& transitions() const;
};

std::unique_ptr<Allocator> make_allocator(std::string_view name);
std::vector<std::string> allocator_names();

// Drives one allocator over items as they arrive, keeping the allocation and
// an oracle that grows with the stream.
class Session {
 public:
  Session(Direction direction, int n, int deadline, Representation representation, Allocator& allocator,
          const std::vector<ValuationClass>& classes, const AllocatorParams& params = {});

  ItemView view(const Item& item) const;
  // Feeds the item, returns the action taken.
  Action offer(const Item& item);
  // Resolves a buffered item at end of stream; returns whether anything changed.
  bool finish();

  const Allocation& allocation() const { return alloc_; }
  const ValuationOracle& oracle() const { return oracle_; }
  Allocator& allocator() { return allocator_; }

 private:
  Allocator& allocator_;
  Allocation alloc_;
  ValuationOracle oracle_;
};

}  // namespace fairstream
