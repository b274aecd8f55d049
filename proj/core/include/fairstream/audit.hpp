#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fairstream/core.hpp"
#include "fairstream/valuations.hpp"

namespace fairstream {

inline constexpr std::uint64_t kDefaultBudget = 1594323;  // 3^13

// FAIRSTREAM_BUDGET if set and valid, else kDefaultBudget.
std::uint64_t default_budget();

struct EnumerationCounter {
  std::uint64_t nodes = 0;
};

// Capped (goods) or floored (chores) EF1 ratio.
Ratio ef1_ratio(const Allocation& alloc, const ValuationOracle& oracle);
// Same fold without the cap/floor.
Ratio ef1_raw(const Allocation& alloc, const ValuationOracle& oracle);

// Exact maximin (goods) / minimax (chores) share of `agent` over the first k items.
Rational mms_share(AgentId agent, int k, int n, const ValuationOracle& oracle,
                   std::uint64_t budget = default_budget(), EnumerationCounter* counter = nullptr);
Ratio mms_ratio(const Allocation& alloc, const ValuationOracle& oracle, std::uint64_t budget = default_budget(),
                EnumerationCounter* counter = nullptr);
Ratio mms_raw(const Allocation& alloc, const ValuationOracle& oracle, std::uint64_t budget = default_budget(),
              EnumerationCounter* counter = nullptr);

// Max USW (goods) / min USC (chores) over complete assignments of the first k items.
Rational optimal_welfare(int k, int n, const ValuationOracle& oracle, std::uint64_t budget = default_budget(),
                         EnumerationCounter* counter = nullptr);
Rational welfare(const Allocation& alloc, const ValuationOracle& oracle);
// USW/max-USW (goods) or USC/min-USC (chores), zero denominators per Ratio::of.
Ratio welfare_ratio(const Allocation& alloc, const ValuationOracle& oracle, std::uint64_t budget = default_budget(),
                    EnumerationCounter* counter = nullptr);

bool check_nw(const Allocation& alloc, const ValuationOracle& oracle);
bool check_complete(const Allocation& alloc);

struct RoundMetrics {
  int round = 0;
  Ratio ef1;
  Ratio ef1_raw;
  std::optional<Ratio> mms;  // nullopt when the enumeration budget was exceeded
  std::optional<Ratio> mms_raw;
  std::optional<Ratio> welfare;
  Rational welfare_value;
  std::optional<Rational> welfare_optimum;
  std::optional<bool> nw_ok;        // goods
  std::optional<bool> complete_ok;  // chores
};

struct AuditOptions {
  std::uint64_t budget = default_budget();
  bool mms = true;
  bool welfare = true;
};

RoundMetrics audit_round(const Allocation& alloc, const ValuationOracle& oracle, const AuditOptions& options = {},
                         EnumerationCounter* counter = nullptr);

}  // namespace fairstream
