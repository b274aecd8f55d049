#pragma once

// Literal-definition evaluators for tests. Nothing here calls the audit or the
// valuation oracle; values are read straight off the stream rows.

#include <cstdint>
#include <vector>

#include "fairstream/core.hpp"
#include "fairstream/rational.hpp"

namespace fairstream::oracle {

enum class Def { EF1Goods, EF1Chores, MMSGoods, MMSChores, USW, USC, NW, Complete };

// v_i(S) or c_i(S) for items of the stream.
Rational value(const Stream& stream, AgentId agent, const std::vector<ItemId>& set);

// Best worst-bundle over every assignment of items 1..k to n bundles.
Rational share(const Stream& stream, AgentId agent, int k, std::uint64_t budget = 1000000);
// Best welfare over every complete assignment of items 1..k.
Rational best_welfare(const Stream& stream, int k, std::uint64_t budget = 1000000);

// Capped (goods) / floored (chores) ratio; NW and Complete give 1 or 0.
Ratio literal_metric(Def def, const Allocation& alloc, const Stream& stream, std::uint64_t budget = 1000000);

}  // namespace fairstream::oracle
