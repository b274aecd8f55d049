#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "fairstream/harness.hpp"

namespace fairstream::test {

inline Rational q(std::int64_t p, std::int64_t d = 1) { return Rational(p, d); }

inline Stream additive(Direction d, int n, std::initializer_list<std::initializer_list<Rational>> rows, int deadline = 0) {
  Stream s;
  s.direction = d;
  s.n = n;
  s.deadline = deadline;
  int id = 0;
  for (const auto& row : rows) s.items.push_back({++id, AdditiveRow{std::vector<Rational>(row)}});
  return s;
}

inline Stream matroid(Direction d, int n, std::initializer_list<std::initializer_list<Category>> rows) {
  Stream s;
  s.direction = d;
  s.n = n;
  s.representation = Representation::Matroid;
  int id = 0;
  for (const auto& row : rows) s.items.push_back({++id, CategoryRow{std::vector<Category>(row)}});
  return s;
}

// The five-item, three-agent goods stream used across the audit tests.
inline Stream table_stream() {
  return additive(Direction::Goods, 3, {{6, 5, 12}, {4, 8, 6}, {5, 10, 6}, {9, 2, 8}, {3, 5, 4}});
}

inline Allocation allocate(const Stream& s, const std::vector<Decision>& decisions) {
  Allocation a = Allocation::empty(s);
  for (std::size_t k = 0; k < decisions.size(); ++k) a = apply_decision(std::move(a), s.items.at(k), decisions[k]);
  return a;
}

inline std::vector<Decision> assigns(std::initializer_list<int> agents) {
  std::vector<Decision> out;
  for (int a : agents) out.push_back(Decision::assign(a));
  return out;
}

inline Instance instance(Stream s) {
  Instance inst;
  inst.classes = infer_classes(s);
  inst.stream = std::move(s);
  return inst;
}

// Decisions the named algorithm takes on the stream, held resolutions first.
inline std::vector<Decision> decisions_of(const std::string& algorithm, const Stream& s, AllocatorParams params = {}) {
  RunConfig cfg;
  cfg.algorithm = algorithm;
  cfg.params = params;
  cfg.audit.mms = false;
  cfg.audit.welfare = false;
  RunReport rep = run(instance(s), cfg);
  std::vector<Decision> out;
  for (const auto& r : rep.rounds) out.insert(out.end(), r.decisions.begin(), r.decisions.end());
  return out;
}

}  // namespace fairstream::test
