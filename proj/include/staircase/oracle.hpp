#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "staircase/construction.hpp"
#include "staircase/level_set.hpp"

namespace staircase::oracle {

/// Brute-force cell counting at one deep stage. Shares no layout or
/// refinement code with the certified path: it re-derives heights and column
/// offsets from the construction parameters with machine integers.
///
/// |true value - value| <= error_bound.
struct OracleResult {
  Rational value;
  Rational error_bound;

  Rational lo() const { return value - error_bound; }
  Rational hi() const { return value + error_bound; }
};

/// Largest materializable tower.
inline constexpr std::int64_t kMaxCells = 1'000'000;

/// Deepest stage whose tower has at most kMaxCells levels (at least `at_least`).
int deepest_stage(const ConstructionParams& params, int at_least = 1);

/// mu(T^m A ∩ B) counted on the cells of tower K.
OracleResult oracle_measure_intersection(const ConstructionParams& params, const LevelSet& A, const LevelSet& B,
                                         std::int64_t m, int K);

struct Instance {
  LevelSet A, B;
  Int m;
  int K = 0;  // 0 selects deepest_stage
  Rational tol{1, 1 << 20};
};

struct CheckEntry {
  std::size_t index = 0;
  Interval certified;  // mu(A ∩ T^m B) from the dynamics module
  OracleResult oracle;  // mu(T^m B ∩ A) by counting
  int K = 0;
  bool compatible = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  std::size_t failures = 0;
  bool ok() const { return failures == 0; }
};

CheckReport oracle_check(StageTable& table, const std::vector<Instance>& instances);

}  // namespace staircase::oracle
