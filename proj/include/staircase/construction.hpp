#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <variant>
#include <vector>

#include "staircase/level_set.hpp"
#include "staircase/numeric.hpp"

namespace staircase {

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

/// s_j(i) = i - 1.
struct StaircaseSpacers {};
/// s_j(i) = k for every column.
struct ConstantSpacers {
  Int k;
};
/// per_stage[j-1] lists s_j(1..r_j).
struct ExplicitSpacers {
  std::vector<std::vector<Int>> per_stage;
};

using SpacerPolicy = std::variant<StaircaseSpacers, ConstantSpacers, ExplicitSpacers>;

/// r_j = cuts[j-1]; undefined past the end of the list.
struct ExplicitCuts {
  std::vector<Int> cuts;
};
/// r_j = a*j + b.
struct AffineCuts {
  Int a, b;
};
/// r_j = h_j.
struct EqualHeightCuts {};

using CutPolicy = std::variant<ExplicitCuts, AffineCuts, EqualHeightCuts>;

struct ConstructionParams {
  Int h1 = 1;
  CutPolicy cuts = AffineCuts{1, 1};
  SpacerPolicy spacers = StaircaseSpacers{};
  Rational base_width = 1;

  void validate() const;
};

/// Evaluates r_j for a stage of height h, or nullopt when the policy has no
/// value there. Throws PolicyUndefined for values below 2.
std::optional<Int> evaluate_cut(const CutPolicy& policy, int j, const Int& h);

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

struct Stage {
  int j = 1;
  Int h;                 // roof index; the tower has h + 1 levels
  std::optional<Int> r;  // cut count used to build stage j + 1
  Rational w;            // width of one level
  Rational total;        // (h + 1) * w
  Int spacer_sum;        // sum of s_j(i) over i = 1..r (0 when r is unknown)
  // Prefix offsets for explicit spacer policies only: offsets[i-1] = o_i.
  std::vector<Int> explicit_offsets;
};

/// Position of a level of tower j + 1 relative to the columns of tower j.
struct ColumnHit {
  Int column;  // i in [1, r_j]
  Int offset;  // n - o_i; in-tower when offset <= h_j, otherwise spacer offset - h_j
};

/// Append-only record of the cutting-and-stacking recursion.
///
/// Reads are safe from many threads; extend_to takes an exclusive lock and
/// never touches existing stages, so references returned by stage() stay valid.
class StageTable {
 public:
  explicit StageTable(ConstructionParams params);

  StageTable(StageTable&&) noexcept = default;
  StageTable& operator=(StageTable&&) noexcept = default;

  const ConstructionParams& params() const noexcept { return params_; }

  int depth() const;
  const Stage& stage(int j) const;

  /// Builds stages up to J. Throws PolicyUndefined when the cut policy has no
  /// value for a needed stage.
  void extend_to(int J);
  /// Same as extend_to but reports exhaustion instead of throwing.
  bool try_extend_to(int J);
  /// Smallest depth reachable for which h_J >= min_height; extends the table.
  int extend_until_height(const Int& min_height);

  Int spacers(int j, const Int& i) const;
  Int column_offset(int j, const Int& i) const;
  /// Locates level n of tower j + 1 among the columns of tower j.
  ColumnHit locate(int j, const Int& n) const;

  /// Upper bound on materialized levels in any single set operation.
  std::size_t cell_limit() const noexcept { return cell_limit_; }
  void set_cell_limit(std::size_t limit) noexcept { cell_limit_ = limit; }
  void check_cells(std::size_t count, const char* what) const;

 private:
  Stage make_next(const Stage& prev) const;
  Stage finish_stage(int j, Int h, Rational w) const;

  ConstructionParams params_;
  std::deque<Stage> stages_;
  std::unique_ptr<std::shared_mutex> mutex_;
  std::size_t cell_limit_ = std::size_t{1} << 26;
};

StageTable build_stage_table(const ConstructionParams& params, int J);

Int column_offset(const StageTable& table, int j, const Int& i);

// ---------------------------------------------------------------------------
// Coordinates
// ---------------------------------------------------------------------------

struct InTower {
  Int level;
  /// Column taken at each intermediate stage, listed from stage J-1 down to j.
  std::vector<Int> columns;
};

struct SpacerCoord {
  int added_at_stage = 0;
  Int column;
  Int spacer_index;  // >= 1
};

using TowerCoord = std::variant<InTower, SpacerCoord>;

TowerCoord coarse_coords(const StageTable& table, int J, const Int& n, int j);

/// Level of tower j containing level n of tower J, or nullopt if n is a
/// spacer added after stage j.
std::optional<Int> coarsen_level(const StageTable& table, int J, const Int& n, int j);

LevelSet refine(const StageTable& table, const LevelSet& set, int J);

/// Throws LevelOutOfRange/StageMissing/InvalidArgument when the set is not
/// a sorted duplicate-free subset of [0, h_stage].
void validate(const StageTable& table, const LevelSet& set);
Rational measure(const StageTable& table, const LevelSet& set);

}  // namespace staircase
