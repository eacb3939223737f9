#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "staircase/construction.hpp"
#include "staircase/dynamics.hpp"

namespace staircase {

// ---------------------------------------------------------------------------
// Delay decomposition and case classification
// ---------------------------------------------------------------------------

/// m = d*h + d(d-1)/2 + t with 0 <= t < d + h: the number d of roof passages
/// of the base before T^m lands, and the remainder t.
struct DelayDecomposition {
  Int d, t;
  friend bool operator==(const DelayDecomposition&, const DelayDecomposition&) = default;
};

DelayDecomposition decompose_delay(const Int& m, const Int& h);

enum class CaseTag { Zero, C, Infinity, Unclassified };
std::string_view case_tag_name(CaseTag tag);

/// Heuristic labels on the exact ratio d^2/h_j.
struct CaseThresholds {
  Rational zero_below{1, 10};
  Rational infinity_above{10};
};

struct CaseRecord {
  int j = 0;
  Int m, d, t;
  Rational ratio;
  CaseTag tag = CaseTag::Unclassified;
};

std::vector<CaseRecord> classify_case(const StageTable& table, const std::vector<Int>& ms,
                                      const std::optional<CaseThresholds>& thresholds = CaseThresholds{});

// ---------------------------------------------------------------------------
// Delay profiles
// ---------------------------------------------------------------------------

enum class Landing { Level, Spacer, Unresolved };

/// A maximal run of columns of tower j. For Level segments every column lands
/// in tower j and consecutive columns drop by `delay` levels; `level` is the
/// landing level of `first_column`. A one-column segment reports
/// s(landing column) - s(column). Spacer and Unresolved segments carry no
/// delay (a domain boundary).
struct ProfileSegment {
  Int first_column, last_column;
  Landing landing = Landing::Level;
  Int level;
  std::optional<Int> delay;
  /// Column of tower j hit by the first column (Level segments only).
  Int landing_column;
  /// Copy of tower j + 1 inside tower j + 2 holding the landing; 1 means the
  /// landing lies in tower j + 1 itself. Segments never span two copies.
  Int landing_copy;

  Int column_count() const { return last_column - first_column + 1; }
};

struct DelayProfile {
  int j = 0;
  Int m;
  std::vector<ProfileSegment> segments;

  /// Segment containing column i, or nullptr.
  const ProfileSegment* segment_of(const Int& column) const;
};

/// Column bottoms are resolved in tower j + 2 (copies of tower j + 1 stacked
/// with their spacers). Needs stage j + 1; when the policy stops before
/// stage j + 2, bottoms above tower j + 1 are reported as Unresolved.
/// Staircase and constant-spacer profiles cost O(#segments).
DelayProfile delay_profile(StageTable& table, int j, const Int& m);

// ---------------------------------------------------------------------------
// Rakes
// ---------------------------------------------------------------------------

struct Rake {
  int j = 0;
  Int start_column;
  Int tooth_count;
  Int tooth_step;
  Int level_lo, level_hi;
  LevelSet body;  // at stage j + 1
};

Rake build_rake(StageTable& table, int j, const Int& s, const Int& L, const Int& tooth_step, const Int& n_lo,
                const Int& n_hi);

struct RakeBoundReport {
  Interval lhs;
  Interval rhs;
  Int delay;
  bool holds = false;
  bool level_regime = false;      // delta*h_j < v < (1 - delta)*h_j
  bool single_domain = false;     // all teeth in one Level segment of the profile
  bool valid_regime = false;      // both of the above
};

RakeBoundReport rake_bound_check(StageTable& table, const LevelSet& A, const LevelSet& B, const Int& m,
                                 const Rake& rake, const Rational& delta, const NormalizationMode& mode,
                                 const Rational& tol);

// ---------------------------------------------------------------------------
// Sweeps (parallel kernels with serial references)
// ---------------------------------------------------------------------------

struct DensityReport {
  Rational fraction;
  std::uint64_t good = 0;
  std::uint64_t total = 0;
  friend bool operator==(const DensityReport&, const DensityReport&) = default;
};

/// d is eps-good when correlation(B, l*d).hi < eps for l = 1..L-1.
bool is_good_delay(StageTable& table, const LevelSet& B, const Int& d, int L, const Rational& eps,
                   const NormalizationMode& mode, const Rational& tol);

DensityReport good_delay_density(StageTable& table, const LevelSet& B, const Int& d_lo, const Int& d_hi, int L,
                                 const Rational& eps, const NormalizationMode& mode, const Rational& tol,
                                 int jobs = 0);
DensityReport good_delay_density_serial(StageTable& table, const LevelSet& B, const Int& d_lo, const Int& d_hi,
                                        int L, const Rational& eps, const NormalizationMode& mode,
                                        const Rational& tol);

struct Multiplier {
  int p = 0;
  Int q;
};

/// q = ceil(h/d) when it satisfies q*d <= 2h.
std::optional<Int> multiplier_for_height(const Int& d, const Int& h);
/// Smallest built stage p admitting q with q*d in [h_p, 2h_p].
std::optional<Multiplier> find_multiplier(const StageTable& table, const Int& d);

/// Either the window [h_j, 2h_j] of a stage or an explicit inclusive range.
struct StageWindow {
  int stage;
};
struct RangeWindow {
  Int lo, hi;
};
using SweepWindow = std::variant<StageWindow, RangeWindow>;

struct SweepSampling {
  std::vector<SweepWindow> windows;
  std::size_t samples = 64;
  std::uint64_t seed = 0;
};

struct SweepRecord {
  Int m;
  MeasureInterval interval;
  Rational target;
  Rational residual_to_target;  // max |endpoint - target|
};

/// Deterministic sample of shifts (sorted, unique). Windows with at most
/// `samples` values are enumerated.
std::vector<Int> sample_shifts(StageTable& table, const SweepSampling& sampling);

Rational sweep_target(const StageTable& table, const LevelSet& A, const LevelSet& B, const NormalizationMode& mode);

std::vector<SweepRecord> mixing_sweep(StageTable& table, const LevelSet& A, const LevelSet& B,
                                      const SweepSampling& sampling, const NormalizationMode& mode,
                                      const Rational& tol, int jobs = 0);
std::vector<SweepRecord> mixing_sweep_serial(StageTable& table, const LevelSet& A, const LevelSet& B,
                                             const SweepSampling& sampling, const NormalizationMode& mode,
                                             const Rational& tol);

/// Extends the table so every shift up to max_m resolves column bottoms
/// without extension inside parallel regions.
void pre_extend_for_shift(StageTable& table, const Int& max_m);

}  // namespace staircase
