#pragma once

#include <vector>

#include "staircase/construction.hpp"
#include "staircase/level_set.hpp"

namespace staircase {

/// T^m(A) resolved at a common stage plus the exact mass T^m could not place.
struct CertifiedImage {
  LevelSet resolved;
  Rational residual;
};

/// The same information kept stage by stage: pieces[k] holds the levels that
/// resolved at stage pieces[k].stage. Intersection counting works on this
/// form directly and never refines resolved mass.
struct ImagePieces {
  std::vector<LevelSet> pieces;
  Rational residual;
  int final_stage = 1;
};

struct NormalizationMode {
  enum class Kind { Probability, Infinite };
  Kind kind = Kind::Probability;
  Rational mu_ref;  // used in Probability mode only

  static NormalizationMode probability(Rational mu_ref) { return {Kind::Probability, std::move(mu_ref)}; }
  static NormalizationMode infinite() { return {Kind::Infinite, Rational(0)}; }
  bool is_probability() const noexcept { return kind == Kind::Probability; }
};

/// Builds the set's stage when the policy allows it, then validates the set.
void ensure_valid(StageTable& table, const LevelSet& set);

/// mu(X_J) of the deepest stage currently built.
Rational default_mu_ref(const StageTable& table);

/// tol == 0 requests an exact image; CannotExtend is raised if the cut policy
/// runs out before the residual drops to tol.
ImagePieces image_pieces(StageTable& table, const LevelSet& A, const Int& m, const Rational& tol);
CertifiedImage image(StageTable& table, const LevelSet& A, const Int& m, const Rational& tol);

/// Number of levels of `piece` lying in every set of `filters` (each at any
/// stage, coarser or finer than the piece), counted at the finest of those
/// stages.
Int count_common(const StageTable& table, const LevelSet& piece, const std::vector<const LevelSet*>& filters);

/// Enclosure of mu(T^m(source) ∩ filters...).
MeasureInterval measure_image_within(StageTable& table, const LevelSet& source, const Int& m,
                                     const std::vector<const LevelSet*>& filters, const Rational& tol);

/// Enclosure of mu(A ∩ T^m B).
MeasureInterval measure_intersection(StageTable& table, const LevelSet& A, const LevelSet& B, const Int& m,
                                     const Rational& tol);

/// Probability: P(T^n B ∩ B) - P(B)^2 with P = mu / mu_ref. Infinite: mu(T^n B ∩ B).
Interval correlation(StageTable& table, const LevelSet& B, const Int& n, const NormalizationMode& mode,
                     const Rational& tol);

/// Combines correlations C(0), C(d), ..., C((L-1)d) into the Gram expansion of
/// ||(1/L) sum_l T^{ld} f||^2.
Interval gram_norm_sq(const std::vector<Interval>& shifts);

Interval cesaro_norm_sq(StageTable& table, const LevelSet& B, const Int& d, int L, const NormalizationMode& mode,
                        const Rational& tol);

struct BlumHansonReport {
  Interval max_cross;
  Interval norm_sq;
  Interval c0;
  Rational bound;
  bool premise_holds = false;
  bool conclusion_holds = false;
};

BlumHansonReport blum_hanson_check(StageTable& table, const LevelSet& B, const Int& d, int L, const Rational& eps,
                                   const NormalizationMode& mode, const Rational& tol);

}  // namespace staircase
