#include "staircase/dynamics.hpp"

#include <algorithm>
#include <iterator>
#include <string>

namespace staircase {

void ensure_valid(StageTable& table, const LevelSet& set) {
  if (set.stage >= 1) table.try_extend_to(set.stage);
  validate(table, set);
}

Rational default_mu_ref(const StageTable& table) { return table.stage(table.depth()).total; }

ImagePieces image_pieces(StageTable& table, const LevelSet& A, const Int& m, const Rational& tol) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "shift m must be >= 0");
  if (tol < 0) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  ensure_valid(table, A);

  ImagePieces out;
  LevelSet frontier = A;
  int s = A.stage;
  for (;;) {
    const Stage& st = table.stage(s);
    // Levels k with k + m <= h_s resolve at this stage.
    const Int limit = st.h - m;
    auto split = std::upper_bound(frontier.levels.begin(), frontier.levels.end(), limit);
    if (split != frontier.levels.begin()) {
      LevelSet piece;
      piece.stage = s;
      piece.levels.reserve(static_cast<std::size_t>(split - frontier.levels.begin()));
      for (auto it = frontier.levels.begin(); it != split; ++it) piece.levels.push_back(*it + m);
      out.pieces.push_back(std::move(piece));
    }
    LevelSet unresolved;
    unresolved.stage = s;
    unresolved.levels.assign(std::make_move_iterator(split), std::make_move_iterator(frontier.levels.end()));
    out.residual = st.w * Rational(static_cast<unsigned long>(unresolved.levels.size()));
    out.final_stage = s;
    if (unresolved.levels.empty() || out.residual <= tol) break;
    if (!table.try_extend_to(s + 1)) {
      throw Error(ErrorCode::CannotExtend, "cut policy exhausted at stage " + std::to_string(s) +
                                               " with residual " + out.residual.get_str() +
                                               " above tolerance " + tol.get_str());
    }
    frontier = refine(table, unresolved, s + 1);
    ++s;
  }
  return out;
}

CertifiedImage image(StageTable& table, const LevelSet& A, const Int& m, const Rational& tol) {
  ImagePieces pieces = image_pieces(table, A, m, tol);
  CertifiedImage out;
  out.resolved.stage = pieces.final_stage;
  out.residual = pieces.residual;
  for (const auto& piece : pieces.pieces) {
    LevelSet fine = refine(table, piece, pieces.final_stage);
    out.resolved.levels.insert(out.resolved.levels.end(), std::make_move_iterator(fine.levels.begin()),
                               std::make_move_iterator(fine.levels.end()));
  }
  std::sort(out.resolved.levels.begin(), out.resolved.levels.end());
  return out;
}

Int count_common(const StageTable& table, const LevelSet& piece, const std::vector<const LevelSet*>& filters) {
  if (filters.empty()) return Int(static_cast<unsigned long>(piece.levels.size()));
  int K = piece.stage;
  for (const auto* f : filters) K = std::max(K, f->stage);
  const LevelSet fine = piece.stage < K ? refine(table, piece, K) : piece;

  std::vector<const LevelSet*> order = filters;
  std::sort(order.begin(), order.end(), [](const LevelSet* a, const LevelSet* b) { return a->stage > b->stage; });

  unsigned long count = 0;
  for (const auto& n : fine.levels) {
    Int level = n;
    int at = K;
    bool inside = true;
    for (const auto* f : order) {
      while (at > f->stage) {
        ColumnHit hit = table.locate(at - 1, level);
        if (hit.offset > table.stage(at - 1).h) {
          inside = false;  // spacer added after the filter's stage
          break;
        }
        level = std::move(hit.offset);
        --at;
      }
      if (!inside || !f->contains(level)) {
        inside = false;
        break;
      }
    }
    if (inside) ++count;
  }
  return Int(count);
}

MeasureInterval measure_image_within(StageTable& table, const LevelSet& source, const Int& m,
                                     const std::vector<const LevelSet*>& filters, const Rational& tol) {
  for (const auto* f : filters) ensure_valid(table, *f);
  const ImagePieces pieces = image_pieces(table, source, m, tol);
  Rational total = 0;
  for (const auto& piece : pieces.pieces) {
    int K = piece.stage;
    for (const auto* f : filters) K = std::max(K, f->stage);
    total += table.stage(K).w * Rational(count_common(table, piece, filters));
  }
  return {total, total + pieces.residual};
}

MeasureInterval measure_intersection(StageTable& table, const LevelSet& A, const LevelSet& B, const Int& m,
                                     const Rational& tol) {
  return measure_image_within(table, B, m, {&A}, tol);
}

namespace {

void check_reference(const StageTable& table, const LevelSet& B, const NormalizationMode& mode) {
  if (!mode.is_probability()) return;
  if (mode.mu_ref <= 0) throw Error(ErrorCode::BadReference, "mu_ref must be positive, got " + mode.mu_ref.get_str());
  if (measure(table, B) > mode.mu_ref) {
    throw Error(ErrorCode::BadReference, "mu_ref " + mode.mu_ref.get_str() + " is below the set measure " +
                                             measure(table, B).get_str());
  }
}

}  // namespace

Interval correlation(StageTable& table, const LevelSet& B, const Int& n, const NormalizationMode& mode,
                     const Rational& tol) {
  ensure_valid(table, B);
  check_reference(table, B, mode);
  const MeasureInterval raw = measure_intersection(table, B, B, n, tol);
  if (!mode.is_probability()) return raw;
  const Rational p = measure(table, B) / mode.mu_ref;
  return {raw.lo / mode.mu_ref - p * p, raw.hi / mode.mu_ref - p * p};
}

Interval gram_norm_sq(const std::vector<Interval>& shifts) {
  if (shifts.empty()) throw Error(ErrorCode::InvalidArgument, "Gram expansion needs L >= 1");
  const auto L = static_cast<unsigned long>(shifts.size());
  Rational lo = Rational(L) * shifts[0].lo;
  Rational hi = Rational(L) * shifts[0].hi;
  for (unsigned long k = 1; k < L; ++k) {
    const Rational weight = 2 * Rational(L - k);
    lo += weight * shifts[k].lo;
    hi += weight * shifts[k].hi;
  }
  const Rational denom = Rational(L) * Rational(L);
  return {lo / denom, hi / denom};
}

namespace {

std::vector<Interval> shift_correlations(StageTable& table, const LevelSet& B, const Int& d, int L,
                                         const NormalizationMode& mode, const Rational& tol) {
  if (L < 1) throw Error(ErrorCode::InvalidArgument, "L must be >= 1");
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "d must be >= 0");
  std::vector<Interval> cs;
  cs.reserve(static_cast<std::size_t>(L));
  cs.push_back(correlation(table, B, Int(0), mode, tol));
  for (int k = 1; k < L; ++k) cs.push_back(d == 0 ? cs.front() : correlation(table, B, d * k, mode, tol));
  return cs;
}

}  // namespace

Interval cesaro_norm_sq(StageTable& table, const LevelSet& B, const Int& d, int L, const NormalizationMode& mode,
                        const Rational& tol) {
  return gram_norm_sq(shift_correlations(table, B, d, L, mode, tol));
}

BlumHansonReport blum_hanson_check(StageTable& table, const LevelSet& B, const Int& d, int L, const Rational& eps,
                                   const NormalizationMode& mode, const Rational& tol) {
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "Blum-Hanson check needs L >= 2");
  const std::vector<Interval> cs = shift_correlations(table, B, d, L, mode, tol);
  BlumHansonReport report;
  report.c0 = cs[0];
  report.max_cross = cs[1];
  for (std::size_t k = 2; k < cs.size(); ++k) {
    report.max_cross.lo = std::max(report.max_cross.lo, cs[k].lo);
    report.max_cross.hi = std::max(report.max_cross.hi, cs[k].hi);
  }
  report.norm_sq = gram_norm_sq(cs);
  report.bound = eps + cs[0].hi / Rational(L);
  report.premise_holds = report.max_cross.hi < eps;
  report.conclusion_holds = report.norm_sq.hi <= report.bound;
  return report;
}

}  // namespace staircase
