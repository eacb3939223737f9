#include "staircase/analysis.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace staircase {

// ---------------------------------------------------------------------------
// Delay decomposition
// ---------------------------------------------------------------------------

DelayDecomposition decompose_delay(const Int& m, const Int& h) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "m must be >= 0");
  if (h < 1) throw Error(ErrorCode::InvalidArgument, "h must be >= 1");
  Int d = staircase_block_index(m, h);
  Int t = m - (d * h + d * (d - 1) / 2);
  return {std::move(d), std::move(t)};
}

std::string_view case_tag_name(CaseTag tag) {
  switch (tag) {
    case CaseTag::Zero: return "0";
    case CaseTag::C: return "C";
    case CaseTag::Infinity: return "inf";
    case CaseTag::Unclassified: return "unclassified";
  }
  return "unclassified";
}

std::vector<CaseRecord> classify_case(const StageTable& table, const std::vector<Int>& ms,
                                      const std::optional<CaseThresholds>& thresholds) {
  std::vector<CaseRecord> out;
  out.reserve(ms.size());
  const int depth = table.depth();
  for (const auto& m : ms) {
    if (m < table.stage(1).h) {
      throw Error(ErrorCode::InvalidArgument, "m = " + m.get_str() + " is below h_1");
    }
    int j = 0;
    for (int s = 1; s < depth; ++s) {
      if (table.stage(s).h <= m && m < table.stage(s + 1).h) {
        j = s;
        break;
      }
    }
    if (j == 0) {
      throw Error(ErrorCode::StageMissing,
                  "no built stage j with h_j <= " + m.get_str() + " < h_{j+1}");
    }
    const Int& h = table.stage(j).h;
    DelayDecomposition dec = decompose_delay(m, h);
    CaseRecord rec;
    rec.j = j;
    rec.m = m;
    rec.ratio = make_rational(dec.d * dec.d, h);
    rec.d = std::move(dec.d);
    rec.t = std::move(dec.t);
    if (thresholds) {
      if (rec.ratio < thresholds->zero_below) {
        rec.tag = CaseTag::Zero;
      } else if (rec.ratio > thresholds->infinity_above) {
        rec.tag = CaseTag::Infinity;
      } else {
        rec.tag = CaseTag::C;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Delay profiles
// ---------------------------------------------------------------------------

const ProfileSegment* DelayProfile::segment_of(const Int& column) const {
  auto it = std::upper_bound(segments.begin(), segments.end(), column,
                             [](const Int& c, const ProfileSegment& s) { return c < s.first_column; });
  if (it == segments.begin()) return nullptr;
  --it;
  return column <= it->last_column ? &*it : nullptr;
}

namespace {

struct ColumnLanding {
  Landing kind = Landing::Unresolved;
  bool upper_spacer = false;  // spacer added on top of a copy of tower j + 1
  Int copy;                   // copy of tower j + 1 inside tower j + 2
  Int region;                 // column of tower j whose block (levels + spacers) is hit
  Int offset;                 // position inside that block
};

class ProfileBuilder {
 public:
  ProfileBuilder(const StageTable& table, int j, const Int& m, bool two_stages)
      : table_(table), j_(j), m_(m), stage_(table.stage(j)), next_h_(table.stage(j + 1).h), top_(table.stage(two_stages ? j + 2 : j + 1).h) {
    lockstep_ = std::holds_alternative<StaircaseSpacers>(table.params().spacers) ||
                std::holds_alternative<ConstantSpacers>(table.params().spacers);
  }

  DelayProfile build() {
    DelayProfile profile;
    profile.j = j_;
    profile.m = m_;
    const Int& r = *stage_.r;
    Int i = 1;
    while (i <= r) {
      const ColumnLanding at = land(i);
      ProfileSegment seg;
      seg.first_column = i;
      seg.landing = at.kind;
      if (at.kind == Landing::Unresolved) {
        seg.last_column = r;  // bottoms rise monotonically with the column
      } else if (lockstep_ && !at.upper_spacer) {
        seg.last_column = i + lockstep_run(i, at);
        if (at.kind == Landing::Level) fill_level(seg, i, at);
      } else {
        seg.last_column = i;
        if (at.kind == Landing::Level) fill_level(seg, i, at);
      }
      append(profile, std::move(seg));
      i = profile.segments.back().last_column + 1;
    }
    return profile;
  }

 private:
  ColumnLanding land(const Int& i) const {
    ColumnLanding out;
    Int p = table_.column_offset(j_, i) + m_;
    if (p > top_) return out;
    out.copy = 1;
    if (p > next_h_) {
      ColumnHit outer = table_.locate(j_ + 1, p);
      if (outer.offset > next_h_) {
        out.kind = Landing::Spacer;
        out.upper_spacer = true;
        out.copy = std::move(outer.column);
        return out;
      }
      out.copy = std::move(outer.column);
      p = std::move(outer.offset);
    }
    ColumnHit hit = table_.locate(j_, p);
    out.kind = hit.offset <= stage_.h ? Landing::Level : Landing::Spacer;
    out.region = std::move(hit.column);
    out.offset = std::move(hit.offset);
    return out;
  }

  Int step_delay(const Int& i, const Int& region) const { return table_.spacers(j_, region) - table_.spacers(j_, i); }

  void fill_level(ProfileSegment& seg, const Int& i, const ColumnLanding& at) const {
    seg.level = at.offset;
    seg.landing_column = at.region;
    seg.landing_copy = at.copy;
    seg.delay = step_delay(i, at.region);
  }

  // Under staircase or constant spacers, s(i') - s(i) is unchanged when both
  // columns advance by one inside the same copy of tower j + 1, so the block
  // offset drops by the same amount per column until it leaves the class.
  Int lockstep_run(const Int& i, const ColumnLanding& at) const {
    const Int& r = *stage_.r;
    const Int delta = step_delay(i, at.region);
    Int k = std::min(Int(r - i), Int(r - at.region));
    if (at.kind == Landing::Level) {
      // the level moves by -delta per column and must stay in [0, h_j]
      if (delta > 0) k = std::min(k, Int(floor_div(at.offset, delta)));
      if (delta < 0) k = std::min(k, Int(floor_div(stage_.h - at.offset, -delta)));
    } else if (delta > 0) {
      k = std::min(k, Int(ceil_div(at.offset - stage_.h, delta) - 1));
    } else if (delta < 0) {
      k = 0;  // climbing through a spacer block: step column by column
    }
    if (k > 0) {
      const ColumnLanding end = land(i + k);
      if (end.kind != at.kind || end.upper_spacer || end.copy != at.copy || end.region != at.region + k ||
          end.offset != at.offset - k * delta) {
        throw std::logic_error("delay profile lockstep prediction failed at column " + Int(i + k).get_str());
      }
    }
    return k;
  }

  // Runs landing in the same copy of tower j + 1 merge when the landing
  // levels keep the same per-column drop.
  void append(DelayProfile& profile, ProfileSegment seg) const {
    if (!profile.segments.empty()) {
      ProfileSegment& prev = profile.segments.back();
      const bool both_walls = prev.landing == seg.landing && seg.landing != Landing::Level;
      bool continues = false;
      if (prev.landing == Landing::Level && seg.landing == Landing::Level && prev.landing_copy == seg.landing_copy) {
        const Int last_level = prev.level - (prev.column_count() - 1) * *prev.delay;
        const Int step = last_level - seg.level;
        continues = (prev.column_count() == 1 || step == *prev.delay) &&
                    (seg.column_count() == 1 || step == *seg.delay);
        if (continues) prev.delay = step;
      }
      if (both_walls || continues) {
        prev.last_column = seg.last_column;
        return;
      }
    }
    profile.segments.push_back(std::move(seg));
  }

  const StageTable& table_;
  int j_;
  const Int& m_;
  const Stage& stage_;
  Int next_h_;
  Int top_;
  bool lockstep_ = false;
};

}  // namespace

DelayProfile delay_profile(StageTable& table, int j, const Int& m) {
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "m must be >= 0");
  if (j < 1 || !table.try_extend_to(j + 1)) {
    throw Error(ErrorCode::StageMissing, "delay profile at stage " + std::to_string(j) + " needs stage " +
                                             std::to_string(j + 1));
  }
  const bool two_stages = table.try_extend_to(j + 2);
  return ProfileBuilder(table, j, m, two_stages).build();
}

// ---------------------------------------------------------------------------
// Rakes
// ---------------------------------------------------------------------------

Rake build_rake(StageTable& table, int j, const Int& s, const Int& L, const Int& tooth_step, const Int& n_lo,
                const Int& n_hi) {
  if (j < 1 || !table.try_extend_to(j + 1)) {
    throw Error(ErrorCode::StageMissing, "rake at stage " + std::to_string(j) + " needs stage " +
                                             std::to_string(j + 1));
  }
  const Stage& st = table.stage(j);
  if (L < 1 || tooth_step < 1) throw Error(ErrorCode::InvalidArgument, "rake needs L >= 1 and step >= 1");
  if (s < 1 || s + (L - 1) * tooth_step > *st.r) {
    throw Error(ErrorCode::ColumnOutOfRange, "rake teeth leave columns [1, " + st.r->get_str() + "]");
  }
  if (n_lo < 0 || n_lo > n_hi || n_hi > st.h) {
    throw Error(ErrorCode::LevelOutOfRange, "rake levels must satisfy 0 <= lo <= hi <= " + st.h.get_str());
  }
  Rake rake{j, s, L, tooth_step, n_lo, n_hi, LevelSet{j + 1, {}}};
  const std::size_t teeth = to_size(L, "rake teeth");
  const std::size_t height = to_size(n_hi - n_lo + 1, "rake height");
  table.check_cells(teeth * height, "rake body");
  rake.body.levels.reserve(teeth * height);
  for (std::size_t l = 0; l < teeth; ++l) {
    const Int o = table.column_offset(j, s + Int(static_cast<unsigned long>(l)) * tooth_step);
    for (Int n = n_lo; n <= n_hi; ++n) rake.body.levels.push_back(o + n);
  }
  return rake;
}

RakeBoundReport rake_bound_check(StageTable& table, const LevelSet& A, const LevelSet& B, const Int& m,
                                 const Rake& rake, const Rational& delta, const NormalizationMode& mode,
                                 const Rational& tol) {
  if (delta <= 0 || delta >= Rational(1, 2)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1/2)");
  ensure_valid(table, A);
  ensure_valid(table, B);
  const int j = rake.j;
  const Stage& st = table.stage(j);
  RakeBoundReport report;

  const DelayProfile profile = delay_profile(table, j, m);
  const Int last_tooth = rake.start_column + (rake.tooth_count - 1) * rake.tooth_step;
  const ProfileSegment* first = profile.segment_of(rake.start_column);
  const ProfileSegment* last = profile.segment_of(last_tooth);
  report.single_domain = first != nullptr && first == last && first->landing == Landing::Level;
  report.delay = report.single_domain ? *first->delay : decompose_delay(m, st.h).d;

  const Int& v = rake.level_lo == 0 ? rake.level_hi : rake.level_lo;
  const Rational hv = Rational(st.h);
  report.level_regime = delta * hv < Rational(v) && Rational(v) < (1 - delta) * hv;
  report.valid_regime = report.level_regime && report.single_domain;

  const MeasureInterval joint = measure_image_within(table, A, m, {&B, &rake.body}, tol);
  const int L = static_cast<int>(to_size(rake.tooth_count, "rake teeth"));
  const Interval norm = cesaro_norm_sq(table, B, report.delay, L, mode, tol);
  const SqrtBounds root_lo = sqrt_bounds(std::max(norm.lo, Rational(0)));
  const SqrtBounds root_hi = sqrt_bounds(std::max(norm.hi, Rational(0)));

  Rational y = measure(table, rake.body);
  if (mode.is_probability()) {
    const Rational pa = measure(table, A) / mode.mu_ref;
    const Rational pb = measure(table, B) / mode.mu_ref;
    y /= mode.mu_ref;
    const Rational expected = pa * pb * y;
    report.lhs = abs_interval({joint.lo / mode.mu_ref - expected, joint.hi / mode.mu_ref - expected});
  } else {
    report.lhs = joint;
  }
  report.rhs = {y / delta * root_lo.lo, y / delta * root_hi.hi};
  report.holds = report.lhs.hi <= report.rhs.lo;
  return report;
}

// ---------------------------------------------------------------------------
// Good delays and multipliers
// ---------------------------------------------------------------------------

bool is_good_delay(StageTable& table, const LevelSet& B, const Int& d, int L, const Rational& eps,
                   const NormalizationMode& mode, const Rational& tol) {
  for (int l = 1; l < L; ++l) {
    if (correlation(table, B, d * l, mode, tol).hi >= eps) return false;
  }
  return true;
}

namespace {

std::size_t delay_count(const Int& d_lo, const Int& d_hi, int L) {
  if (d_lo < 0 || d_lo > d_hi) throw Error(ErrorCode::InvalidArgument, "need 0 <= d_lo <= d_hi");
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "good-delay density needs L >= 2");
  return to_size(d_hi - d_lo + 1, "delay range");
}

DensityReport make_density(std::uint64_t good, std::uint64_t total) {
  return {make_rational(Int(static_cast<unsigned long>(good)), Int(static_cast<unsigned long>(total))), good, total};
}

}  // namespace

DensityReport good_delay_density_serial(StageTable& table, const LevelSet& B, const Int& d_lo, const Int& d_hi,
                                        int L, const Rational& eps, const NormalizationMode& mode,
                                        const Rational& tol) {
  const std::size_t n = delay_count(d_lo, d_hi, L);
  std::uint64_t good = 0;
  for (Int d = d_lo; d <= d_hi; ++d) {
    if (is_good_delay(table, B, d, L, eps, mode, tol)) ++good;
  }
  return make_density(good, n);
}

DensityReport good_delay_density(StageTable& table, const LevelSet& B, const Int& d_lo, const Int& d_hi, int L,
                                 const Rational& eps, const NormalizationMode& mode, const Rational& tol,
                                 int jobs) {
  const std::size_t n = delay_count(d_lo, d_hi, L);
  ensure_valid(table, B);
  pre_extend_for_shift(table, d_hi * (L - 1));
  std::vector<char> good(n, 0);
  detail::parallel_for(n, jobs, [&](std::size_t k) {
    good[k] = is_good_delay(table, B, d_lo + Int(static_cast<unsigned long>(k)), L, eps, mode, tol) ? 1 : 0;
  });
  return make_density(static_cast<std::uint64_t>(std::count(good.begin(), good.end(), 1)), n);
}

std::optional<Int> multiplier_for_height(const Int& d, const Int& h) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "d must be >= 1");
  Int q = ceil_div(h, d);
  if (q < 1) q = 1;
  if (q * d >= h && q * d <= 2 * h) return q;
  return std::nullopt;
}

std::optional<Multiplier> find_multiplier(const StageTable& table, const Int& d) {
  const int depth = table.depth();
  if (depth < 2) throw Error(ErrorCode::InvalidArgument, "multiplier search needs at least two stages");
  for (int p = 1; p <= depth; ++p) {
    if (auto q = multiplier_for_height(d, table.stage(p).h)) return Multiplier{p, std::move(*q)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Mixing sweeps
// ---------------------------------------------------------------------------

void pre_extend_for_shift(StageTable& table, const Int& max_m) {
  // One stage past the first that contains the shift, so bottoms of every
  // column resolve without extension inside workers.
  int J = table.depth();
  while (table.stage(J).h < max_m && table.try_extend_to(J + 1)) ++J;
  table.try_extend_to(J + 1);
}

namespace {

Int uniform_below(std::mt19937_64& rng, const Int& bound) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2) + 64;
  Int x = 0;
  for (std::size_t got = 0; got < bits; got += 64) {
    x <<= 64;
    const std::uint64_t word = rng();
    x += Int(static_cast<unsigned long>(word >> 32)) * Int(1UL << 32) + Int(static_cast<unsigned long>(word & 0xffffffffUL));
  }
  Int out;
  mpz_mod(out.get_mpz_t(), x.get_mpz_t(), bound.get_mpz_t());
  return out;
}

}  // namespace

std::vector<Int> sample_shifts(StageTable& table, const SweepSampling& sampling) {
  std::mt19937_64 rng(sampling.seed);
  std::vector<Int> ms;
  for (const auto& window : sampling.windows) {
    Int lo, hi;
    if (const auto* sw = std::get_if<StageWindow>(&window)) {
      if (sw->stage < 1 || !table.try_extend_to(sw->stage)) {
        throw Error(ErrorCode::StageMissing, "window stage " + std::to_string(sw->stage) + " cannot be built");
      }
      lo = table.stage(sw->stage).h;
      hi = 2 * lo;
    } else {
      const auto& rw = std::get<RangeWindow>(window);
      lo = rw.lo;
      hi = rw.hi;
    }
    if (lo < 0 || lo > hi) throw Error(ErrorCode::InvalidArgument, "window must satisfy 0 <= lo <= hi");
    const Int size = hi - lo + 1;
    if (size <= Int(static_cast<unsigned long>(sampling.samples))) {
      for (Int m = lo; m <= hi; ++m) ms.push_back(m);
      continue;
    }
    std::vector<Int> drawn;
    drawn.reserve(sampling.samples);
    const std::size_t max_draws = 64 * sampling.samples + 64;
    for (std::size_t draws = 0; drawn.size() < sampling.samples && draws < max_draws; ++draws) {
      Int m = lo + uniform_below(rng, size);
      if (std::find(drawn.begin(), drawn.end(), m) == drawn.end()) drawn.push_back(std::move(m));
    }
    ms.insert(ms.end(), drawn.begin(), drawn.end());
  }
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

Rational sweep_target(const StageTable& table, const LevelSet& A, const LevelSet& B, const NormalizationMode& mode) {
  if (!mode.is_probability()) return 0;
  if (mode.mu_ref <= 0) throw Error(ErrorCode::BadReference, "mu_ref must be positive");
  return measure(table, A) * measure(table, B) / mode.mu_ref;
}

namespace {

SweepRecord sweep_point(StageTable& table, const LevelSet& A, const LevelSet& B, const Int& m,
                        const Rational& target, const Rational& tol) {
  SweepRecord rec;
  rec.m = m;
  rec.interval = measure_intersection(table, A, B, m, tol);
  rec.target = target;
  rec.residual_to_target = std::max(abs_rational(rec.interval.lo - target), abs_rational(rec.interval.hi - target));
  return rec;
}

}  // namespace

std::vector<SweepRecord> mixing_sweep_serial(StageTable& table, const LevelSet& A, const LevelSet& B,
                                             const SweepSampling& sampling, const NormalizationMode& mode,
                                             const Rational& tol) {
  const std::vector<Int> ms = sample_shifts(table, sampling);
  const Rational target = sweep_target(table, A, B, mode);
  std::vector<SweepRecord> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(sweep_point(table, A, B, m, target, tol));
  return out;
}

std::vector<SweepRecord> mixing_sweep(StageTable& table, const LevelSet& A, const LevelSet& B,
                                      const SweepSampling& sampling, const NormalizationMode& mode,
                                      const Rational& tol, int jobs) {
  ensure_valid(table, A);
  ensure_valid(table, B);
  const std::vector<Int> ms = sample_shifts(table, sampling);
  const Rational target = sweep_target(table, A, B, mode);
  if (!ms.empty()) pre_extend_for_shift(table, ms.back());
  std::vector<SweepRecord> out(ms.size());
  detail::parallel_for(ms.size(), jobs, [&](std::size_t k) { out[k] = sweep_point(table, A, B, ms[k], target, tol); });
  return out;
}

}  // namespace staircase
