#include "staircase/construction.hpp"

#include <algorithm>
#include <mutex>
#include <string>

namespace staircase {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

std::string stage_text(int j) { return "stage " + std::to_string(j); }

}  // namespace

void ConstructionParams::validate() const {
  if (h1 < 1) throw Error(ErrorCode::InvalidArgument, "h1 must be >= 1, got " + h1.get_str());
  if (base_width <= 0) {
    throw Error(ErrorCode::InvalidArgument, "base_width must be positive, got " + base_width.get_str());
  }
  if (const auto* c = std::get_if<ConstantSpacers>(&spacers); c && c->k < 0) {
    throw Error(ErrorCode::InvalidArgument, "constant spacer height must be >= 0");
  }
  if (const auto* e = std::get_if<ExplicitSpacers>(&spacers)) {
    for (const auto& row : e->per_stage) {
      for (const auto& v : row) {
        if (v < 0) throw Error(ErrorCode::InvalidArgument, "explicit spacer counts must be >= 0");
      }
    }
  }
}

std::optional<Int> evaluate_cut(const CutPolicy& policy, int j, const Int& h) {
  std::optional<Int> r = std::visit(
      overloaded{
          [&](const ExplicitCuts& p) -> std::optional<Int> {
            if (j < 1 || static_cast<std::size_t>(j) > p.cuts.size()) return std::nullopt;
            return p.cuts[static_cast<std::size_t>(j - 1)];
          },
          [&](const AffineCuts& p) -> std::optional<Int> { return p.a * j + p.b; },
          [&](const EqualHeightCuts&) -> std::optional<Int> { return h; },
      },
      policy);
  if (r && *r < 2) {
    throw Error(ErrorCode::PolicyUndefined,
                "cut count r_" + std::to_string(j) + " = " + r->get_str() + " is below 2");
  }
  return r;
}

StageTable::StageTable(ConstructionParams params)
    : params_(std::move(params)), mutex_(std::make_unique<std::shared_mutex>()) {
  params_.validate();
  stages_.push_back(finish_stage(1, params_.h1, params_.base_width));
}

Stage StageTable::finish_stage(int j, Int h, Rational w) const {
  Stage s;
  s.j = j;
  s.h = std::move(h);
  s.w = std::move(w);
  s.total = s.w * Rational(s.h + 1);
  s.r = evaluate_cut(params_.cuts, j, s.h);
  if (!s.r) return s;
  const Int& r = *s.r;
  std::visit(overloaded{
                 [&](const StaircaseSpacers&) { s.spacer_sum = r * (r - 1) / 2; },
                 [&](const ConstantSpacers& p) { s.spacer_sum = p.k * r; },
                 [&](const ExplicitSpacers& p) {
                   if (static_cast<std::size_t>(j) > p.per_stage.size()) {
                     s.r.reset();  // spacer data exhausted: stage cannot be cut
                     return;
                   }
                   const auto& row = p.per_stage[static_cast<std::size_t>(j - 1)];
                   if (Int(static_cast<unsigned long>(row.size())) != r) {
                     throw Error(ErrorCode::PolicyUndefined,
                                 "explicit spacers for " + stage_text(j) + " list " +
                                     std::to_string(row.size()) + " values, expected r_j = " +
                                     r.get_str());
                   }
                   s.explicit_offsets.reserve(row.size());
                   Int o = 0;
                   s.spacer_sum = 0;
                   for (const auto& v : row) {
                     s.explicit_offsets.push_back(o);
                     o += s.h + 1 + v;
                     s.spacer_sum += v;
                   }
                 },
             },
             params_.spacers);
  return s;
}

Stage StageTable::make_next(const Stage& prev) const {
  if (!prev.r) {
    throw Error(ErrorCode::PolicyUndefined,
                "policy gives no cut count for " + stage_text(prev.j));
  }
  const Int& r = *prev.r;
  Int h_next = (prev.h + 1) * r + prev.spacer_sum - 1;
  Rational w_next = prev.w / Rational(r);
  return finish_stage(prev.j + 1, std::move(h_next), std::move(w_next));
}

int StageTable::depth() const {
  std::shared_lock lock(*mutex_);
  return static_cast<int>(stages_.size());
}

const Stage& StageTable::stage(int j) const {
  std::shared_lock lock(*mutex_);
  if (j < 1 || static_cast<std::size_t>(j) > stages_.size()) {
    throw Error(ErrorCode::StageMissing,
                stage_text(j) + " is not built (depth " + std::to_string(stages_.size()) + ")");
  }
  return stages_[static_cast<std::size_t>(j - 1)];
}

void StageTable::extend_to(int J) {
  std::unique_lock lock(*mutex_);
  while (static_cast<int>(stages_.size()) < J) stages_.push_back(make_next(stages_.back()));
}

bool StageTable::try_extend_to(int J) {
  {
    std::shared_lock read(*mutex_);
    if (static_cast<int>(stages_.size()) >= J) return true;
  }
  std::unique_lock lock(*mutex_);
  while (static_cast<int>(stages_.size()) < J) {
    if (!stages_.back().r) return false;
    stages_.push_back(make_next(stages_.back()));
  }
  return true;
}

int StageTable::extend_until_height(const Int& min_height) {
  std::unique_lock lock(*mutex_);
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    if (stages_[i].h >= min_height) return static_cast<int>(i + 1);
  }
  while (stages_.back().h < min_height) stages_.push_back(make_next(stages_.back()));
  return static_cast<int>(stages_.size());
}

void StageTable::check_cells(std::size_t count, const char* what) const {
  if (count > cell_limit_) {
    throw Error(ErrorCode::ResourceLimit, std::string(what) + " needs " + std::to_string(count) +
                                              " cells, limit is " + std::to_string(cell_limit_));
  }
}

Int StageTable::spacers(int j, const Int& i) const {
  const Stage& s = stage(j);
  if (!s.r || i < 1 || i > *s.r) {
    throw Error(ErrorCode::ColumnOutOfRange, "column " + i.get_str() + " at " + stage_text(j));
  }
  return std::visit(overloaded{
                        [&](const StaircaseSpacers&) -> Int { return i - 1; },
                        [&](const ConstantSpacers& p) -> Int { return p.k; },
                        [&](const ExplicitSpacers& p) -> Int {
                          return p.per_stage[static_cast<std::size_t>(j - 1)][i.get_ui() - 1];
                        },
                    },
                    params_.spacers);
}

Int StageTable::column_offset(int j, const Int& i) const {
  const Stage& s = stage(j);
  if (!s.r) throw Error(ErrorCode::StageMissing, "no cut count for " + stage_text(j));
  if (i < 1 || i > *s.r) {
    throw Error(ErrorCode::ColumnOutOfRange,
                "column " + i.get_str() + " outside [1, " + s.r->get_str() + "] at " + stage_text(j));
  }
  const Int x = i - 1;
  return std::visit(overloaded{
                        [&](const StaircaseSpacers&) -> Int { return x * (s.h + 1) + x * (x - 1) / 2; },
                        [&](const ConstantSpacers& p) -> Int { return x * (s.h + 1 + p.k); },
                        [&](const ExplicitSpacers&) -> Int { return s.explicit_offsets[x.get_ui()]; },
                    },
                    params_.spacers);
}

ColumnHit StageTable::locate(int j, const Int& n) const {
  const Stage& s = stage(j);
  if (!s.r) throw Error(ErrorCode::StageMissing, "no cut count for " + stage_text(j));
  const Int top = (s.h + 1) * *s.r + s.spacer_sum - 1;
  if (n < 0 || n > top) {
    throw Error(ErrorCode::LevelOutOfRange,
                "level " + n.get_str() + " outside tower " + std::to_string(j + 1));
  }
  Int x = std::visit(overloaded{
                         [&](const StaircaseSpacers&) -> Int { return staircase_block_index(n, s.h + 1); },
                         [&](const ConstantSpacers& p) -> Int { return floor_div(n, s.h + 1 + p.k); },
                         [&](const ExplicitSpacers&) -> Int {
                           const auto& o = s.explicit_offsets;
                           auto it = std::upper_bound(o.begin(), o.end(), n);
                           return Int(static_cast<unsigned long>(it - o.begin() - 1));
                         },
                     },
                     params_.spacers);
  if (x > *s.r - 1) x = *s.r - 1;
  Int column = x + 1;
  Int offset = n - column_offset(j, column);
  return {std::move(column), std::move(offset)};
}

StageTable build_stage_table(const ConstructionParams& params, int J) {
  if (J < 1) throw Error(ErrorCode::InvalidArgument, "J must be >= 1");
  StageTable table(params);
  table.extend_to(J);
  return table;
}

Int column_offset(const StageTable& table, int j, const Int& i) { return table.column_offset(j, i); }

TowerCoord coarse_coords(const StageTable& table, int J, const Int& n, int j) {
  if (j < 1 || j > J) throw Error(ErrorCode::InvalidArgument, "coarse stage must lie in [1, J]");
  const Stage& top = table.stage(J);
  if (n < 0 || n > top.h) {
    throw Error(ErrorCode::LevelOutOfRange,
                "level " + n.get_str() + " outside [0, " + top.h.get_str() + "]");
  }
  InTower result;
  Int level = n;
  for (int s = J - 1; s >= j; --s) {
    ColumnHit hit = table.locate(s, level);
    const Int& h = table.stage(s).h;
    if (hit.offset > h) return SpacerCoord{s + 1, std::move(hit.column), hit.offset - h};
    result.columns.push_back(std::move(hit.column));
    level = std::move(hit.offset);
  }
  result.level = std::move(level);
  return result;
}

std::optional<Int> coarsen_level(const StageTable& table, int J, const Int& n, int j) {
  Int level = n;
  for (int s = J - 1; s >= j; --s) {
    ColumnHit hit = table.locate(s, level);
    if (hit.offset > table.stage(s).h) return std::nullopt;
    level = std::move(hit.offset);
  }
  return level;
}

void validate(const StageTable& table, const LevelSet& set) {
  const Stage& s = table.stage(set.stage);
  for (std::size_t i = 0; i < set.levels.size(); ++i) {
    const Int& v = set.levels[i];
    if (v < 0 || v > s.h) {
      throw Error(ErrorCode::LevelOutOfRange,
                  "level " + v.get_str() + " outside [0, " + s.h.get_str() + "] at stage " +
                      std::to_string(set.stage));
    }
    if (i > 0 && set.levels[i - 1] >= v) {
      throw Error(ErrorCode::InvalidArgument, "level set must be strictly increasing");
    }
  }
}

Rational measure(const StageTable& table, const LevelSet& set) {
  return table.stage(set.stage).w * Rational(static_cast<unsigned long>(set.levels.size()));
}

LevelSet refine(const StageTable& table, const LevelSet& set, int J) {
  if (J < set.stage) {
    throw Error(ErrorCode::InvalidArgument, "cannot refine to a coarser stage");
  }
  if (J > table.depth()) {
    throw Error(ErrorCode::StageMissing, "stage " + std::to_string(J) + " is not built");
  }
  LevelSet current = set;
  for (int s = set.stage; s < J; ++s) {
    const Stage& st = table.stage(s);
    const std::size_t r = to_size(*st.r, "cut count");
    table.check_cells(current.levels.size() * r, "refine");
    LevelSet next;
    next.stage = s + 1;
    next.levels.reserve(current.levels.size() * r);
    // Columns are stacked bottom to top, so column-major order is sorted.
    for (std::size_t i = 1; i <= r; ++i) {
      const Int o = table.column_offset(s, Int(static_cast<unsigned long>(i)));
      for (const auto& k : current.levels) next.levels.push_back(o + k);
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace staircase
