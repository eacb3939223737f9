#include <random>

#include "doctest.h"
#include "staircase/construction.hpp"
#include "support.hpp"

namespace sc = staircase;
using test_support::levels;
using test_support::list_cuts;

namespace {

std::vector<std::string> heights(const sc::StageTable& t) {
  std::vector<std::string> out;
  for (int j = 1; j <= t.depth(); ++j) out.push_back(t.stage(j).h.get_str());
  return out;
}

}  // namespace

TEST_CASE("stage table: hand-evaluated staircase heights") {
  auto t = sc::build_stage_table(list_cuts({2, 2, 2}), 4);
  CHECK(heights(t) == std::vector<std::string>{"1", "4", "10", "22"});
  CHECK(t.stage(2).w == sc::Rational(1, 2));
  CHECK(t.stage(3).w == sc::Rational(1, 4));
  CHECK(t.stage(4).w == sc::Rational(1, 8));
  CHECK(t.stage(4).total == sc::Rational(23, 8));

  auto u = sc::build_stage_table(list_cuts({2, 3, 4}), 4);
  CHECK(heights(u) == std::vector<std::string>{"1", "4", "17", "77"});
}

TEST_CASE("stage table: zero spacers add no mass") {
  auto p = list_cuts({2});
  p.spacers = sc::ConstantSpacers{0};
  auto t = sc::build_stage_table(p, 2);
  CHECK(t.stage(2).h == 3);
  CHECK(t.stage(2).total == 2);
  CHECK(t.stage(1).total == 2);
}

TEST_CASE("stage table: r_j = j + 1 reaches h_8 = 135435") {
  auto t = sc::build_stage_table(test_support::affine_staircase(), 8);
  CHECK(heights(t) ==
        std::vector<std::string>{"1", "4", "17", "77", "399", "2414", "16925", "135435"});
}

TEST_CASE("stage table: equal-height mode grows past machine integers") {
  sc::ConstructionParams p;
  p.h1 = 2;
  p.cuts = sc::EqualHeightCuts{};
  auto t = sc::build_stage_table(p, 6);
  CHECK(t.stage(5).h == sc::Int("33575906"));
  CHECK(t.stage(6).h > sc::Int("1000000000000000"));
  CHECK(*t.stage(5).r == t.stage(5).h);
}

TEST_CASE("stage table: policy errors") {
  CHECK_THROWS_AS(sc::build_stage_table(list_cuts({2}), 3), sc::Error);
  try {
    sc::build_stage_table(list_cuts({2}), 3);
  } catch (const sc::Error& e) {
    CHECK(e.code() == sc::ErrorCode::PolicyUndefined);
  }
  sc::ConstructionParams eq;
  eq.cuts = sc::EqualHeightCuts{};  // r_1 = h_1 = 1 is a degenerate cut
  CHECK_THROWS_AS(sc::StageTable{eq}, sc::Error);
  auto bad = list_cuts({2});
  bad.base_width = 0;
  CHECK_THROWS_AS(sc::StageTable{bad}, sc::Error);
}

TEST_CASE("stage table: extension is append-only and deterministic") {
  sc::StageTable t(test_support::affine_staircase());
  t.extend_to(3);
  const sc::Stage* third = &t.stage(3);
  const sc::Int h3 = third->h;
  t.extend_to(7);
  CHECK(&t.stage(3) == third);
  CHECK(t.stage(3).h == h3);
  auto u = sc::build_stage_table(test_support::affine_staircase(), 7);
  CHECK(heights(t) == heights(u));
  CHECK_FALSE(sc::StageTable(list_cuts({2})).try_extend_to(3));
}

TEST_CASE("column offsets: examples") {
  auto t = sc::build_stage_table(list_cuts({2, 3, 4}), 3);
  // stage 2 has h = 4
  CHECK(sc::column_offset(t, 2, 1) == 0);
  CHECK(sc::column_offset(t, 2, 2) == 5);
  CHECK(sc::column_offset(t, 2, 3) == 11);
  auto u = sc::build_stage_table(list_cuts({2, 2}), 3);
  CHECK(sc::column_offset(u, 1, 2) == 2);
  CHECK_THROWS_AS(sc::column_offset(u, 1, 3), sc::Error);
  CHECK_THROWS_AS(sc::column_offset(u, 1, 0), sc::Error);
}

TEST_CASE("property: height recursion and offset consistency on random policies") {
  std::mt19937_64 rng(20240501);
  for (int trial = 0; trial < 100; ++trial) {
    const long h1 = test_support::uniform(rng, 1, 5);
    const int stages = static_cast<int>(test_support::uniform(rng, 2, 5));
    sc::ConstructionParams p;
    p.h1 = h1;
    sc::ExplicitCuts cuts;
    for (int j = 1; j < stages; ++j) cuts.cuts.emplace_back(test_support::uniform(rng, 2, 9));
    p.cuts = cuts;
    if (trial % 2 == 1) {
      sc::ExplicitSpacers sp;
      for (const auto& r : cuts.cuts) {
        std::vector<sc::Int> row;
        for (long i = 0; i < r.get_si(); ++i) row.emplace_back(test_support::uniform(rng, 0, 6));
        sp.per_stage.push_back(row);
      }
      p.spacers = sp;
    }
    auto t = sc::build_stage_table(p, stages);
    for (int j = 1; j < stages; ++j) {
      const auto& s = t.stage(j);
      const auto& next = t.stage(j + 1);
      sc::Int spacer_total = 0;
      for (sc::Int i = 1; i <= *s.r; ++i) spacer_total += t.spacers(j, i);
      CHECK(next.h + 1 == (s.h + 1) * *s.r + spacer_total);
      CHECK(next.w == s.w / sc::Rational(*s.r));
      CHECK(next.total >= s.total);
      if (spacer_total > 0) CHECK(next.total > s.total);
      const sc::Int last = *s.r;
      CHECK(t.column_offset(j, last) + s.h + t.spacers(j, last) == next.h);
      // prefix-sum definition
      sc::Int o = 0;
      for (sc::Int i = 1; i <= *s.r; ++i) {
        CHECK(t.column_offset(j, i) == o);
        o += s.h + 1 + t.spacers(j, i);
      }
    }
  }
}

TEST_CASE("property: staircase closed-form offsets equal prefix sums up to 10^4 columns") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    const long h1 = test_support::uniform(rng, 1, 1000);
    const long r = 10000;
    sc::ConstructionParams closed = list_cuts({r}, h1);
    sc::ConstructionParams prefix = closed;
    sc::ExplicitSpacers sp;
    std::vector<sc::Int> row;
    for (long i = 1; i <= r; ++i) row.emplace_back(i - 1);
    sp.per_stage.push_back(row);
    prefix.spacers = sp;
    auto a = sc::build_stage_table(closed, 2);
    auto b = sc::build_stage_table(prefix, 2);
    CHECK(a.stage(2).h == b.stage(2).h);
    for (long i = 1; i <= r; ++i) {
      const sc::Int col(i);
      if (a.column_offset(1, col) != b.column_offset(1, col)) {
        FAIL("offset mismatch at column " << i);
      }
    }
    // locate agrees too, including spacer levels
    for (int probe = 0; probe < 2000; ++probe) {
      const sc::Int n(test_support::uniform(rng, 0, a.stage(2).h.get_si()));
      const auto ha = a.locate(1, n);
      const auto hb = b.locate(1, n);
      CHECK(ha.column == hb.column);
      CHECK(ha.offset == hb.offset);
    }
  }
}

TEST_CASE("coarse coordinates: examples") {
  auto t = sc::build_stage_table(list_cuts({2, 2}), 3);
  auto c = sc::coarse_coords(t, 3, 6, 2);
  REQUIRE(std::holds_alternative<sc::InTower>(c));
  CHECK(std::get<sc::InTower>(c).level == 1);
  CHECK(std::get<sc::InTower>(c).columns == std::vector<sc::Int>{2});

  auto s = sc::coarse_coords(t, 3, 10, 2);
  REQUIRE(std::holds_alternative<sc::SpacerCoord>(s));
  CHECK(std::get<sc::SpacerCoord>(s).added_at_stage == 3);
  CHECK(std::get<sc::SpacerCoord>(s).column == 2);
  CHECK(std::get<sc::SpacerCoord>(s).spacer_index == 1);

  auto same = sc::coarse_coords(t, 3, 7, 3);
  REQUIRE(std::holds_alternative<sc::InTower>(same));
  CHECK(std::get<sc::InTower>(same).level == 7);

  CHECK_THROWS_AS(sc::coarse_coords(t, 3, 11, 2), sc::Error);
}

TEST_CASE("refine: examples and errors") {
  auto t = sc::build_stage_table(list_cuts({2, 2}), 3);
  CHECK(sc::refine(t, levels(1, {0}), 3) == levels(3, {0, 2, 5, 7}));
  CHECK(sc::refine(t, levels(1, {1}), 2) == levels(2, {1, 3}));
  CHECK(sc::refine(t, levels(2, {3}), 2) == levels(2, {3}));
  CHECK_THROWS_AS(sc::refine(t, levels(1, {0}), 4), sc::Error);
}

TEST_CASE("property: refinement conserves measure and round-trips through coarse coordinates") {
  std::mt19937_64 rng(7);
  auto t = sc::build_stage_table(test_support::affine_staircase(), 6);
  for (int trial = 0; trial < 40; ++trial) {
    const int j = static_cast<int>(test_support::uniform(rng, 1, 4));
    const int J = static_cast<int>(test_support::uniform(rng, j, 6));
    const auto set = test_support::random_set(rng, j, t.stage(j).h.get_si(), 0.2);
    const auto fine = sc::refine(t, set, J);
    CHECK(sc::measure(t, fine) == sc::measure(t, set));
    CHECK(std::is_sorted(fine.levels.begin(), fine.levels.end()));
    CHECK(std::adjacent_find(fine.levels.begin(), fine.levels.end()) == fine.levels.end());
    for (std::size_t k = 0; k < fine.levels.size(); k += 7) {
      const auto back = sc::coarse_coords(t, J, fine.levels[k], j);
      REQUIRE(std::holds_alternative<sc::InTower>(back));
      CHECK(set.contains(std::get<sc::InTower>(back).level));
    }
  }
}

TEST_CASE("cell limit guards materialization") {
  auto t = sc::build_stage_table(test_support::affine_staircase(), 6);
  t.set_cell_limit(10);
  CHECK_THROWS_AS(sc::refine(t, levels(1, {0, 1}), 4), sc::Error);
}
