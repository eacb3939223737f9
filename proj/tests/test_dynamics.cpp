#include <random>

#include "doctest.h"
#include "staircase/dynamics.hpp"
#include "support.hpp"

namespace sc = staircase;
using test_support::levels;
using test_support::list_cuts;

namespace {

const sc::Rational kExact = 0;

sc::StageTable two_two() { return sc::build_stage_table(list_cuts({2, 2}), 3); }

}  // namespace

TEST_CASE("image: examples") {
  auto t = two_two();
  auto five = sc::image(t, levels(2, {0}), 5, kExact);
  CHECK(five.resolved == levels(3, {5, 10}));
  CHECK(five.residual == 0);
  auto zero = sc::image(t, levels(2, {0}), 0, kExact);
  CHECK(zero.resolved == levels(2, {0}));
  auto two = sc::image(t, levels(2, {0}), 2, kExact);
  CHECK(two.resolved == levels(2, {2}));
  CHECK(two.residual == 0);
}

TEST_CASE("image: errors") {
  auto t = two_two();
  CHECK_THROWS_AS(sc::image(t, levels(2, {0}), -1, kExact), sc::Error);
  CHECK_THROWS_AS(sc::image(t, levels(2, {0}), 1, sc::Rational(-1)), sc::Error);
  CHECK_THROWS_AS(sc::image(t, levels(2, {5}), 1, kExact), sc::Error);
  try {
    sc::image(t, levels(2, {0}), 11, kExact);
    FAIL("expected CannotExtend");
  } catch (const sc::Error& e) {
    CHECK(e.code() == sc::ErrorCode::CannotExtend);
  }
}

TEST_CASE("image: tolerance stops refinement with the exact residual") {
  sc::StageTable t(test_support::affine_staircase());
  auto coarse = sc::image(t, levels(1, {0, 1}), 3, sc::Rational(1));
  CHECK(coarse.residual <= 1);
  auto fine = sc::image(t, levels(1, {0, 1}), 3, kExact);
  CHECK(fine.residual == 0);
  CHECK(sc::measure(t, fine.resolved) == 2);
}

TEST_CASE("measure_intersection: examples") {
  auto t = two_two();
  auto A = levels(2, {0});
  CHECK(sc::measure_intersection(t, A, A, 5, kExact) == sc::Interval{sc::Rational(1, 4), sc::Rational(1, 4)});
  CHECK(sc::measure_intersection(t, A, A, 2, kExact) == sc::Interval{0, 0});
  auto B = levels(2, {1, 3});
  CHECK(sc::measure_intersection(t, B, B, 0, kExact) == sc::Interval{1, 1});
}

TEST_CASE("correlation, Gram norm and Blum-Hanson: examples") {
  auto t = two_two();
  const auto B = levels(2, {0});
  const auto prob = sc::NormalizationMode::probability(sc::Rational(11, 4));
  CHECK(sc::correlation(t, B, 2, prob, kExact) == sc::Interval{sc::Rational(-4, 121), sc::Rational(-4, 121)});
  CHECK(sc::correlation(t, B, 2, sc::NormalizationMode::infinite(), kExact) == sc::Interval{0, 0});
  const sc::Rational p(2, 11);
  CHECK(sc::correlation(t, B, 0, prob, kExact) == sc::Interval{p * (1 - p), p * (1 - p)});

  const auto c0 = sc::correlation(t, B, 0, prob, kExact);
  CHECK(sc::cesaro_norm_sq(t, B, 7, 1, prob, kExact) == c0);
  CHECK(sc::cesaro_norm_sq(t, B, 0, 3, prob, kExact) == c0);
  CHECK(sc::cesaro_norm_sq(t, B, 2, 2, prob, kExact) == sc::Interval{sc::Rational(7, 121), sc::Rational(7, 121)});

  const auto bh = sc::blum_hanson_check(t, B, 2, 2, sc::Rational(1, 100), prob, kExact);
  CHECK(bh.premise_holds);
  CHECK(bh.conclusion_holds);
  CHECK(bh.norm_sq.hi == sc::Rational(7, 121));
  CHECK(bh.bound == sc::Rational(1, 100) + sc::Rational(9, 121));

  const auto wide = sc::blum_hanson_check(t, B, 2, 2, c0.hi + sc::Rational(1, 1000), prob, kExact);
  CHECK(wide.premise_holds);
  CHECK(wide.conclusion_holds);
  const auto stuck = sc::blum_hanson_check(t, B, 0, 3, c0.hi, prob, kExact);
  CHECK_FALSE(stuck.premise_holds);
}

TEST_CASE("correlation: reference errors") {
  auto t = two_two();
  const auto B = levels(2, {0});
  CHECK_THROWS_AS(sc::correlation(t, B, 1, sc::NormalizationMode::probability(0), kExact), sc::Error);
  CHECK_THROWS_AS(sc::correlation(t, B, 1, sc::NormalizationMode::probability(sc::Rational(1, 8)), kExact),
                  sc::Error);
  CHECK_THROWS_AS(sc::blum_hanson_check(t, B, 1, 1, 1, sc::NormalizationMode::infinite(), kExact), sc::Error);
  CHECK_THROWS_AS(sc::gram_norm_sq({}), sc::Error);
}

TEST_CASE("property: image conserves and preserves measure") {
  std::mt19937_64 rng(11);
  sc::StageTable t(test_support::affine_staircase());
  t.extend_to(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int j = static_cast<int>(test_support::uniform(rng, 2, 4));
    const auto A = test_support::random_set(rng, j, t.stage(j).h.get_si(), 0.25);
    const sc::Int m(test_support::uniform(rng, 0, 150));
    const sc::Rational tol = trial % 3 == 0 ? sc::Rational(1, 1 << 6) : sc::Rational(1, 1 << 10);
    const auto img = sc::image(t, A, m, tol);
    CHECK(img.residual <= tol);
    CHECK(sc::measure(t, img.resolved) + img.residual == sc::measure(t, A));
    const auto pieces = sc::image_pieces(t, A, m, tol);
    sc::Rational piece_mass = 0;
    for (const auto& p : pieces.pieces) piece_mass += sc::measure(t, p);
    CHECK(piece_mass == sc::measure(t, img.resolved));
  }
}

TEST_CASE("property: piecewise intersection counting agrees with materialized images") {
  std::mt19937_64 rng(5);
  sc::StageTable t(test_support::affine_staircase());
  t.extend_to(6);
  for (int trial = 0; trial < 60; ++trial) {
    const int ja = static_cast<int>(test_support::uniform(rng, 1, 4));
    const int jb = static_cast<int>(test_support::uniform(rng, 1, 4));
    const auto A = test_support::random_set(rng, ja, t.stage(ja).h.get_si(), 0.3);
    const auto B = test_support::random_set(rng, jb, t.stage(jb).h.get_si(), 0.3);
    const sc::Int m(test_support::uniform(rng, 0, 150));
    const sc::Rational tol(1, 1 << 10);
    const auto got = sc::measure_intersection(t, A, B, m, tol);
    const auto img = sc::image(t, B, m, tol);
    CHECK(got.hi - got.lo == img.residual);
    const auto fine_a = sc::refine(t, A, std::max(img.resolved.stage, A.stage));
    const auto fine_b = img.resolved.stage >= A.stage ? img.resolved : sc::refine(t, img.resolved, A.stage);
    long common = 0;
    for (const auto& v : fine_b.levels) common += fine_a.contains(v) ? 1 : 0;
    CHECK(got.lo == t.stage(fine_b.stage).w * sc::Rational(common));
  }
}

TEST_CASE("property: measure symmetry under m = 0 and mass bounds") {
  std::mt19937_64 rng(17);
  sc::StageTable t(test_support::affine_staircase());
  t.extend_to(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto A = test_support::random_set(rng, 2, 4, 0.5);
    const auto B = test_support::random_set(rng, 3, 17, 0.4);
    const auto ab = sc::measure_intersection(t, A, B, 0, kExact);
    const auto ba = sc::measure_intersection(t, B, A, 0, kExact);
    CHECK(ab == ba);
    const sc::Int m(test_support::uniform(rng, 0, 100));
    const auto shifted = sc::measure_intersection(t, A, B, m, kExact);
    CHECK(shifted.hi <= sc::measure(t, A));
    CHECK(shifted.hi <= sc::measure(t, B));
  }
}

TEST_CASE("property: Gram expansion equals the direct norm of the averaged function") {
  std::mt19937_64 rng(23);
  sc::StageTable t(test_support::affine_staircase());
  t.extend_to(6);
  const int J = 6;
  const long H = t.stage(J).h.get_si();
  for (int trial = 0; trial < 10; ++trial) {
    const auto B = test_support::random_set(rng, 3, 17, 0.3);
    const long d = test_support::uniform(rng, 1, 60);
    const int L = static_cast<int>(test_support::uniform(rng, 1, 4));
    const sc::Rational mu_ref = t.stage(J).total;
    const auto mode = sc::NormalizationMode::probability(mu_ref);
    const auto got = sc::cesaro_norm_sq(t, B, d, L, mode, kExact);
    REQUIRE(got.is_point());

    // With mu_ref = mu(X_J) and every shifted copy of B inside tower J, the
    // norm of (1/L) sum_l (1_{T^{ld}B} - P(B)) is (1/mu_ref) int g^2 - P(B)^2
    // where g counts, per cell, how many shifted copies cover it.
    const auto fine = sc::refine(t, B, J);
    if (fine.levels.back().get_si() + (L - 1) * d > H) continue;
    std::vector<long> cover(static_cast<std::size_t>(H + 1), 0);
    for (int l = 0; l < L; ++l) {
      for (const auto& v : fine.levels) ++cover[static_cast<std::size_t>(v.get_si() + l * d)];
    }
    long squares = 0;
    for (long c : cover) squares += c * c;
    const sc::Rational pb = sc::measure(t, B) / mu_ref;
    const sc::Rational direct =
        t.stage(J).w * sc::Rational(squares) / sc::Rational(L * L) / mu_ref - pb * pb;
    CHECK(got.lo == direct);
  }
}

TEST_CASE("property: Blum-Hanson implication holds whenever the premise does") {
  std::mt19937_64 rng(29);
  sc::StageTable t(test_support::affine_staircase());
  t.extend_to(6);
  const auto mode = sc::NormalizationMode::probability(t.stage(6).total);
  for (int trial = 0; trial < 40; ++trial) {
    const auto B = test_support::random_set(rng, 2, 4, 0.4);
    const long d = test_support::uniform(rng, 1, 120);
    const int L = static_cast<int>(test_support::uniform(rng, 2, 5));
    const sc::Rational eps = sc::make_rational(test_support::uniform(rng, 1, 40), 400);
    const auto r = sc::blum_hanson_check(t, B, d, L, eps, mode, sc::Rational(1, 4096));
    if (r.premise_holds) CHECK(r.conclusion_holds);
    CHECK(r.norm_sq.lo <= r.norm_sq.hi);
  }
}
