#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "staircase/construction.hpp"

namespace test_support {

namespace sc = staircase;

inline sc::ConstructionParams list_cuts(std::vector<long> cuts, long h1 = 1) {
  sc::ConstructionParams p;
  p.h1 = h1;
  sc::ExplicitCuts c;
  for (long r : cuts) c.cuts.emplace_back(r);
  p.cuts = c;
  return p;
}

/// r_j = j + 1 staircase starting from h_1 = 1.
inline sc::ConstructionParams affine_staircase() {
  sc::ConstructionParams p;
  p.cuts = sc::AffineCuts{1, 1};
  return p;
}

inline sc::LevelSet levels(int stage, std::vector<long> ls) {
  sc::LevelSet s;
  s.stage = stage;
  for (long v : ls) s.levels.emplace_back(v);
  return s;
}

inline long uniform(std::mt19937_64& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

/// Random nonempty subset of [0, h].
inline sc::LevelSet random_set(std::mt19937_64& rng, int stage, long h, double density = 0.3) {
  sc::LevelSet s;
  s.stage = stage;
  std::bernoulli_distribution pick(density);
  for (long v = 0; v <= h; ++v) {
    if (pick(rng)) s.levels.emplace_back(v);
  }
  if (s.levels.empty()) s.levels.emplace_back(uniform(rng, 0, h));
  return s;
}

}  // namespace test_support
