#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "staircase/analysis.hpp"
#include "staircase/construction.hpp"

namespace staircase::io {

/// Flat `key = value` (or `key: value`) text; `#` starts a comment, values
/// may be quoted. Later keys override earlier ones.
using KeyValues = std::map<std::string, std::string, std::less<>>;
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

/// Keys: h1, cuts ("list:2,3,4" | "affine:a,b" | "equal-height"),
/// spacers ("staircase" | "const:k" | "file:<path>"), base_width ("p/q").
/// Relative spacer files resolve against base_dir.
ConstructionParams params_from(const KeyValues& kv, const std::filesystem::path& base_dir = {});

CutPolicy parse_cut_policy(std::string_view text);
SpacerPolicy parse_spacer_policy(std::string_view text, const std::filesystem::path& base_dir = {});
/// One stage per non-empty line, comma-separated spacer counts.
ExplicitSpacers parse_spacer_rows(std::string_view text);

/// Comma-separated integers and inclusive ranges "a..b".
std::vector<Int> parse_index_list(std::string_view text);

/// `stage=<j>:levels=<list>`; the result is sorted and duplicate-free.
LevelSet parse_level_set(std::string_view text);
std::string format_level_set(const LevelSet& set);

struct RakeSpec {
  int j = 0;
  Int s, L, step;
  Int lo, hi;
};
/// `j=<j>;s=<s>;L=<L>;step=<q>;levels=<lo>..<hi>`
RakeSpec parse_rake_spec(std::string_view text);

/// `cols=<a>..<b>;land=<t|spacer|unresolved>;delay=<d|boundary>`
std::string format_segment(const ProfileSegment& seg);
std::string landing_text(const ProfileSegment& seg);
std::string delay_text(const ProfileSegment& seg);

std::string format_interval(const Interval& iv);

}  // namespace staircase::io
