#include "staircase/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace staircase::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& what, std::string_view text) {
  throw Error(ErrorCode::ParseError, what + ": '" + std::string(text) + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

int small_int(std::string_view text) {
  const Int v = parse_int(text);
  if (!v.fits_sint_p()) parse_fail("stage index out of range", text);
  return static_cast<int>(v.get_si());
}

std::pair<Int, Int> parse_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    Int v = parse_int(text);
    return {v, v};
  }
  return {parse_int(text.substr(0, dots)), parse_int(text.substr(dots + 2))};
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    auto sep = line.find('=');
    if (sep == std::string_view::npos) sep = line.find(':');
    if (sep == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    kv[std::string(trim(line.substr(0, sep)))] = unquote(line.substr(sep + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) { return parse_key_values(read_file(path)); }

CutPolicy parse_cut_policy(std::string_view text) {
  text = trim(text);
  if (text == "equal-height") return EqualHeightCuts{};
  if (starts_with(text, "list:")) {
    ExplicitCuts cuts;
    cuts.cuts = parse_index_list(text.substr(5));
    if (cuts.cuts.empty()) parse_fail("empty cut list", text);
    return cuts;
  }
  if (starts_with(text, "affine:")) {
    const auto parts = split(text.substr(7), ',');
    if (parts.size() != 2) parse_fail("affine cuts need a,b", text);
    return AffineCuts{parse_int(parts[0]), parse_int(parts[1])};
  }
  parse_fail("unknown cut policy", text);
}

ExplicitSpacers parse_spacer_rows(std::string_view text) {
  ExplicitSpacers out;
  for (std::string_view line : split(text, '\n')) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::vector<Int> row;
    for (auto v : split(line, ',')) row.push_back(parse_int(v));
    out.per_stage.push_back(std::move(row));
  }
  return out;
}

SpacerPolicy parse_spacer_policy(std::string_view text, const std::filesystem::path& base_dir) {
  text = trim(text);
  if (text == "staircase") return StaircaseSpacers{};
  if (starts_with(text, "const:")) return ConstantSpacers{parse_int(text.substr(6))};
  if (starts_with(text, "file:")) {
    std::filesystem::path path(std::string(trim(text.substr(5))));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return parse_spacer_rows(read_file(path));
  }
  parse_fail("unknown spacer policy", text);
}

ConstructionParams params_from(const KeyValues& kv, const std::filesystem::path& base_dir) {
  ConstructionParams params;
  if (auto it = kv.find("h1"); it != kv.end()) params.h1 = parse_int(it->second);
  if (auto it = kv.find("cuts"); it != kv.end()) params.cuts = parse_cut_policy(it->second);
  if (auto it = kv.find("spacers"); it != kv.end()) params.spacers = parse_spacer_policy(it->second, base_dir);
  if (auto it = kv.find("base_width"); it != kv.end()) params.base_width = parse_rational(it->second);
  params.validate();
  return params;
}

std::vector<Int> parse_index_list(std::string_view text) {
  std::vector<Int> out;
  text = trim(text);
  if (text.empty()) return out;
  for (auto item : split(text, ',')) {
    item = trim(item);
    if (item.empty()) parse_fail("empty list item", text);
    auto [lo, hi] = parse_range(item);
    if (lo > hi) parse_fail("descending range", item);
    for (Int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

LevelSet parse_level_set(std::string_view text) {
  const std::string_view t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string_view::npos) parse_fail("expected stage=<j>:levels=<list>", text);
  const std::string_view head = trim(t.substr(0, colon));
  const std::string_view tail = trim(t.substr(colon + 1));
  if (!starts_with(head, "stage=") || !starts_with(tail, "levels=")) {
    parse_fail("expected stage=<j>:levels=<list>", text);
  }
  LevelSet set;
  set.stage = small_int(head.substr(6));
  set.levels = parse_index_list(tail.substr(7));
  std::sort(set.levels.begin(), set.levels.end());
  set.levels.erase(std::unique(set.levels.begin(), set.levels.end()), set.levels.end());
  return set;
}

std::string format_level_set(const LevelSet& set) {
  std::string out = "stage=" + std::to_string(set.stage) + ":levels=";
  std::size_t i = 0;
  bool first = true;
  while (i < set.levels.size()) {
    std::size_t k = i;
    while (k + 1 < set.levels.size() && set.levels[k + 1] == set.levels[k] + 1) ++k;
    if (!first) out += ',';
    first = false;
    out += set.levels[i].get_str();
    if (k > i) out += ".." + set.levels[k].get_str();
    i = k + 1;
  }
  return out;
}

RakeSpec parse_rake_spec(std::string_view text) {
  RakeSpec spec;
  bool seen[6] = {};
  for (auto field : split(trim(text), ';')) {
    field = trim(field);
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) parse_fail("rake field without '='", field);
    const std::string_view key = trim(field.substr(0, eq));
    const std::string_view value = trim(field.substr(eq + 1));
    if (key == "j") {
      spec.j = small_int(value);
      seen[0] = true;
    } else if (key == "s") {
      spec.s = parse_int(value);
      seen[1] = true;
    } else if (key == "L") {
      spec.L = parse_int(value);
      seen[2] = true;
    } else if (key == "step") {
      spec.step = parse_int(value);
      seen[3] = true;
    } else if (key == "levels") {
      std::tie(spec.lo, spec.hi) = parse_range(value);
      seen[4] = true;
    } else {
      parse_fail("unknown rake field", key);
    }
  }
  if (!seen[3]) {
    spec.step = 1;
    seen[3] = true;
  }
  for (int k = 0; k < 5; ++k) {
    if (!seen[k]) parse_fail("rake spec needs j, s, L, levels", text);
  }
  return spec;
}

std::string landing_text(const ProfileSegment& seg) {
  switch (seg.landing) {
    case Landing::Level: return seg.level.get_str();
    case Landing::Spacer: return "spacer";
    case Landing::Unresolved: return "unresolved";
  }
  return "unresolved";
}

std::string delay_text(const ProfileSegment& seg) { return seg.delay ? seg.delay->get_str() : "boundary"; }

std::string format_segment(const ProfileSegment& seg) {
  return "cols=" + seg.first_column.get_str() + ".." + seg.last_column.get_str() + ";land=" + landing_text(seg) +
         ";delay=" + delay_text(seg);
}

std::string format_interval(const Interval& iv) { return to_string(iv.lo) + "," + to_string(iv.hi); }

}  // namespace staircase::io
