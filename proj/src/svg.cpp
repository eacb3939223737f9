#include "staircase/svg.hpp"

#include <cstdio>
#include <sstream>

#include "staircase/io.hpp"

namespace staircase::svg {

namespace {

constexpr double kLeft = 60, kTop = 40, kWidth = 720, kHeight = 300;

// Ratios only feed pixel coordinates; exact values stay in the CSV.
double ratio(const Int& num, const Int& den) {
  if (den == 0) return 0;
  return make_rational(num, den).get_d();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_profile(const DelayProfile& profile, const Stage& stage) {
  const Int columns = stage.r ? *stage.r : Int(1);
  const Int& h = stage.h;
  auto x_of = [&](const Int& col) { return kLeft + kWidth * ratio(col - 1, columns); };
  auto y_of = [&](const Int& level) { return kTop + kHeight * (1.0 - ratio(level, h)); };

  std::ostringstream os;
  os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << num(kLeft * 2 + kWidth) << R"(" height=")"
     << num(kTop * 2 + kHeight + 20) << R"(" font-family="serif" font-size="13">)" << '\n';
  os << R"(<rect x=")" << num(kLeft) << R"(" y=")" << num(kTop) << R"(" width=")" << num(kWidth) << R"(" height=")"
     << num(kHeight) << R"(" fill="none" stroke="black"/>)" << '\n';
  os << R"(<text x=")" << num(kLeft) << R"(" y=")" << num(kTop - 12) << R"(">stage )" << profile.j << " (h="
     << h.get_str() << ", r=" << columns.get_str() << "), m=" << profile.m.get_str() << "</text>\n";
  os << R"(<text x=")" << num(kLeft + kWidth + 6) << R"(" y=")" << num(kTop + kHeight) << R"(">E</text>)" << '\n';
  os << R"(<text x=")" << num(kLeft + kWidth + 6) << R"(" y=")" << num(kTop + 4) << R"(">roof</text>)" << '\n';

  int domain = 0;
  for (const auto& seg : profile.segments) {
    const double x0 = x_of(seg.first_column);
    const double x1 = x_of(seg.last_column + 1);
    if (seg.landing != Landing::Level) {
      const char* fill = seg.landing == Landing::Spacer ? "#d9d9d9" : "#9e9e9e";
      os << R"(<rect x=")" << num(x0) << R"(" y=")" << num(kTop) << R"(" width=")" << num(x1 - x0)
         << R"(" height=")" << num(kHeight) << R"(" fill=")" << fill << R"(" fill-opacity="0.5"><title>)"
         << io::format_segment(seg) << "</title></rect>\n";
      continue;
    }
    const Int last_level = seg.level - (seg.column_count() - 1) * *seg.delay;
    os << R"(<line x1=")" << num(x0) << R"(" y1=")" << num(y_of(seg.level)) << R"(" x2=")" << num(x1)
       << R"(" y2=")" << num(y_of(last_level)) << R"(" stroke="black" stroke-width="1.5"><title>)"
       << io::format_segment(seg) << "</title></line>\n";
    os << R"(<line x1=")" << num(x1) << R"(" y1=")" << num(kTop) << R"(" x2=")" << num(x1) << R"(" y2=")"
       << num(kTop + kHeight) << R"(" stroke="black" stroke-dasharray="2,4"/>)" << '\n';
    os << R"(<text x=")" << num(x0 + 3) << R"(" y=")" << num(kTop + kHeight - 6) << R"(">D)" << domain << "</text>\n";
    os << R"(<text x=")" << num(x0 + 3) << R"(" y=")" << num(kTop + 16) << R"(" font-size="11">delay )"
       << seg.delay->get_str() << "</text>\n";
    ++domain;
  }
  os << R"(<text x=")" << num(kLeft) << R"(" y=")" << num(kTop + kHeight + 16) << R"(">columns 1..)"
     << columns.get_str() << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace staircase::svg
