#include "staircase/numeric.hpp"

#include <cctype>
#include <limits>

namespace staircase {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::PolicyUndefined: return "PolicyUndefined";
    case ErrorCode::ColumnOutOfRange: return "ColumnOutOfRange";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::StageMissing: return "StageMissing";
    case ErrorCode::CannotExtend: return "CannotExtend";
    case ErrorCode::BadReference: return "BadReference";
    case ErrorCode::DepthInsufficient: return "DepthInsufficient";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::size_t to_size(const Int& x, std::string_view what) {
  if (x < 0 || !x.fits_ulong_p() ||
      x.get_ui() > std::numeric_limits<std::size_t>::max()) {
    throw Error(ErrorCode::ResourceLimit,
                std::string(what) + " does not fit a machine size: " + x.get_str());
  }
  return static_cast<std::size_t>(x.get_ui());
}

Int staircase_block_index(const Int& n, const Int& a) {
  // x^2 + (2a-1)x - 2n <= 0
  const Int b = 2 * a - 1;
  const Int disc = b * b + 8 * n;
  Int x = floor_div(isqrt(disc) - b, 2);
  if (x < 0) x = 0;
  auto start = [&a](const Int& k) -> Int { return k * a + k * (k - 1) / 2; };
  while (start(x) > n) --x;
  while (start(x + 1) <= n) ++x;
  return x;
}

SqrtBounds sqrt_bounds(const Rational& x, unsigned bits) {
  if (x < 0) throw Error(ErrorCode::InvalidArgument, "sqrt of negative rational");
  const Int& p = x.get_num();
  const Int& q = x.get_den();
  // sqrt(p/q) = sqrt(p*q)/q
  const Int pq = p * q;
  const Int root = isqrt(pq);
  if (root * root == pq) {
    Rational exact = make_rational(root, q);
    return {exact, exact};
  }
  Int scale = 1;
  scale <<= bits;
  const Int scaled = isqrt(pq * scale * scale);
  return {make_rational(scaled, q * scale), make_rational(scaled + 1, q * scale)};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_integer_text(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Int parse_int(std::string_view text) {
  std::string_view s = trim(text);
  if (!is_integer_text(s)) {
    throw Error(ErrorCode::ParseError, "not an integer: '" + std::string(text) + "'");
  }
  if (s.front() == '+') s.remove_prefix(1);
  return Int(std::string(s), 10);
}

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(s));
  const Int num = parse_int(s.substr(0, slash));
  const Int den = parse_int(s.substr(slash + 1));
  if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator: '" + std::string(text) + "'");
  return make_rational(num, den);
}

std::string to_string(const Rational& q) { return q.get_str(); }
std::string to_string(const Int& z) { return z.get_str(); }

}  // namespace staircase
