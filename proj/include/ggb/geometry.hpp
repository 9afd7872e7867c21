#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ggb/error.hpp"

namespace ggb {

// Screen location as width/height fractions in [0,1].
struct NormPoint {
  double x = 0.0;
  double y = 0.0;

  bool valid() const {
    return x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0;
  }
  friend bool operator==(const NormPoint&, const NormPoint&) = default;
};

// (left, top, right, down) fractions in [0,1].
struct NormBBox {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double down = 0.0;

  bool valid() const {
    return left >= 0.0 && right <= 1.0 && top >= 0.0 && down <= 1.0 &&
           left <= right && top <= down;
  }
  double area() const { return (right - left) * (down - top); }
  friend bool operator==(const NormBBox&, const NormBBox&) = default;
};

struct PixelDims {
  int width = 0;
  int height = 0;

  bool valid() const { return width > 0 && height > 0; }
};

struct PixelPoint {
  int x = 0;
  int y = 0;
};

using Location = std::variant<NormPoint, NormBBox>;

inline NormPoint normalize_point(PixelPoint p, PixelDims dims) {
  if (!dims.valid()) throw Error(ErrorKind::Range, "non-positive pixel dims");
  if (p.x < 0 || p.x >= dims.width)
    throw Error(ErrorKind::Range, "pixel x=" + std::to_string(p.x) +
                                      " outside [0, " +
                                      std::to_string(dims.width) + ")");
  if (p.y < 0 || p.y >= dims.height)
    throw Error(ErrorKind::Range, "pixel y=" + std::to_string(p.y) +
                                      " outside [0, " +
                                      std::to_string(dims.height) + ")");
  return {static_cast<double>(p.x) / dims.width,
          static_cast<double>(p.y) / dims.height};
}

namespace detail {

// Round half away from zero at two decimals, rendered "d.dd".
inline std::string two_decimals(double v) {
  long long cents = std::llround(v * 100.0);  // llround is half-away-from-zero
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", cents < 0 ? "-" : "",
                std::llabs(cents) / 100, std::llabs(cents) % 100);
  return buf;
}

}  // namespace detail

inline std::string format_location(const NormPoint& p) {
  return "(" + detail::two_decimals(p.x) + ", " + detail::two_decimals(p.y) +
         ")";
}

inline std::string format_location(const NormBBox& b) {
  return "(" + detail::two_decimals(b.left) + ", " + detail::two_decimals(b.top) +
         ", " + detail::two_decimals(b.right) + ", " +
         detail::two_decimals(b.down) + ")";
}

inline std::string format_location(const Location& loc) {
  return std::visit([](const auto& v) { return format_location(v); }, loc);
}

namespace detail {

struct NumScan {
  bool ok = false;
  double value = 0.0;
  std::size_t end = 0;  // offset one past the number
  std::string error;
};

inline NumScan scan_number(std::string_view s, std::size_t pos) {
  NumScan out;
  std::size_t i = pos;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  std::size_t start = i;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  bool digits = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    digits = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      digits = true;
    }
  }
  if (!digits) {
    out.error = "non-numeric token";
    out.end = start;
    return out;
  }
  out.value = std::stod(std::string(s.substr(start, i - start)));
  out.ok = true;
  out.end = i;
  return out;
}

}  // namespace detail

// Scans free text for the first well-formed coordinate tuple. 2-tuples
// parse as points, 4-tuples as bboxes. Values within 0.01 outside [0,1]
// are clamped; anything further out disqualifies the candidate.
inline std::optional<Location> try_parse_location(std::string_view text,
                                                  std::string* error = nullptr,
                                                  std::size_t* error_offset = nullptr) {
  std::string first_error;
  std::size_t first_offset = 0;
  bool have_error = false;
  auto fail = [&](std::size_t off, const std::string& msg) {
    if (!have_error) {
      have_error = true;
      first_error = msg;
      first_offset = off;
    }
  };

  for (std::size_t open = 0; open < text.size(); ++open) {
    if (text[open] != '(') continue;
    double vals[4];
    std::size_t pos = open + 1;
    std::size_t arity = 0;
    bool candidate_ok = true;
    for (;;) {
      auto num = detail::scan_number(text, pos);
      if (!num.ok) {
        fail(num.end, num.error);
        candidate_ok = false;
        break;
      }
      if (num.value > 1.01 || num.value < -0.01) {
        fail(pos, "value out of range: " + std::to_string(num.value));
        candidate_ok = false;
        break;
      }
      if (arity >= 4) {
        fail(pos, "wrong arity: more than 4 components");
        candidate_ok = false;
        break;
      }
      vals[arity++] = std::clamp(num.value, 0.0, 1.0);
      pos = num.end;
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < text.size() && text[pos] == ')') break;
      fail(pos, "expected ',' or ')'");
      candidate_ok = false;
      break;
    }
    if (!candidate_ok) continue;
    if (arity == 2) return Location(NormPoint{vals[0], vals[1]});
    if (arity == 4) return Location(NormBBox{vals[0], vals[1], vals[2], vals[3]});
    fail(open, "wrong arity: " + std::to_string(arity) + " components");
  }

  if (error) *error = have_error ? first_error : "no coordinate tuple found";
  if (error_offset) *error_offset = first_offset;
  return std::nullopt;
}

inline Location parse_location(std::string_view text) {
  std::string err;
  std::size_t off = 0;
  auto loc = try_parse_location(text, &err, &off);
  if (!loc)
    throw Error(ErrorKind::Parse,
                err + " at byte " + std::to_string(off));
  return *loc;
}

// Closed intervals: edges count as hits.
inline bool point_in_bbox(const NormPoint& p, const NormBBox& b) {
  return p.x >= b.left && p.x <= b.right && p.y >= b.top && p.y <= b.down;
}

inline NormPoint bbox_center(const NormBBox& b) {
  return {(b.left + b.right) / 2.0, (b.top + b.down) / 2.0};
}

inline double point_distance(const NormPoint& a, const NormPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace ggb
