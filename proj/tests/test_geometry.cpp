#include <doctest.h>

#include <cmath>
#include <regex>

#include "ggb/geometry.hpp"
#include "ggb/rng.hpp"

using namespace ggb;

TEST_CASE("normalize_point basics") {
  auto p = normalize_point({960, 540}, {1920, 1080});
  CHECK(p.x == 0.5);
  CHECK(p.y == 0.5);

  auto o = normalize_point({0, 0}, {640, 480});
  CHECK(o.x == 0.0);
  CHECK(o.y == 0.0);

  // exact rational division, frozen against 1919/1920 and 1079/1080
  auto e = normalize_point({1919, 1079}, {1920, 1080});
  CHECK(e.x == doctest::Approx(0.9994791666666667).epsilon(1e-15));
  CHECK(e.y == doctest::Approx(0.9990740740740741).epsilon(1e-15));
  CHECK(e.x == 1919.0 / 1920.0);
  CHECK(e.y == 1079.0 / 1080.0);
}

TEST_CASE("normalize_point range errors name the axis") {
  CHECK_THROWS_WITH_AS(normalize_point({1920, 0}, {1920, 1080}),
                       doctest::Contains("pixel x"), Error);
  CHECK_THROWS_WITH_AS(normalize_point({0, -1}, {1920, 1080}),
                       doctest::Contains("pixel y"), Error);
}

TEST_CASE("format_location") {
  CHECK(format_location(NormPoint{0.49, 0.40}) == "(0.49, 0.40)");
  CHECK(format_location(NormPoint{0.0, 0.0}) == "(0.00, 0.00)");
  CHECK(format_location(NormBBox{0.1, 0.2, 0.3, 0.4}) ==
        "(0.10, 0.20, 0.30, 0.40)");
  // round half away from zero
  CHECK(format_location(NormPoint{0.005, 0.995}) == "(0.01, 1.00)");
}

TEST_CASE("parse_location") {
  auto loc = parse_location("click (0.49, 0.40)");
  REQUIRE(std::holds_alternative<NormPoint>(loc));
  CHECK(std::get<NormPoint>(loc) == NormPoint{0.49, 0.40});

  auto b = parse_location("(1.00, 1.00)");
  CHECK(std::get<NormPoint>(b) == NormPoint{1.0, 1.0});

  auto lenient = parse_location("(0.495, .4)");
  CHECK(std::get<NormPoint>(lenient) == NormPoint{0.495, 0.4});

  auto bbox = parse_location("the box (0.1, 0.2, 0.3, 0.4) here");
  REQUIRE(std::holds_alternative<NormBBox>(bbox));
  CHECK(std::get<NormBBox>(bbox) == NormBBox{0.1, 0.2, 0.3, 0.4});
}

TEST_CASE("parse_location clamping band") {
  auto near = parse_location("(1.005, -0.005)");
  CHECK(std::get<NormPoint>(near) == NormPoint{1.0, 0.0});
  CHECK_THROWS_AS((void)parse_location("(1.5, 0.5)"), Error);
  CHECK_THROWS_AS((void)parse_location("(0.5)"), Error);
  CHECK_THROWS_AS((void)parse_location("no tuple here"), Error);
  CHECK_THROWS_WITH_AS((void)parse_location("(a, b)"),
                       doctest::Contains("byte"), Error);
}

TEST_CASE("point_in_bbox closed intervals") {
  NormBBox b{0.4, 0.4, 0.6, 0.6};
  CHECK(point_in_bbox({0.5, 0.5}, b));
  CHECK(point_in_bbox({0.4, 0.4}, b));
  CHECK_FALSE(point_in_bbox({0.39, 0.5}, b));
}

TEST_CASE("bbox_center and point_distance") {
  CHECK(bbox_center({0.4, 0.4, 0.6, 0.6}) == NormPoint{0.5, 0.5});
  CHECK(bbox_center({0.0, 0.0, 1.0, 1.0}) == NormPoint{0.5, 0.5});
  auto c = bbox_center({0.10, 0.20, 0.30, 0.40});
  CHECK(c.x == doctest::Approx(0.20).epsilon(1e-15));
  CHECK(c.y == doctest::Approx(0.30).epsilon(1e-15));

  CHECK(point_distance({0, 0}, {0, 0}) == 0.0);
  CHECK(point_distance({0, 0}, {1, 1}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(point_distance({0.3, 0.4}, {0.0, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("property: format/parse round trip within quantization") {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    if (i % 2 == 0) {
      NormPoint p{rng.next_double(), rng.next_double()};
      auto back = parse_location(format_location(p));
      auto q = std::get<NormPoint>(back);
      CHECK(std::abs(q.x - p.x) <= 0.005);
      CHECK(std::abs(q.y - p.y) <= 0.005);
    } else {
      double a = rng.next_double(), b = rng.next_double();
      double c = rng.next_double(), d = rng.next_double();
      NormBBox box{std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
      auto back = std::get<NormBBox>(parse_location(format_location(box)));
      CHECK(std::abs(back.left - box.left) <= 0.005);
      CHECK(std::abs(back.top - box.top) <= 0.005);
      CHECK(std::abs(back.right - box.right) <= 0.005);
      CHECK(std::abs(back.down - box.down) <= 0.005);
    }
  }
}

TEST_CASE("property: center inside box, grammar, denormalization") {
  Rng rng(7);
  std::regex point_re(R"(^\(\d\.\d\d, \d\.\d\d\)$)");
  for (int i = 0; i < 2000; ++i) {
    double a = rng.next_double(), b = rng.next_double();
    double c = rng.next_double(), d = rng.next_double();
    NormBBox box{std::min(a, b), std::min(c, d), std::max(a, b) + 1e-6,
                 std::max(c, d) + 1e-6};
    if (!box.valid()) continue;
    CHECK(point_in_bbox(bbox_center(box), box));
    CHECK(std::regex_match(format_location(bbox_center(box)), point_re));

    PixelDims dims{1 + static_cast<int>(rng.next_below(4000)),
                   1 + static_cast<int>(rng.next_below(4000))};
    PixelPoint px{static_cast<int>(rng.next_below(dims.width)),
                  static_cast<int>(rng.next_below(dims.height))};
    NormPoint n = normalize_point(px, dims);
    CHECK(std::abs(n.x * dims.width - px.x) <= 1e-9 * std::max(1, px.x));
    CHECK(std::abs(n.y * dims.height - px.y) <= 1e-9 * std::max(1, px.y));
  }
}
