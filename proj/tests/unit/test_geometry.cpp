#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "drivesim/geometry.hpp"
#include "drivesim/world.hpp"

using namespace drivesim;
using geo::Vec2;

namespace {

geo::Polygon square(Vec2 c, double half) {
  return {{c.x - half, c.y - half}, {c.x + half, c.y - half}, {c.x + half, c.y + half}, {c.x - half, c.y + half}};
}

WorldMap map_with(std::vector<geo::Polygon> polys, SemanticClass cls = SemanticClass::building) {
  WorldMap m;
  ObstacleId id = 1;
  for (auto& p : polys) m.obstacles.push_back({id++, std::move(p), cls, 1.0});
  m.reindex();
  return m;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("normalize_angle keeps in-range values and wraps into (-pi, pi]") {
    constexpr double pi = std::numbers::pi;
    CHECK(geo::normalize_angle(0.3) == 0.3);
    CHECK(geo::normalize_angle(pi) == pi);
    CHECK(geo::normalize_angle(-pi) == doctest::Approx(pi));
    CHECK(geo::normalize_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
    CHECK(geo::normalize_angle(-5 * pi / 2) == doctest::Approx(-pi / 2));
    for (double a = -20; a < 20; a += 0.37) {
      const double n = geo::normalize_angle(a);
      CHECK(n > -pi);
      CHECK(n <= pi);
      CHECK(std::sin(n) == doctest::Approx(std::sin(a)).epsilon(1e-9));
      CHECK(std::cos(n) == doctest::Approx(std::cos(a)).epsilon(1e-9));
    }
  }

  TEST_CASE("frame transforms round-trip") {
    const geo::Pose2 f{{3, -2}, 0.7};
    const Vec2 p{5, 1};
    const Vec2 back = geo::to_world(f, geo::to_local(f, p));
    CHECK(back.x == doctest::Approx(p.x));
    CHECK(back.y == doctest::Approx(p.y));
    const auto c = geo::compose({{1, 1}, std::numbers::pi / 2}, {{2, 0}, std::numbers::pi / 2});
    CHECK(c.position.x == doctest::Approx(1));
    CHECK(c.position.y == doctest::Approx(3));
    CHECK(c.heading == doctest::Approx(std::numbers::pi));
  }

  TEST_CASE("polygon predicates") {
    const auto sq = square({0, 0}, 1);
    CHECK(geo::is_counterclockwise(sq));
    CHECK(geo::is_convex(sq));
    CHECK(geo::is_simple(sq));
    CHECK(geo::area(sq) == doctest::Approx(4));
    const geo::Polygon bow{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
    CHECK_FALSE(geo::is_simple(bow));
    const geo::Polygon ell{{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}};
    CHECK(geo::is_simple(ell));
    CHECK_FALSE(geo::is_convex(ell));
    CHECK(geo::contains(ell, {0.5, 3}));
    CHECK_FALSE(geo::contains(ell, {3, 3}));
    const auto tris = geo::triangulate(ell);
    double total = 0;
    for (const auto& t : tris) total += geo::area(t);
    CHECK(total == doctest::Approx(geo::area(ell)));
  }

  TEST_CASE("oriented_rect is counterclockwise with the given extents") {
    const auto r = geo::oriented_rect({{1, 2}, 0.4}, 4, 2);
    CHECK(r.size() == 4);
    CHECK(geo::is_counterclockwise(r));
    CHECK(geo::area(r) == doctest::Approx(8));
  }

  TEST_CASE("cast_ray on an empty map misses") {
    WorldMap m;
    m.reindex();
    const WorldView view{&m, {}};
    CHECK_FALSE(cast_ray(view, {0, 0}, {1, 0}, 100).has_value());
    const auto scan = sector_scan(view, {{0, 0}, 0.3}, 1.0, 25, 7);
    CHECK(scan == std::vector<double>(7, 25.0));
  }

  TEST_CASE("cast_ray hits a unit square at 9.5 m") {
    const auto m = map_with({square({10, 0}, 0.5)});
    const WorldView view{&m, {}};
    const auto hit = cast_ray(view, {0, 0}, {1, 0}, 100);
    REQUIRE(hit);
    CHECK(hit->distance == doctest::Approx(9.5).epsilon(1e-12));
    CHECK(hit->object == ObjectRef::obstacle(1));
    // Sampling along the ray at 1 mm: the first point inside is at 9.5 m.
    double first = -1;
    for (int i = 0; i < 20000; ++i) {
      if (oracle::inside(m.obstacles[0].polygon, {i * 1e-3, 0})) {
        first = i * 1e-3;
        break;
      }
    }
    CHECK(first == doctest::Approx(9.5).epsilon(1e-3));
  }

  TEST_CASE("rays starting inside report zero against that object") {
    const auto m = map_with({square({0, 0}, 2)});
    const WorldView view{&m, {}};
    const auto hit = cast_ray(view, {0.5, 0.5}, {0, 1}, 10);
    REQUIRE(hit);
    CHECK(hit->distance == 0.0);
    CHECK(hit->object == ObjectRef::obstacle(1));
  }

  TEST_CASE("ground classes do not block rays") {
    const auto m = map_with({square({10, 0}, 0.5)}, SemanticClass::road);
    const WorldView view{&m, {}};
    CHECK_FALSE(cast_ray(view, {0, 0}, {1, 0}, 100).has_value());
  }

  TEST_CASE("hits beyond max_range are misses") {
    const auto m = map_with({square({10, 0}, 0.5)});
    const WorldView view{&m, {}};
    CHECK_FALSE(cast_ray(view, {0, 0}, {1, 0}, 9.4).has_value());
    CHECK(cast_ray(view, {0, 0}, {1, 0}, 9.5).has_value());
  }

  TEST_CASE("excluded objects are ignored") {
    const auto m = map_with({square({10, 0}, 0.5), square({20, 0}, 0.5)});
    const WorldView view{&m, {}};
    const ObjectRef ex[] = {ObjectRef::obstacle(1)};
    const auto hit = cast_ray(view, {0, 0}, {1, 0}, 100, ex);
    REQUIRE(hit);
    CHECK(hit->distance == doctest::Approx(19.5));
    CHECK(hit->object == ObjectRef::obstacle(2));
  }

  TEST_CASE("sector scan against a wall follows 20 / cos(theta)") {
    const auto m = map_with({{{20, -1000}, {21, -1000}, {21, 1000}, {20, 1000}}});
    const WorldView view{&m, {}};
    const auto scan = sector_scan(view, {{0, 0}, 0}, std::numbers::pi / 2, 100, 3);
    REQUIRE(scan.size() == 3);
    CHECK(std::abs(scan[0] - 20 / std::cos(std::numbers::pi / 4)) < 1e-6);
    CHECK(std::abs(scan[1] - 20) < 1e-6);
    CHECK(std::abs(scan[2] - 20 / std::cos(std::numbers::pi / 4)) < 1e-6);
  }

  TEST_CASE("single-ray scan equals cast_ray along the heading") {
    const auto m = map_with({square({6, 3}, 1)});
    const WorldView view{&m, {}};
    const geo::Pose2 pose{{0, 0}, std::atan2(3, 6)};
    const auto scan = sector_scan(view, pose, 1.0, 50, 1);
    const auto hit = cast_ray(view, pose.position, geo::unit_from_angle(pose.heading), 50);
    REQUIRE(hit);
    CHECK(scan[0] == hit->distance);
  }

  TEST_CASE("scan elements equal cast_ray over the same ray set") {
    const auto m = map_with({square({6, 3}, 1), square({8, -2}, 1.5)});
    const WorldView view{&m, {}};
    const geo::Pose2 pose{{0, 0}, 0.1};
    const auto scan = sector_scan(view, pose, 1.2, 40, 9);
    for (int i = 0; i < 9; ++i) {
      const auto hit =
          cast_ray(view, pose.position, geo::unit_from_angle(sector_ray_angle(pose.heading, 1.2, 9, i)), 40);
      CHECK(scan[i] == (hit ? hit->distance : 40.0));
    }
  }

  TEST_CASE("overlap examples") {
    const auto a = square({0, 0}, 0.5);
    CHECK(geo::overlap(a, a));
    CHECK_FALSE(geo::overlap(a, square({2, 0}, 0.5)));
    CHECK(geo::overlap(a, square({0.9, 0}, 0.5)));
    CHECK_FALSE(geo::overlap(a, square({1.0, 0}, 0.5)));  // shared edge only
  }

  TEST_CASE("overlap is symmetric and agrees with Monte Carlo sampling") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> pos(-3, 3), ang(-3.14, 3.14), len(0.5, 4);
    int conclusive = 0;
    for (int i = 0; i < 300; ++i) {
      const auto a = geo::oriented_rect({{pos(gen), pos(gen)}, ang(gen)}, len(gen), len(gen));
      const auto b = geo::oriented_rect({{pos(gen), pos(gen)}, ang(gen)}, len(gen), len(gen));
      const bool ab = geo::overlap(a, b);
      CHECK(ab == geo::overlap(b, a));
      const double mc = oracle::overlap_area_mc(a, b, 10000, 100 + i);
      const double cell = geo::area(a) / 10000.0 * 4;
      if (mc > cell) {
        CHECK(ab);
        ++conclusive;
      } else if (mc == 0.0) {
        // Sampled no overlap; only a sliver could remain.
        if (ab) {
          CHECK(oracle::overlap_area_mc(a, b, 200000, 9000 + i) < 0.01 * geo::area(a));
        }
        ++conclusive;
      }
    }
    CHECK(conclusive > 250);
  }

  TEST_CASE("concave polygons overlap through their triangulation") {
    const geo::Polygon ell{{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}};
    CHECK(geo::overlap(square({0.5, 3}, 0.3), ell));
    CHECK_FALSE(geo::overlap(square({3, 3}, 0.5), ell));
    CHECK(geo::overlap(square({3, 0.5}, 0.2), ell));
  }
}
