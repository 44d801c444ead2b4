#include <doctest.h>

#include "cartan/hyperconvexity.hpp"
#include "cartan/models.hpp"
#include "cartan/path.hpp"
#include "support.hpp"

using namespace cartan;

TEST_CASE("validate_metric accepts the two-point metric") {
  auto v = validate_metric({{0, 1}, {1, 0}});
  REQUIRE(std::holds_alternative<DistanceMatrix>(v));
  CHECK(std::get<DistanceMatrix>(v)(0, 1) == 1.0);
}

TEST_CASE("validate_metric names a triangle violation") {
  auto v = validate_metric({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}});
  REQUIRE(std::holds_alternative<MetricViolation>(v));
  const auto& bad = std::get<MetricViolation>(v);
  CHECK(bad.kind == MetricViolation::Kind::Triangle);
  CHECK(bad.indices == std::vector<std::size_t>{0, 2, 1});
  CHECK(bad.residual == doctest::Approx(1.0));
}

TEST_CASE("validate_metric reports each axiom by kind") {
  using K = MetricViolation::Kind;
  auto kind = [](const testing::Matrix& d) { return std::get<MetricViolation>(validate_metric(d)).kind; };
  CHECK(kind({{0, 1}, {2, 0}}) == K::Asymmetric);
  CHECK(kind({{0, -1}, {-1, 0}}) == K::Negative);
  CHECK(kind({{0, 0}, {0, 0}}) == K::ZeroOffDiagonal);
  CHECK(kind({{1, 1}, {1, 0}}) == K::NonzeroDiagonal);
  CHECK(kind({{0, 1, 2}, {1, 0}}) == K::NotSquare);
  CHECK_THROWS_AS(make_metric({{0, 2}, {1, 0}}), GeometryError);
}

TEST_CASE("validate_metric agrees with the triple scan on random inputs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto d = testing::random_graph_metric(rng, 6);
    CHECK(std::holds_alternative<DistanceMatrix>(validate_metric(d)) == testing::brute_force_metric(d));
    CHECK(testing::brute_force_metric(d));
    // break one entry
    auto e = testing::random_generic_metric(rng, 5);
    e[0][4] = e[4][0] = 5.0;
    CHECK(std::holds_alternative<DistanceMatrix>(validate_metric(e)) == testing::brute_force_metric(e));
  }
}

TEST_CASE("linf_distance") {
  CHECK(linf_distance(Point{0, 0}, Point{3, -4}) == 4.0);
  CHECK(linf_distance(Point{1.5, 2}, Point{1.5, 2}) == 0.0);
  CHECK_THROWS_AS(linf_distance(Point{0}, Point{0, 1}), GeometryError);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    Point u(7), v(7);
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    CHECK(linf_distance(u, v) == testing::coord_max(u, v));
  }
}

TEST_CASE("kuratowski_embed is an isometry") {
  auto two = kuratowski_embed(make_metric({{0, 5}, {5, 0}}));
  CHECK(two[0] == Point{0, 5});
  CHECK(two[1] == Point{5, 0});

  const auto C = cycle_metric(12);
  const auto K = kuratowski_embed(C);
  REQUIRE(K.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(K[i].size() == 12);
    for (int j = 0; j < 12; ++j) CHECK(linf_distance(K[i], K[j]) == testing::cycle_distance(i, j, 12));
  }

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto X = make_metric(testing::random_graph_metric(rng, 7));
    const auto E = kuratowski_embed(X);
    for (std::size_t i = 0; i < X.size(); ++i)
      for (std::size_t j = 0; j < X.size(); ++j) CHECK(std::abs(linf_distance(E[i], E[j]) - X(i, j)) <= 1e-12);
  }
}

TEST_CASE("mcshane_extend") {
  std::mt19937_64 rng(9);
  const auto B = make_metric(testing::random_graph_metric(rng, 5));

  SUBCASE("identity when every point is an anchor") {
    const auto K = kuratowski_embed(B);
    const auto f = mcshane_extend(B, {0, 1, 2, 3, 4}, K);
    CHECK(f == K);
  }
  SUBCASE("single anchor adds the distance") {
    const Point p{1.0, -2.0};
    const auto f = mcshane_extend(B, {2}, {p});
    for (std::size_t b = 0; b < 5; ++b) {
      CHECK(f[b][0] == doctest::Approx(p[0] + B(2, b)));
      CHECK(f[b][1] == doctest::Approx(p[1] + B(2, b)));
    }
  }
  SUBCASE("two anchors give a 1-Lipschitz map restricting to f") {
    const Point fa{0.0, 0.0};
    Point fb{B(0, 3) * 0.5, -B(0, 3)};
    const auto f = mcshane_extend(B, {0, 3}, {fa, fb});
    CHECK(f[0] == fa);
    CHECK(f[3] == fb);
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t b = 0; b < 5; ++b) CHECK(testing::coord_max(f[a], f[b]) <= B(a, b) + 1e-12);
  }
  SUBCASE("rejects a map that is not 1-Lipschitz") {
    CHECK_THROWS_AS(mcshane_extend(B, {0, 1}, {Point{0.0}, Point{B(0, 1) + 0.5}}), GeometryError);
    const auto audit = lipschitz_audit(B, {0, 1}, {Point{0.0}, Point{B(0, 1) + 0.5}});
    CHECK(audit.excess == doctest::Approx(0.5));
  }
}

TEST_CASE("path_length") {
  LinfSpace plane(2);
  CHECK(path_length(PolyLinePath({Point{1, 1}}), plane) == 0.0);
  CHECK(path_length(PolyLinePath({Point{1, 1}, Point{1, 1}}), plane) == 0.0);
  const auto seg = testing::dense({{0, 0}, {3, 1}}, 4);
  CHECK(seg.size() == 5);
  CHECK(path_length(seg, plane) == doctest::Approx(3.0).epsilon(1e-15));

  // refinement invariance
  const auto finer = testing::dense({{0, 0}, {3, 1}}, 64);
  CHECK(std::abs(path_length(finer, plane) - path_length(seg, plane)) < 1e-12);

  auto M = cycle_model(12);
  std::vector<Point> around;
  for (std::size_t v = 0; v <= 12; ++v) around.push_back(M.graph->vertex_point(v % 12));
  CHECK(path_length(PolyLinePath(around), *M.graph) == doctest::Approx(12.0));
}

TEST_CASE("path_distance") {
  LinfSpace plane(2);
  const auto c = testing::dense({{0, 0}, {2, 1}});
  CHECK(path_distance(c, c, plane) == 0.0);
  const auto up = testing::dense({{0, 0.75}, {2, 1.75}});
  CHECK(path_distance(c, up, plane) == doctest::Approx(0.75));

  // resampling on a finer grid of the second path
  const auto fine = testing::dense({{0, 0.75}, {2, 1.75}}, 32);
  CHECK(path_distance(c, fine, plane, lerp) == doctest::Approx(0.75));

  // metric on resampled pairs
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    auto rnd = [&] { return testing::dense({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}, 4); };
    const auto a = rnd(), b = rnd(), e = rnd();
    CHECK(path_distance(a, b, plane) == path_distance(b, a, plane));
    CHECK(path_distance(a, e, plane) <= path_distance(a, b, plane) + path_distance(b, e, plane) + 1e-12);
  }
}

TEST_CASE("path_distance on perturbed cylinder geodesics matches a finer resampling") {
  auto M = cylinder_model(12, 4);
  const auto& cyl = *M.cylinder;
  auto line = [&](double a0, double h0, double a1, double h1, int n) {
    std::vector<Point> pts;
    for (int i = 0; i <= n; ++i) {
      const double t = double(i) / n;
      pts.push_back(cyl.normalize({a0 + t * (a1 - a0), h0 + t * (h1 - h0)}));
    }
    return PolyLinePath(pts);
  };
  auto interp = [&](const Point& a, const Point& b, double t) { return cyl.straight(a, b, t); };
  const auto c = line(0, 1, 7, 2, 16);
  const auto d = line(0.2, 1.1, 7.1, 2.3, 16);
  const auto c10 = line(0, 1, 7, 2, 160);
  const auto d10 = line(0.2, 1.1, 7.1, 2.3, 160);
  CHECK(std::abs(path_distance(c, d, cyl, interp) - path_distance(c10, d10, cyl)) <= kTauSample);
}

TEST_CASE("geodesic_defect") {
  LinfSpace plane(2);
  CHECK(geodesic_defect(testing::dense({{0, 0}, {2, 1}}), plane) <= 1e-12);
  CHECK(geodesic_defect(testing::dense({{0, 0}, {1, 0}, {1, 1}}), plane) > 0.4);

  auto M = cycle_model(12);
  std::vector<Point> arc;
  for (int k = 0; k <= 16; ++k) arc.push_back(M.graph->shortest_arc(M.graph->vertex_point(0), M.graph->vertex_point(4), k / 16.0));
  CHECK(geodesic_defect(PolyLinePath(arc), *M.graph) <= 1e-12);
  CHECK(path_length(PolyLinePath(arc), *M.graph) == doctest::Approx(4.0));
}

TEST_CASE("PolyLinePath rejects malformed parameters") {
  CHECK_THROWS_AS(PolyLinePath({0.0, 0.5}, {Point{0}, Point{1}}), GeometryError);
  CHECK_THROWS_AS(PolyLinePath({0.0, 0.6, 0.6, 1.0}, {Point{0}, Point{1}, Point{1}, Point{2}}), GeometryError);
  CHECK(dyadic_grid(2) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
}
