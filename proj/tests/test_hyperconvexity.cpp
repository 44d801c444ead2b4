#include <doctest.h>

#include "cartan/hyperconvexity.hpp"
#include "cartan/retraction.hpp"
#include "cartan/tight_span.hpp"
#include "support.hpp"

using namespace cartan;

namespace {

/// Interval-intersection oracle: p lies in every box, up to tol.
bool in_all_boxes(const Point& p, const BallFamily& F, double tol) {
  for (const auto& b : F)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (std::abs(p[i] - b.center[i]) > b.radius + tol) return false;
  return true;
}

double min_slack_of(const Point& p, const BallFamily& F) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : F) m = std::min(m, b.radius - testing::coord_max(p, b.center));
  return m;
}

Point fin(std::size_t i) { return FiniteSpace::point(i); }

Bicombing plane_linear() {
  return Bicombing{std::make_shared<LinfSpace>(2), [](const Point& x, const Point& y, double t) { return lerp(x, y, t); },
                   {}, "linear"};
}

WitnessSolver linf_solver() {
  return [](const BallFamily& F) -> std::optional<Witness> { return helly_witness_linf(F); };
}

}  // namespace

TEST_CASE("pairwise_feasible") {
  LinfSpace line(1);
  CHECK(pairwise_feasible({{{0.0}, 0.0}}, line).feasible);
  const auto f = pairwise_feasible({{{0.0}, 2.0}, {{1.0}, 0.5}, {{5.0}, 2.0}}, line);
  CHECK_FALSE(f.feasible);
  CHECK(f.i == 1);
  CHECK(f.j == 2);
  CHECK(f.worst_excess == doctest::Approx(1.5));

  std::mt19937_64 rng(4);
  const FiniteSpace X(make_metric(testing::random_graph_metric(rng, 6)));
  std::uniform_int_distribution<std::size_t> pt(0, 5);
  std::uniform_real_distribution<double> rad(0.0, 2.5);
  for (int trial = 0; trial < 200; ++trial) {
    BallFamily F;
    for (int k = 0; k < 4; ++k) F.push_back({fin(pt(rng)), rad(rng)});
    bool scan = true;
    for (const auto& a : F)
      for (const auto& b : F) scan = scan && X.distance(a.center, b.center) <= a.radius + b.radius + kTauMetric;
    CHECK(pairwise_feasible(F, X).feasible == scan);
  }
}

TEST_CASE("helly_witness_linf") {
  const auto one = helly_witness_linf({{{0.0}, 1.0}, {{2.0}, 1.0}});
  CHECK(one.point == Point{1.0});
  CHECK(one.min_slack() == 0.0);

  const BallFamily tri{{{0, 0}, 1.5}, {{2, 0}, 1.5}, {{1, 2}, 1.5}};
  const auto w = helly_witness_linf(tri);
  // x in [0.5, 1.5], y in [0.5, 1.5]
  CHECK(w.point == Point{1.0, 1.0});
  CHECK(w.min_slack() >= 0.0);
  CHECK(in_all_boxes(w.point, tri, 0.0));

  CHECK_THROWS_AS(helly_witness_linf({{{0.0}, 1.0}, {{5.0}, 1.0}}), GeometryError);
}

TEST_CASE("helly_witness_linf beats random box points") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> c(-3, 3), r(0.5, 3);
  for (int trial = 0; trial < 20; ++trial) {
    BallFamily F;
    for (int k = 0; k < 5; ++k) F.push_back({{c(rng), c(rng), c(rng)}, r(rng)});
    // make the family pairwise feasible
    for (auto& a : F)
      for (auto& b : F) {
        const double e = testing::coord_max(a.center, b.center) - a.radius - b.radius;
        if (e > 0) a.radius += e / 2, b.radius += e / 2;
      }
    const auto w = helly_witness_linf(F);
    Point lo(3, -1e9), hi(3, 1e9);
    for (const auto& b : F)
      for (int i = 0; i < 3; ++i) lo[i] = std::max(lo[i], b.center[i] - b.radius), hi[i] = std::min(hi[i], b.center[i] + b.radius);
    for (int k = 0; k < 1000; ++k) {
      Point p(3);
      for (int i = 0; i < 3; ++i) p[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
      CHECK(w.min_slack() >= min_slack_of(p, F) - 1e-12);
    }
  }
}

TEST_CASE("helly_witness_finite") {
  const FiniteSpace C(cycle_metric(12));
  SUBCASE("coincident centers with radius 0") {
    const auto w = helly_witness_finite({{fin(5), 0.0}, {fin(5), 0.0}}, C);
    REQUIRE(w.has_value());
    CHECK(w->point == fin(5));
  }
  SUBCASE("three balls on C_12 with empty intersection") {
    CHECK_FALSE(helly_witness_finite({{fin(0), 1.0}, {fin(4), 3.0}, {fin(8), 3.0}}, C).has_value());
    // enumeration oracle
    for (int v = 0; v < 12; ++v)
      CHECK((testing::cycle_distance(v, 0, 12) > 1 || testing::cycle_distance(v, 4, 12) > 3 ||
             testing::cycle_distance(v, 8, 12) > 3));
  }
  SUBCASE("tripod leaves meet at the branch point") {
    // point 0 is the branch point, legs 1, 1.5, 2
    const FiniteSpace T(make_metric({{0, 1, 1.5, 2}, {1, 0, 2.5, 3}, {1.5, 2.5, 0, 3.5}, {2, 3, 3.5, 0}}));
    const auto w = helly_witness_finite({{fin(1), 1.0}, {fin(2), 1.5}, {fin(3), 2.0}}, T);
    REQUIRE(w.has_value());
    CHECK(w->point == fin(0));
    CHECK(w->min_slack() == 0.0);
  }
}

TEST_CASE("is_hyperconvex_sampled") {
  SUBCASE("l-infinity box") {
    const auto r = is_hyperconvex_sampled(linf_box_backend(std::make_shared<LinfSpace>(Point{0, 0, 0}, Point{2, 3, 1})), 500, 5, 1);
    CHECK(r.pass);
  }
  SUBCASE("C_12 fails and stores its family") {
    auto X = std::make_shared<FiniteSpace>(cycle_metric(12));
    const auto r = is_hyperconvex_sampled(finite_backend(X), 500, 4, 1);
    CHECK_FALSE(r.pass);
    const auto& w = r.witness;
    REQUIRE(w.points.size() == w.params.size());
    BallFamily F;
    for (std::size_t i = 0; i < w.points.size(); ++i) F.push_back({w.points[i], w.params[i]});
    CHECK(pairwise_feasible(F, *X).feasible);
    // no vertex lies in every ball
    for (std::size_t v = 0; v < 12; ++v) {
      bool inside = true;
      for (const auto& b : F) inside = inside && X->distance(fin(v), b.center) <= b.radius;
      CHECK_FALSE(inside);
    }
  }
  SUBCASE("a radius-2 interval in C_12 passes") {
    auto X = std::make_shared<FiniteSpace>(cycle_metric(12));
    CHECK(is_hyperconvex_sampled(finite_backend(X, {10, 11, 0, 1, 2}), 500, 4, 1).pass);
  }
}

TEST_CASE("halving_witness") {
  const auto sigma = plane_linear();
  SUBCASE("small radii go straight to the base") {
    const BallFamily F{{{0, 0}, 0.5}, {{0.8, 0.2}, 0.5}};
    const auto h = halving_witness(F, sigma, linf_solver(), 1.0);
    CHECK(h.depth == 0);
    CHECK(h.base_calls == 1);
    CHECK(h.witness.point == helly_witness_linf(F).point);
  }
  SUBCASE("random plane families") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> c(-3, 3), r(0.0, 4.0);
    int ran = 0;
    for (int trial = 0; trial < 40; ++trial) {
      BallFamily F;
      for (int k = 0; k < 4; ++k) F.push_back({{c(rng), c(rng)}, r(rng)});
      for (auto& a : F)
        for (auto& b : F) {
          const double e = testing::coord_max(a.center, b.center) - a.radius - b.radius;
          if (e > 0) a.radius += e / 2, b.radius += e / 2;
        }
      double rmax = 0.0;
      for (const auto& b : F) rmax = std::max(rmax, b.radius);
      if (rmax > 4.0) continue;
      const auto h = halving_witness(F, sigma, linf_solver(), 1.0);
      CHECK(h.witness.min_slack() >= -(h.depth + 1) * kTauMetric);
      CHECK(in_all_boxes(h.witness.point, F, 1e-7));
      ++ran;
    }
    CHECK(ran >= 20);
  }
  SUBCASE("tripod through the tight-span solver") {
    const auto X = make_metric({{0, 2, 2}, {2, 0, 2}, {2, 2, 0}});
    const auto E = enumerate_cells(X);
    const auto tsig = tight_span_bicombing(X);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> cell(0, E.cells.size() - 1);
    std::uniform_real_distribution<double> r(0.0, 4.0);
    // dense net of the three legs
    std::vector<Point> net;
    for (int leg = 0; leg < 3; ++leg)
      for (int k = 0; k <= 200; ++k) {
        Point p{1, 1, 1};
        for (int i = 0; i < 3; ++i) p[i] += (i == leg ? -1.0 : 1.0) * k / 200.0;
        net.push_back(p);
      }
    for (int trial = 0; trial < 10; ++trial) {
      BallFamily F;
      for (int k = 0; k < 3; ++k) F.push_back({sample_cell(E.cells[cell(rng)], rng), r(rng)});
      for (auto& a : F)
        for (auto& b : F) {
          const double e = testing::coord_max(a.center, b.center) - a.radius - b.radius;
          if (e > 0) a.radius += e / 2, b.radius += e / 2;
        }
      const auto h = halving_witness(F, tsig, geodesic_candidate_solver(tsig), 1.0);
      CHECK(h.witness.min_slack() >= -(h.depth + 1) * kTauMetric);
      CHECK(extremality_residual(h.witness.point, X) <= 1e-9);
      double best = -1e9;
      for (const auto& p : net) best = std::max(best, min_slack_of(p, F));
      CHECK(best >= -0.01);
    }
  }
}

TEST_CASE("sphere_counterexample") {
  for (int n : {6, 9, 12, 15}) {
    CAPTURE(n);
    const auto rep = sphere_counterexample(n);
    CHECK(rep.local_balls_hyperconvex);
    CHECK(rep.triple_empty_in_cycle);
    CHECK(rep.box_nonempty);
    CHECK(rep.r == n / 3);
    // enumeration oracle for (b)
    const int x = int(rep.x[0]), y = int(rep.y[0]), z = int(rep.z[0]);
    CHECK(testing::cycle_distance(x, y, n) == n / 3);
    CHECK(testing::cycle_distance(y, z, n) == n / 3);
    int hits = 0;
    for (int v = 0; v < n; ++v)
      hits += testing::cycle_distance(v, x, n) <= 1 && testing::cycle_distance(v, y, n) <= n / 3 - 1 &&
              testing::cycle_distance(v, z, n) <= n / 3 - 1;
    CHECK(hits == 0);
    // (c) checked against the Kuratowski rows directly
    const auto K = kuratowski_embed(cycle_metric(n));
    const BallFamily boxes{{K[x], 1.0}, {K[y], n / 3 - 1.0}, {K[z], n / 3 - 1.0}};
    CHECK(in_all_boxes(rep.box_witness.point, boxes, 0.0));
  }
  CHECK_THROWS_AS(sphere_counterexample(7), GeometryError);
}

TEST_CASE("retraction_geodesic") {
  SUBCASE("short pair is one chart piece") {
    const auto c = retraction_geodesic({0, 0}, {0.3, 0.1}, [](const Point& p) { return p; }, lerp, 1.0);
    CHECK(geodesic_defect(c, LinfSpace(2)) <= kTauGeo);
    CHECK(path_length(c, LinfSpace(2)) == doctest::Approx(0.3));
  }
  SUBCASE("identity on a box is the segment") {
    const auto c = retraction_geodesic({0, 0}, {3, 1}, [](const Point& p) { return p; }, lerp, 0.5);
    CHECK(path_length(c, LinfSpace(2)) == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(testing::coord_max(c.points()[i], {3 * c.params()[i], c.params()[i]}) <= 1e-12);
  }
  SUBCASE("tripod in l-infinity^3 with the tight-span retraction") {
    const auto X = make_metric({{0, 2, 2}, {2, 0, 2}, {2, 2, 0}});
    const auto K = kuratowski_embed(X);
    const auto chart = tight_span_bicombing(X).eval;
    const auto c = retraction_geodesic(K[0], K[1], [&](const Point& p) { return retract_to_tight_span(p, X); }, chart, 0.5);
    CHECK(path_length(c, LinfSpace(3)) == doctest::Approx(2.0).epsilon(1e-9));
    // the tree arc passes through the branch point at t = 1/2
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double t = c.params()[i];
      const Point want = t <= 0.5 ? lerp(K[0], {1, 1, 1}, 2 * t) : lerp({1, 1, 1}, K[1], 2 * t - 1);
      CHECK(testing::coord_max(c.points()[i], want) <= 1e-7);
    }
  }
  SUBCASE("a retraction that moves an endpoint is rejected") {
    CHECK_THROWS_AS(retraction_geodesic({0, 0}, {3, 0}, [](const Point& p) { return Point{p[0], 1.0}; }, lerp, 0.5),
                    GeometryError);
  }
}

TEST_CASE("shorten_loop") {
  const auto clamp = [](const Point& p) {
    return Point{std::clamp(p[0], 0.0, 2.0), std::clamp(p[1], 0.0, 1.0)};
  };
  LinfSpace plane(2);
  SUBCASE("square loop in a rectangle shrinks to a point") {
    auto loop = testing::dense({{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}, {0.5, 0}}, 16);
    double len = path_length(loop, plane);
    int steps = 0;
    for (; steps < 50; ++steps) {
      const auto s = shorten_loop(loop, clamp, 0.1);
      REQUIRE(s.status != ShortenResult::Status::AuditFailed);
      REQUIRE(s.status != ShortenResult::Status::NoDecrease);
      CHECK(s.length_after < len);
      CHECK(s.length_after <= s.bound + 1e-9);
      CHECK(s.eta > 0.0);
      loop = s.loop;
      len = s.length_after;
      if (s.status == ShortenResult::Status::Contracted) break;
    }
    CHECK(steps < 50);
    CHECK(len == 0.0);
  }
  SUBCASE("a loop that is not 1-Lipschitz on the square is reported") {
    // opposite corners of the 2 x 1 boundary are 2 apart, opposite square corners 1.5
    const auto s = shorten_loop(testing::dense({{0, 0}, {2, 0}, {2, 1}, {0, 1}, {0, 0}}, 16), clamp, 0.1);
    CHECK(s.status == ShortenResult::Status::AuditFailed);
  }
  SUBCASE("tiny loop contracts at once") {
    const auto s = shorten_loop(testing::dense({{1, 0.5}, {1.1, 0.5}, {1.1, 0.6}, {1, 0.6}, {1, 0.5}}, 4), clamp, 0.1);
    CHECK(s.status == ShortenResult::Status::Contracted);
    CHECK(s.length_after == 0.0);
  }
  SUBCASE("generator of C_12 has no strict decrease") {
    const auto K = kuratowski_embed(cycle_metric(12));
    const auto nearest = [&](const Point& p) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < K.size(); ++i)
        if (linf_distance(p, K[i]) < linf_distance(p, K[best])) best = i;
      return K[best];
    };
    std::vector<Point> around;
    for (int v = 0; v <= 12; ++v) around.push_back(K[v % 12]);
    const auto s = shorten_loop(PolyLinePath(around), nearest, 1.0);
    CAPTURE(s.note);
    CHECK(s.status != ShortenResult::Status::Shortened);
    CHECK(s.status != ShortenResult::Status::Contracted);
  }
}
