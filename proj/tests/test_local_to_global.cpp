#include <doctest.h>

#include <cmath>

#include "cartan/continuation.hpp"
#include "cartan/cover.hpp"
#include "cartan/models.hpp"
#include "support.hpp"

using namespace cartan;

namespace {

/// Samples of the straight strip segment from (a0, h0) to (a1, h1), angles unwrapped.
PolyLinePath strip_line(const FlatCylinder& cyl, double a0, double h0, double a1, double h1, int n) {
  std::vector<Point> pts;
  for (int i = 0; i <= n; ++i) {
    const double t = double(i) / n;
    pts.push_back(cyl.normalize({a0 + t * (a1 - a0), h0 + t * (h1 - h0)}));
  }
  return PolyLinePath(pts);
}

PolyLinePath graph_arc(const MetricGraph& g, const Point& a, const Point& b, int n) {
  std::vector<Point> pts;
  for (int i = 0; i <= n; ++i) pts.push_back(g.shortest_arc(a, b, double(i) / n));
  return PolyLinePath(pts);
}

/// Largest distance from the sampled path to the strip segment at equal parameters.
double strip_deviation(const ChartPath& c, const ChartAtlas& A, const FlatCylinder& cyl, double a0, double h0,
                       double a1, double h1) {
  double worst = 0.0;
  for (double t : c.sample_params(6)) {
    const Point want = cyl.normalize({a0 + t * (a1 - a0), h0 + t * (h1 - h0)});
    worst = std::max(worst, cyl.distance(c.at(t, A), want));
  }
  return worst;
}

Model small_tree() { return tree_model({"a", "b", "c", "d"}, {{0, 1, 1.0}, {1, 2, 1.5}, {1, 3, 0.75}}); }

}  // namespace

TEST_CASE("validate_atlas on the built-in models") {
  for (const auto* spec : {"cycle(12)", "cylinder(12,4)", "rectangle(2,1)", "tripod(1,1.5,2)"}) {
    CAPTURE(spec);
    const auto M = generate_model(spec);
    const auto reports = validate_atlas(M.atlas);
    REQUIRE(reports.size() == 6);
    for (const auto& r : reports) CHECK_MESSAGE(r.pass, r.property << " residual " << r.residual);
  }
}

TEST_CASE("validate_atlas finds a coverage gap") {
  // vertex charts of radius 0.4 leave every edge midpoint uncovered
  const auto M = cycle_model(12);
  std::vector<Chart> charts;
  for (std::size_t v = 0; v < 12; ++v) charts.push_back({M.graph->vertex_point(v), 0.4, graph_chart_bicombing(M.graph)});
  const ChartAtlas A(M.graph, charts, M.graph->net(0.25));
  const auto reports = validate_atlas(A);
  const auto& cov = reports.front();
  CHECK(cov.property == "coverage");
  CHECK_FALSE(cov.pass);
  REQUIRE(cov.witness.points.size() == 1);
  // the witness is uncovered: no chart center within 0.4
  const Point& w = cov.witness.points[0];
  for (const auto& ch : A.charts()) CHECK(M.graph->distance(ch.center, w) >= 0.4);
  CHECK_FALSE(A.best_chart(w).has_value());
}

TEST_CASE("certify_local_geodesic") {
  SUBCASE("single-chart segment") {
    const auto M = rectangle_model(2, 1);
    const auto c = certify_local_geodesic(testing::dense({{0.2, 0.2}, {0.9, 0.6}}), M.atlas);
    CHECK(c.residual <= 1e-12);
    CHECK(c.length == doctest::Approx(0.7));
    CHECK(c.epsilon > 0.0);
  }
  SUBCASE("full wrap of C_12") {
    const auto M = cycle_model(12);
    std::vector<Point> around;
    for (std::size_t v = 0; v <= 12; ++v) around.push_back(M.graph->vertex_point(v % 12));
    const auto c = certify_local_geodesic(PolyLinePath(around), M.atlas);
    CHECK(c.length == doctest::Approx(12.0));
    CHECK(c.residual <= kTauGeo);
    CHECK(M.graph->distance(c.path.start(), c.path.end()) == 0.0);
  }
  SUBCASE("a corner is rejected with its witness") {
    const auto M = rectangle_model(2, 2);
    const PolyLinePath corner({Point{0.5, 0.5}, Point{1.0, 0.5}, Point{1.0, 1.0}});
    try {
      certify_local_geodesic(corner, M.atlas);
      FAIL("corner certified");
    } catch (const CertificationError& e) {
      CHECK(e.residual > 0.1);
      CHECK(e.a < e.b);
      // the identity fails at the reported subsegment: linear midpoint vs path
      const auto& P = corner;
      const double s = (1 - e.t) * e.a + e.t * e.b;
      const Point want = lerp(P.at(e.a, lerp), P.at(e.b, lerp), e.t);
      CHECK(linf_distance(P.at(s, lerp), want) == doctest::Approx(e.residual));
    }
  }
}

TEST_CASE("perturb_geodesic") {
  const auto M = cylinder_model(12, 4);
  const auto& cyl = *M.cylinder;
  const auto c = certify_local_geodesic(strip_line(cyl, 0, 2, 9, 2.5, 36), M.atlas);
  REQUIRE(c.epsilon > 0.2);

  SUBCASE("identity perturbation returns c") {
    PerturbTrace tr;
    const auto same = perturb_geodesic(c, c.path.start(), c.path.end(), M.atlas, &tr);
    CHECK(tr.iterations == 0);
    CHECK(chart_path_distance(same.path, c.path, M.atlas) <= 1e-12);
  }
  SUBCASE("endpoint moved along the grid follows the strip") {
    PerturbTrace tr;
    const auto moved = perturb_geodesic(c, c.path.start(), cyl.normalize({9.1, 2.5}), M.atlas, &tr);
    CHECK(strip_deviation(moved.path, M.atlas, cyl, 0, 2, 9.1, 2.5) <= 1e-6);
    CHECK(moved.length == doctest::Approx(std::hypot(9.1, 0.5)).epsilon(1e-9));
    CHECK(moved.length <= c.length + 0.1 + kTauGeo);
  }
  SUBCASE("both endpoints moved") {
    const auto moved = perturb_geodesic(c, cyl.normalize({-0.2, 2.1}), cyl.normalize({9.2, 2.3}), M.atlas);
    CHECK(strip_deviation(moved.path, M.atlas, cyl, -0.2, 2.1, 9.2, 2.3) <= 1e-6);
  }
  SUBCASE("alternating gaps shrink by a quarter in the flat strip") {
    PerturbTrace tr;
    perturb_geodesic(c, cyl.normalize({0.3, 1.8}), cyl.normalize({9.2, 2.7}), M.atlas, &tr);
    REQUIRE(tr.p_gaps.size() >= 4);
    for (std::size_t n = 2; n < tr.p_gaps.size(); ++n) {
      if (tr.p_gaps[n - 1] > 1e-12) CHECK(tr.p_gaps[n] <= 0.26 * tr.p_gaps[n - 1]);
      if (tr.q_gaps[n - 1] > 1e-12) CHECK(tr.q_gaps[n] <= 0.26 * tr.q_gaps[n - 1]);
      // each q step is driven by the p step just before it; child geodesics are
      // solved to eta_top times the previous combined gap
      const double child = PerturbOptions{}.eta_top * tr.gaps[n - 1];
      CHECK(tr.q_gaps[n] <= 0.5 * tr.p_gaps[n] + 2 * child);
    }
  }
  SUBCASE("twice the radius is out of range") {
    CHECK_THROWS_AS(perturb_geodesic(c, c.path.start(), cyl.normalize({9 + 2 * c.epsilon, 2.5}), M.atlas),
                    GeometryError);
  }
}

TEST_CASE("continue_along_path") {
  SUBCASE("inside one chart every step is the chart segment") {
    const auto M = rectangle_model(2, 1);
    const auto gamma = testing::dense({{0.1, 0.1}, {0.6, 0.3}, {0.4, 0.7}});
    const auto C = continue_along_path(gamma, M.atlas);
    REQUIRE(C.s.back() == 1.0);
    for (std::size_t k = 0; k < C.s.size(); ++k) {
      const Point end = gamma.at(C.s[k], lerp);
      const auto& g = C.geodesics[k];
      for (double t : {0.0, 0.25, 0.5, 1.0})
        CHECK(linf_distance(g.path.at(t, M.atlas), lerp(Point{0.1, 0.1}, end, t)) <= 1e-9);
      CHECK(g.length <= C.prefix_lengths[k] + kTauGeo);
    }
  }
  SUBCASE("a full wrap of the equator closes up") {
    const auto M = cylinder_model(12, 4);
    const auto& cyl = *M.cylinder;
    const auto gamma = strip_line(cyl, 0, 2, 12, 2, 48);
    const auto C = continue_along_path(gamma, M.atlas);
    const auto& last = C.geodesics.back();
    CHECK(last.length == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(strip_deviation(last.path, M.atlas, cyl, 0, 2, 12, 2) <= 1e-6);
  }
  SUBCASE("radial path in a tree gives tree arcs") {
    const auto M = small_tree();
    const auto& g = *M.graph;
    const auto gamma = graph_arc(g, g.vertex_point(0), g.vertex_point(2), 20);
    const auto C = continue_along_path(gamma, M.atlas);
    for (std::size_t k = 0; k < C.s.size(); ++k) {
      const Point end = gamma.at(C.s[k], [&](const Point& a, const Point& b, double t) { return g.shortest_arc(a, b, t); });
      CHECK(C.geodesics[k].length == doctest::Approx(g.distance(g.vertex_point(0), end)).epsilon(1e-12));
    }
  }
}

TEST_CASE("global_bicombing") {
  SUBCASE("rectangle corners") {
    const auto M = rectangle_model(2, 1);
    const auto gamma = testing::dense({{0, 0}, {0, 1}, {2, 1}});
    const auto G = global_bicombing(M.atlas, {0, 0}, {2, 1}, gamma);
    CHECK(G.path.length == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(G.geodesic_defect <= kTauGeo);
    for (double t : {0.25, 0.5, 0.75}) CHECK(linf_distance(G.path.path.at(t, M.atlas), Point{2 * t, t}) <= 1e-7);
  }
  SUBCASE("tree arc from a detour") {
    const auto M = small_tree();
    const auto& g = *M.graph;
    // out to leaf d and back before heading to c
    std::vector<Point> pts;
    for (const auto& seg : {std::pair{0, 3}, std::pair{3, 2}}) {
      const auto arc = graph_arc(g, g.vertex_point(seg.first), g.vertex_point(seg.second), 12);
      for (std::size_t i = pts.empty() ? 0 : 1; i < arc.size(); ++i) pts.push_back(arc.points()[i]);
    }
    const auto G = global_bicombing(M.atlas, g.vertex_point(0), g.vertex_point(2), PolyLinePath(pts));
    CHECK(G.path.length == doctest::Approx(2.5).epsilon(1e-12));
    for (double t : {0.2, 0.5, 0.9})
      CHECK(g.distance(G.path.path.at(t, M.atlas), g.shortest_arc(g.vertex_point(0), g.vertex_point(2), t)) <= kTauGeo);
  }
  SUBCASE("the cylinder gives one geodesic per homotopy class") {
    const auto M = cylinder_model(12, 4);
    const auto& cyl = *M.cylinder;
    const auto east = global_bicombing(M.atlas, {0, 2}, {4, 3}, strip_line(cyl, 0, 2, 4, 3, 16));
    const auto west = global_bicombing(M.atlas, {0, 2}, {4, 3}, strip_line(cyl, 0, 2, -8, 3, 32));
    CHECK(east.path.length == doctest::Approx(std::hypot(4, 1)).epsilon(1e-9));
    CHECK(west.path.length == doctest::Approx(std::hypot(8, 1)).epsilon(1e-9));
    CHECK(chart_path_distance(east.path.path, west.path.path, M.atlas) > 1.0);
    CHECK(east.geodesic_defect <= kTauGeo);
    CHECK(west.geodesic_defect > 1.0);  // a local geodesic, not a global one
  }
}

TEST_CASE("check_global_convexity") {
  SUBCASE("identical pairs have residual 0") {
    const auto M = rectangle_model(2, 1);
    const auto xy = global_bicombing(M.atlas, {0.2, 0.1}, {1.7, 0.9}, testing::dense({{0.2, 0.1}, {1.7, 0.9}})).path;
    const auto x0 = certify_local_geodesic(PolyLinePath({Point{0.2, 0.1}}), M.atlas);
    const auto y0 = certify_local_geodesic(PolyLinePath({Point{1.7, 0.9}}), M.atlas);
    const auto r = check_global_convexity(M.atlas, xy, xy, x0, y0);
    CHECK(r.pass);
    CHECK(r.residual <= 0.0);
  }
  SUBCASE("tree quadruple") {
    const auto M = small_tree();
    const auto& g = *M.graph;
    auto geo = [&](std::size_t a, std::size_t b) {
      return global_bicombing(M.atlas, g.vertex_point(a), g.vertex_point(b), graph_arc(g, g.vertex_point(a), g.vertex_point(b), 10))
          .path;
    };
    const auto r = check_global_convexity(M.atlas, geo(0, 2), geo(3, 1), geo(0, 3), geo(2, 1));
    CHECK(r.pass);
    CHECK(r.residual <= 1e-6);
  }
  SUBCASE("rectangle quadruples") {
    const auto M = rectangle_model(2, 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0, 2), uy(0, 1);
    auto geo = [&](const Point& a, const Point& b) { return global_bicombing(M.atlas, a, b, testing::dense({a, b})).path; };
    for (int i = 0; i < 5; ++i) {
      const Point x{ux(rng), uy(rng)}, y{ux(rng), uy(rng)}, xb{ux(rng), uy(rng)}, yb{ux(rng), uy(rng)};
      const auto r = check_global_convexity(M.atlas, geo(x, y), geo(xb, yb), geo(x, xb), geo(y, yb));
      CHECK(r.pass);
      CHECK(r.residual <= 1e-6);
    }
  }
}

TEST_CASE("build_cover counts") {
  SUBCASE("tree: one cover point per reachable net point") {
    const auto M = small_tree();
    const Point base = M.graph->vertex_point(0);
    const double lmax = 2.0;
    const auto C = build_cover(M.atlas, M.net, base, lmax);
    std::size_t reachable = 0;
    for (const auto& p : M.net) reachable += M.graph->distance(base, p) <= lmax + 1e-12;
    CHECK(C.points.size() == reachable);
    for (const auto& p : M.net)
      if (M.graph->distance(base, p) <= lmax + 1e-12) CHECK(preimages(C, p, *M.graph).size() == 1);
  }
  SUBCASE("C_12 over the base point") {
    const auto M = cycle_model(12);
    const Point base = M.graph->vertex_point(0);
    const auto C = build_cover(M.atlas, M.net, base, 25);
    auto over = preimages(C, base, *M.graph);
    std::vector<double> lengths;
    for (const auto* p : over) lengths.push_back(std::round(p->length * 1e6) / 1e6);
    std::sort(lengths.begin(), lengths.end());
    CHECK(lengths == std::vector<double>{0, 12, 12, 24, 24});
  }
  SUBCASE("cylinder matches the strip lattice count") {
    const auto M = cylinder_model(12, 4);
    const Point base{0, 1}, target{3, 3};
    const double lmax = 16;
    int lattice = 0;
    for (int k = -3; k <= 3; ++k) lattice += std::hypot(3 + 12.0 * k, 2.0) <= lmax;
    const auto C = build_cover(M.atlas, M.net, base, lmax);
    CHECK(preimages(C, target, *M.cylinder).size() == std::size_t(lattice));
    CHECK(lattice == 3);
  }
}

TEST_CASE("cover_retraction") {
  const auto M = cylinder_model(12, 4);
  const auto& cyl = *M.cylinder;
  const Point base{0, 1};
  // up to length 6 no arc wraps past half the circumference, so sup distances are |s - s'| L
  const auto C = build_cover(M.atlas, M.net, base, 6);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, C.points.size() - 1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto& c = C.points[pick(rng)];
    const auto one = cover_retraction(c, 1.0, M.atlas);
    CHECK(chart_path_distance(one.geodesic.path, c.geodesic.path, M.atlas) <= 1e-12);
    const auto zero = cover_retraction(c, 0.0, M.atlas);
    CHECK(zero.length == 0.0);
    CHECK(cyl.distance(zero.endpoint, base) == 0.0);
    for (auto [s, s2] : {std::pair{0.25, 0.75}, std::pair{0.5, 0.625}, std::pair{0.0, 1.0}}) {
      const auto a = cover_retraction(c, s, M.atlas), b = cover_retraction(c, s2, M.atlas);
      CHECK(chart_path_distance(a.geodesic.path, b.geodesic.path, M.atlas) ==
            doctest::Approx((s2 - s) * c.length).epsilon(1e-7));
    }
  }
}
