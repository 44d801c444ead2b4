// Model metric spaces used throughout: finite spaces, l-infinity boxes,
// metric graphs (length spaces built from weighted graphs) and the flat cylinder.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cartan/metric.hpp"

namespace cartan {

class MetricSpace {
 public:
  virtual ~MetricSpace() = default;
  virtual double distance(const Point& a, const Point& b) const = 0;
  virtual bool contains(const Point& p) const = 0;
  virtual std::string kind() const = 0;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Points are {index}.
class FiniteSpace final : public MetricSpace {
 public:
  explicit FiniteSpace(DistanceMatrix d) : d_(std::move(d)) {}
  double distance(const Point& a, const Point& b) const override;
  bool contains(const Point& p) const override;
  std::string kind() const override { return "finite"; }

  const DistanceMatrix& metric() const { return d_; }
  std::size_t size() const { return d_.size(); }
  static Point point(std::size_t i) { return {static_cast<double>(i)}; }

 private:
  DistanceMatrix d_;
};

/// l-infinity^n, optionally restricted to an axis-aligned box.
class LinfSpace final : public MetricSpace {
 public:
  explicit LinfSpace(std::size_t dim) : dim_(dim) {}
  LinfSpace(Point lo, Point hi);

  double distance(const Point& a, const Point& b) const override;
  bool contains(const Point& p) const override;
  std::string kind() const override { return box_ ? "linf-box" : "linf"; }

  std::size_t dimension() const { return dim_; }
  bool bounded() const { return box_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

 private:
  std::size_t dim_;
  bool box_ = false;
  Point lo_, hi_;
};

struct GraphEdge {
  std::size_t u, v;
  double length;
};

/// The length space obtained by gluing intervals along a weighted graph.
/// Points are {edge index, offset from edge.u}; offsets are clamped to
/// [0, length]. Each edge must be a shortest path between its endpoints so that
/// edges are geodesic segments.
class MetricGraph final : public MetricSpace {
 public:
  MetricGraph(std::vector<std::string> vertices, std::vector<GraphEdge> edges);

  double distance(const Point& a, const Point& b) const override;
  bool contains(const Point& p) const override;
  std::string kind() const override { return "graph"; }

  std::size_t vertex_count() const { return vertices_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  double vertex_distance(std::size_t a, std::size_t b) const { return apsp_[a * n_ + b]; }
  DistanceMatrix vertex_metric() const;
  bool is_tree() const { return edges_.size() + 1 == vertices_.size(); }

  Point vertex_point(std::size_t v) const;
  Point edge_point(std::size_t e, double offset) const;
  /// Vertex index if p sits on a vertex (within 1e-12), otherwise nullopt.
  std::optional<std::size_t> as_vertex(const Point& p) const;

  /// Point at fraction t along a shortest path from a to b. On ties the
  /// lexicographically first route is used, so this is only a bicombing where
  /// shortest paths are unique.
  Point shortest_arc(const Point& a, const Point& b, double t) const;

  /// Points spaced at most `spacing` apart covering every edge, vertices first.
  std::vector<Point> net(double spacing) const;

 private:
  struct Route {
    double length;
    std::vector<std::size_t> hops;  // vertex sequence, empty for a same-edge route
  };
  Route route(const Point& a, const Point& b, bool with_hops = true) const;

  std::vector<std::string> vertices_;
  std::vector<GraphEdge> edges_;
  std::size_t n_;
  std::vector<double> apsp_;
  std::vector<std::size_t> next_;  // next hop on a shortest vertex path
  std::vector<std::vector<std::size_t>> incident_;
};

/// The flat cylinder (R / circumference Z) x [0, height] with the quotient of
/// the Euclidean metric. Points are {angle coordinate in [0, c), height}.
class FlatCylinder final : public MetricSpace {
 public:
  FlatCylinder(double circumference, double height);

  double distance(const Point& a, const Point& b) const override;
  bool contains(const Point& p) const override;
  std::string kind() const override { return "cylinder"; }

  double circumference() const { return circ_; }
  double height() const { return height_; }
  Point normalize(const Point& p) const;
  /// Representative of the angle of b closest to a's angle (unwrapped).
  double unwrap_near(double reference_angle, double angle) const;
  /// Straight segment in the developed strip between a and the nearest lift of b.
  Point straight(const Point& a, const Point& b, double t) const;

 private:
  double circ_, height_;
};

}  // namespace cartan
