// Built-in model spaces with default chart atlases.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cartan/atlas.hpp"

namespace cartan {

struct Model {
  std::string name;
  ChartAtlas atlas;
  std::shared_ptr<const MetricGraph> graph;        // cycle, tripod, tree
  std::shared_ptr<const FlatCylinder> cylinder;
  std::shared_ptr<const LinfSpace> box;            // rectangle
  std::vector<Point> net;                          // endpoint net for covers and sampling
  double net_spacing = 0.0;
};

/// C_n: n unit edges, charts of radius min(2, n/4 - 1/4) at vertices and
/// edge midpoints.
Model cycle_model(int n);

/// Flat cylinder with charts of radius min(2, c/4 - 1/4) on a grid of spacing
/// 1/2 and straight-line chart bicombings.
Model cylinder_model(double circumference, double height);

/// Star with three legs; vertex 0 is the branch point.
Model tripod_model(double a, double b, double c);

/// Metric tree from an edge list; charts at vertices and edge midpoints with
/// radius equal to the longest edge.
Model tree_model(std::vector<std::string> vertices, std::vector<GraphEdge> edges);

/// Random tree on n vertices with edge lengths in [1/2, 3/2].
Model random_tree_model(std::uint64_t seed, int n);

/// [0, w] x [0, h] in l-infinity with the linear bicombing, charts of radius 1
/// on a grid of spacing 1/2.
Model rectangle_model(double w, double h);

/// Parses "cycle(12)", "cylinder(12,4)", "tripod(1,1,1)", "rectangle(2,1)",
/// "tree(0-1:1,1-2:1.5,...)" or "tree(random,<seed>,<n>)".
Model generate_model(const std::string& spec);

/// Graph bicombing for a single chart: shortest arcs.
Bicombing graph_chart_bicombing(std::shared_ptr<const MetricGraph> g);
/// Straight segments in the developed strip.
Bicombing cylinder_chart_bicombing(std::shared_ptr<const FlatCylinder> cyl);
/// Linear interpolation on an l-infinity box.
Bicombing box_linear_bicombing(std::shared_ptr<const LinfSpace> box);

/// Charts for a metric graph: centers at vertices and edge midpoints.
ChartAtlas graph_atlas(std::shared_ptr<const MetricGraph> g, double radius, double declared_spacing);

}  // namespace cartan
