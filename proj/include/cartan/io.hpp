// JSON files: metric and graph spaces, tight-span complexes, check plans,
// atlases, ball families, paths and reports. Every file carries "version";
// unknown fields are rejected.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cartan/hyperconvexity.hpp"
#include "cartan/models.hpp"

namespace cartan::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Malformed input; the message names the file and the offending field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a file; syntax errors report line and column.
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
/// Two-space indentation and a trailing newline.
std::string dump(const json& j);

/// Rejects fields outside `allowed`, requires those in `required`, and
/// checks "version" when `versioned`.
void expect_fields(const json& j, const std::string& where, const std::vector<std::string>& allowed,
                   const std::vector<std::string>& required, bool versioned);

struct LoadedSpace {
  enum class Kind { Finite, Graph, Cylinder, Box, Linf, TightSpan };
  Kind kind = Kind::Finite;
  std::string description;
  SpacePtr space;
  std::optional<DistanceMatrix> metric;  // Finite and TightSpan
  std::shared_ptr<const MetricGraph> graph;
  std::shared_ptr<const FlatCylinder> cylinder;
  std::shared_ptr<const LinfSpace> linf;  // Box and Linf
  std::optional<Model> model;              // set for generator specs

  /// Point references: labels or indices on finite spaces and tight spans,
  /// vertex names, {"edge", "offset"} or [edge, offset] on graphs, and
  /// coordinate arrays everywhere.
  Point resolve(const json& ref, const std::string& where) const;
  /// Geodesic bicombing of the whole space where one is built in.
  std::optional<Bicombing> bicombing() const;
};

/// A JSON file path or a model spec such as "cycle(12)" or "linf(2)".
LoadedSpace load_space(const std::string& arg);
/// Space object: {"labels", "d"}, {"vertices", "edges"}, {"model": spec},
/// {"tight-span": metric object} or {"linf": n}.
LoadedSpace space_from_json(const json& j, const std::string& where, bool versioned);

struct RawMetric {
  std::vector<std::vector<double>> d;
  std::vector<std::string> labels;
};
RawMetric raw_metric_from_json(const json& j, const std::string& where, bool versioned = true);
DistanceMatrix metric_from_json(const json& j, const std::string& where, bool versioned = true);
json metric_to_json(const DistanceMatrix& X);
json graph_to_json(const MetricGraph& g);

json point_to_json(const Point& p);
json complex_to_json(const TightSpanComplex& E);
json report_to_json(const CheckReport& r);
json witness_to_json(const Witness& w);

CheckPlan plan_from_json(const json& j, const LoadedSpace& s, const std::string& where);
json plan_to_json(const CheckPlan& plan);

BallFamily family_from_json(const json& j, const LoadedSpace& s, const std::string& where);
json family_to_json(const BallFamily& F);

PolyLinePath path_from_json(const json& j, const LoadedSpace& s, const std::string& where);
json path_to_json(const PolyLinePath& c);

struct LoadedAtlas {
  LoadedSpace space;
  ChartAtlas atlas;
  std::vector<Point> net;
};

/// Atlas file: {"version", "space", "charts": [{"center", "radius",
/// "bicombing"}], "declared", "net"}. Bicombing names: "shortest-arc-graph",
/// "linear-chart" (developing map of the cylinder, identity on boxes) and
/// "tight-span-solver".
LoadedAtlas atlas_from_json(const json& j, const std::string& where);
LoadedAtlas load_atlas(const std::string& path);
json atlas_to_json(const Model& m);

/// Report skeleton {"command", "checks", "witnesses", "timings_ms", "version"}.
json make_report(const std::string& command);
bool report_passes(const json& report);

}  // namespace cartan::io
