// Chart atlases of local bicombings and paths assembled from chart geodesics.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cartan/bicombing.hpp"
#include "cartan/path.hpp"
#include "cartan/spaces.hpp"

namespace cartan {

/// Open ball U(center, radius) carrying a bicombing that is convex on it.
struct Chart {
  Point center;
  double radius = 0.0;
  Bicombing sigma;
};

class ChartAtlas {
 public:
  /// `declared` lists the points whose coverage validate_atlas checks.
  ChartAtlas(SpacePtr space, std::vector<Chart> charts, std::vector<Point> declared = {});

  const MetricSpace& space() const { return *d_->space; }
  const SpacePtr& space_ptr() const { return d_->space; }
  const std::vector<Chart>& charts() const { return d_->charts; }
  const Chart& chart(std::size_t k) const { return d_->charts.at(k); }
  const std::vector<Point>& declared() const { return d_->declared; }

  /// radius - d(center, p); positive iff p lies in the open ball.
  double slack(std::size_t k, const Point& p) const;

  /// Chart of maximal slack at p, if any chart contains p.
  std::optional<std::size_t> best_chart(const Point& p) const;
  double best_slack(const Point& p) const;

  /// A chart holding every point with slack > margin. The hint is tried first;
  /// otherwise the chart maximizing the smallest slack is returned.
  std::optional<std::size_t> chart_containing(std::span<const Point> pts, double margin = 0.0,
                                              std::optional<std::size_t> hint = std::nullopt) const;

  /// Interpolates inside a chart holding both samples; throws when none does.
  SegmentInterpolator interpolator() const;

 private:
  struct Data {
    SpacePtr space;
    std::vector<Chart> charts;
    std::vector<Point> declared;
  };
  std::shared_ptr<const Data> d_;  // shared so copies stay cheap
};

/// On [t0, t1] the path is chart(k).sigma(from, to, .) reparametrized.
struct PathPiece {
  double t0 = 0.0, t1 = 1.0;
  Point from, to;
  std::size_t chart = 0;
};

/// A path on [0, 1] built from consecutive chart geodesics.
class ChartPath {
 public:
  ChartPath() = default;
  explicit ChartPath(std::vector<PathPiece> pieces);

  static ChartPath constant(const Point& p, std::size_t chart);
  static ChartPath segment(const Point& a, const Point& b, std::size_t chart);

  const std::vector<PathPiece>& pieces() const { return pieces_; }
  const Point& start() const { return pieces_.front().from; }
  const Point& end() const { return pieces_.back().to; }

  Point at(double t, const ChartAtlas& A) const;
  /// c|[a,b] reparametrized to [0, 1].
  ChartPath restrict(double a, double b, const ChartAtlas& A) const;
  /// Traversed backwards.
  ChartPath reversed() const;
  double length(const ChartAtlas& A) const;
  /// Breakpoints plus the dyadic grid of the given level.
  std::vector<double> sample_params(int level) const;
  PolyLinePath sample(int level, const ChartAtlas& A) const;

  /// Replaces the endpoints, keeping every piece in its chart.
  ChartPath with_endpoints(const Point& p, const Point& q) const;
  /// Concatenates c on [0, split] and d on [split, 1]; d starts where c ends.
  static ChartPath join(const ChartPath& c, const ChartPath& d, double split);
  /// Fuses consecutive pieces lying in one chart whose joints agree with the
  /// chart geodesic within tol.
  ChartPath merged(const ChartAtlas& A, double tol) const;

 private:
  std::vector<PathPiece> pieces_;
};

/// sup_t d(c(t), c'(t)) over breakpoints of both paths and a dyadic grid.
double chart_path_distance(const ChartPath& c, const ChartPath& c2, const ChartAtlas& A,
                           int level = 6);

/// A chart path certified consistent with the atlas.
struct LocalGeodesicPath {
  ChartPath path;
  double residual = 0.0;  // worst consistency violation found
  double epsilon = 0.0;   // admissible perturbation radius
  double length = 0.0;
};

class CertificationError : public GeometryError {
 public:
  CertificationError(const std::string& what, double residual, double a, double b, double t)
      : GeometryError(what), residual(residual), a(a), b(b), t(t) {}
  double residual, a, b, t;
};

inline constexpr int kCertifyLevel = 6;

/// Checks c((1-t)a + tb) = sigma_{c(a)c(b)}(t) on every sampled chart-contained
/// subsegment [a, b]. Throws CertificationError when the residual exceeds tol
/// or a sample lies in no chart.
LocalGeodesicPath certify_local_geodesic(const ChartPath& c, const ChartAtlas& A,
                                         double tol = kTauGeo, int level = kCertifyLevel);
/// Polyline input: each consecutive pair of samples becomes a chart piece.
LocalGeodesicPath certify_local_geodesic(const PolyLinePath& c, const ChartAtlas& A,
                                         double tol = kTauGeo, int level = kCertifyLevel);

/// Half the smallest best-chart slack along the sampled path.
double perturbation_radius(const ChartPath& c, const ChartAtlas& A, int level = kCertifyLevel);

struct AtlasPlan {
  int pairs_per_chart = 6;
  int quadruples_per_chart = 4;
  int overlap_pairs = 3;
  int t_level = 3;
  std::uint64_t seed = 1;
};

/// Chart-level checks sample declared points inside each chart and points on
/// chart geodesics between them. Reports, in order: coverage, containment,
/// geodesic, consistency, conical, overlap agreement.
std::vector<CheckReport> validate_atlas(const ChartAtlas& A, const AtlasPlan& plan = {},
                                        double tol = kTauGeo);

}  // namespace cartan
