#include "cartan/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cartan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
}  // namespace

// ---------------------------------------------------------------- FiniteSpace

double FiniteSpace::distance(const Point& a, const Point& b) const {
  if (!contains(a) || !contains(b)) throw GeometryError("FiniteSpace: point out of range");
  return d_(static_cast<std::size_t>(a[0]), static_cast<std::size_t>(b[0]));
}

bool FiniteSpace::contains(const Point& p) const {
  return p.size() == 1 && p[0] >= 0 && p[0] < static_cast<double>(d_.size()) &&
         p[0] == std::floor(p[0]);
}

// ------------------------------------------------------------------ LinfSpace

LinfSpace::LinfSpace(Point lo, Point hi)
    : dim_(lo.size()), box_(true), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw GeometryError("LinfSpace: box corners differ in dimension");
  for (std::size_t i = 0; i < dim_; ++i)
    if (!(lo_[i] <= hi_[i])) throw GeometryError("LinfSpace: empty box");
}

double LinfSpace::distance(const Point& a, const Point& b) const {
  if (a.size() != dim_ || b.size() != dim_) throw GeometryError("LinfSpace: dimension mismatch");
  return linf_distance(a, b);
}

bool LinfSpace::contains(const Point& p) const {
  if (p.size() != dim_) return false;
  if (!box_) return true;
  for (std::size_t i = 0; i < dim_; ++i)
    if (p[i] < lo_[i] - 1e-12 || p[i] > hi_[i] + 1e-12) return false;
  return true;
}

// ---------------------------------------------------------------- MetricGraph

MetricGraph::MetricGraph(std::vector<std::string> vertices, std::vector<GraphEdge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), n_(vertices_.size()) {
  if (n_ == 0) throw GeometryError("MetricGraph: no vertices");
  incident_.assign(n_, {});
  apsp_.assign(n_ * n_, kInf);
  next_.assign(n_ * n_, kNone);
  for (std::size_t v = 0; v < n_; ++v) {
    apsp_[v * n_ + v] = 0.0;
    next_[v * n_ + v] = v;
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& E = edges_[e];
    if (E.u >= n_ || E.v >= n_ || E.u == E.v)
      throw GeometryError("MetricGraph: bad edge " + std::to_string(e));
    if (!(E.length > 0.0)) throw GeometryError("MetricGraph: nonpositive edge length");
    incident_[E.u].push_back(e);
    incident_[E.v].push_back(e);
    if (E.length < apsp_[E.u * n_ + E.v]) {
      apsp_[E.u * n_ + E.v] = apsp_[E.v * n_ + E.u] = E.length;
      next_[E.u * n_ + E.v] = E.v;
      next_[E.v * n_ + E.u] = E.u;
    }
  }
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double via = apsp_[i * n_ + k] + apsp_[k * n_ + j];
        if (via < apsp_[i * n_ + j] - 1e-15) {
          apsp_[i * n_ + j] = via;
          next_[i * n_ + j] = next_[i * n_ + k];
        }
      }
  for (double v : apsp_)
    if (v == kInf) throw GeometryError("MetricGraph: graph is not connected");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& E = edges_[e];
    if (E.length > apsp_[E.u * n_ + E.v] + kTauMetric)
      throw GeometryError("MetricGraph: edge " + std::to_string(e) +
                          " is longer than the shortest path between its endpoints");
  }
}

DistanceMatrix MetricGraph::vertex_metric() const {
  std::vector<std::vector<double>> d(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) d[i][j] = apsp_[i * n_ + j];
  return make_metric(d, vertices_);
}

bool MetricGraph::contains(const Point& p) const {
  if (p.size() != 2 || p[0] < 0 || p[0] >= static_cast<double>(edges_.size()) ||
      p[0] != std::floor(p[0]))
    return false;
  const double L = edges_[static_cast<std::size_t>(p[0])].length;
  return p[1] >= -1e-12 && p[1] <= L + 1e-12;
}

Point MetricGraph::vertex_point(std::size_t v) const {
  if (v >= n_) throw GeometryError("MetricGraph: vertex out of range");
  if (incident_[v].empty()) throw GeometryError("MetricGraph: isolated vertex");
  const std::size_t e = incident_[v].front();
  return {static_cast<double>(e), edges_[e].u == v ? 0.0 : edges_[e].length};
}

Point MetricGraph::edge_point(std::size_t e, double offset) const {
  if (e >= edges_.size()) throw GeometryError("MetricGraph: edge out of range");
  return {static_cast<double>(e), std::clamp(offset, 0.0, edges_[e].length)};
}

std::optional<std::size_t> MetricGraph::as_vertex(const Point& p) const {
  const auto& E = edges_[static_cast<std::size_t>(p[0])];
  if (p[1] <= 1e-12) return E.u;
  if (p[1] >= E.length - 1e-12) return E.v;
  return std::nullopt;
}

MetricGraph::Route MetricGraph::route(const Point& a, const Point& b, bool with_hops) const {
  if (!contains(a) || !contains(b)) throw GeometryError("MetricGraph: point not on graph");
  const auto ea = static_cast<std::size_t>(a[0]);
  const auto eb = static_cast<std::size_t>(b[0]);
  const auto& A = edges_[ea];
  const auto& B = edges_[eb];
  Route best{kInf, {}};
  if (ea == eb) best.length = std::abs(a[1] - b[1]);
  const std::size_t ua[2] = {A.u, A.v};
  const double ca[2] = {a[1], A.length - a[1]};
  const std::size_t ub[2] = {B.u, B.v};
  const double cb[2] = {b[1], B.length - b[1]};
  std::size_t bi = kNone, bj = kNone;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double len = ca[i] + apsp_[ua[i] * n_ + ub[j]] + cb[j];
      if (len < best.length - 1e-13) {
        best.length = len;
        bi = static_cast<std::size_t>(i);
        bj = static_cast<std::size_t>(j);
      }
    }
  if (with_hops && bi != kNone) {
    std::size_t v = ua[bi];
    const std::size_t target = ub[bj];
    best.hops.push_back(v);
    while (v != target) {
      v = next_[v * n_ + target];
      best.hops.push_back(v);
    }
  }
  return best;
}

double MetricGraph::distance(const Point& a, const Point& b) const { return route(a, b, false).length; }

Point MetricGraph::shortest_arc(const Point& a, const Point& b, double t) const {
  const Route r = route(a, b);
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  double remaining = t * r.length;
  if (r.hops.empty()) {
    const double dir = b[1] >= a[1] ? 1.0 : -1.0;
    return edge_point(static_cast<std::size_t>(a[0]), a[1] + dir * remaining);
  }
  const auto ea = static_cast<std::size_t>(a[0]);
  const auto& A = edges_[ea];
  // Leg 1: along a's edge to the first hop vertex.
  {
    const bool toward_u = r.hops.front() == A.u && !(A.u == A.v);
    const double leg = toward_u ? a[1] : A.length - a[1];
    if (remaining <= leg) return edge_point(ea, toward_u ? a[1] - remaining : a[1] + remaining);
    remaining -= leg;
  }
  // Middle: vertex to vertex along shortest edges.
  for (std::size_t h = 0; h + 1 < r.hops.size(); ++h) {
    const std::size_t v = r.hops[h], w = r.hops[h + 1];
    std::size_t edge = kNone;
    for (auto e : incident_[v]) {
      const auto& E = edges_[e];
      if ((E.u == w || E.v == w) && (edge == kNone || E.length < edges_[edge].length)) edge = e;
    }
    const auto& E = edges_[edge];
    if (remaining <= E.length)
      return edge_point(edge, E.u == v ? remaining : E.length - remaining);
    remaining -= E.length;
  }
  // Leg 2: from the last hop vertex along b's edge.
  const auto eb = static_cast<std::size_t>(b[0]);
  const auto& B = edges_[eb];
  const bool from_u = r.hops.back() == B.u;
  const double leg = from_u ? b[1] : B.length - b[1];
  remaining = std::min(remaining, leg);
  return edge_point(eb, from_u ? remaining : B.length - remaining);
}

std::vector<Point> MetricGraph::net(double spacing) const {
  std::vector<Point> out;
  for (std::size_t v = 0; v < n_; ++v) out.push_back(vertex_point(v));
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto m = static_cast<std::size_t>(std::ceil(edges_[e].length / spacing - 1e-9));
    for (std::size_t k = 1; k < m; ++k)
      out.push_back(edge_point(e, edges_[e].length * static_cast<double>(k) / static_cast<double>(m)));
  }
  return out;
}

// --------------------------------------------------------------- FlatCylinder

FlatCylinder::FlatCylinder(double circumference, double height)
    : circ_(circumference), height_(height) {
  if (!(circ_ > 0) || !(height_ >= 0)) throw GeometryError("FlatCylinder: invalid dimensions");
}

Point FlatCylinder::normalize(const Point& p) const {
  double a = std::fmod(p[0], circ_);
  if (a < 0) a += circ_;
  if (a >= circ_) a -= circ_;
  return {a, std::clamp(p[1], 0.0, height_)};
}

double FlatCylinder::unwrap_near(double reference_angle, double angle) const {
  const double k = std::round((reference_angle - angle) / circ_);
  return angle + k * circ_;
}

double FlatCylinder::distance(const Point& a, const Point& b) const {
  if (a.size() != 2 || b.size() != 2) throw GeometryError("FlatCylinder: expected (angle, height)");
  const double da = unwrap_near(a[0], b[0]) - a[0];
  const double dh = b[1] - a[1];
  return std::hypot(da, dh);
}

bool FlatCylinder::contains(const Point& p) const {
  return p.size() == 2 && std::isfinite(p[0]) && p[1] >= -1e-12 && p[1] <= height_ + 1e-12;
}

Point FlatCylinder::straight(const Point& a, const Point& b, double t) const {
  const double bu = unwrap_near(a[0], b[0]);
  return normalize({(1 - t) * a[0] + t * bu, (1 - t) * a[1] + t * b[1]});
}

}  // namespace cartan
