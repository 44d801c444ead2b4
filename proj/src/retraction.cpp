#include "cartan/retraction.hpp"

#include <algorithm>
#include <cmath>
#include <array>

namespace cartan {

namespace {

double dist(const Point& a, const Point& b) { return linf_distance(a, b); }

void check_fixed(const Retraction& rho, const Point& p, const char* what) {
  if (dist(rho(p), p) > kTauMetric)
    throw GeometryError(std::string("retraction_geodesic: rho moves ") + what + " (not a point of X)");
}

}  // namespace

PolyLinePath retraction_geodesic(const Point& x, const Point& y, const Retraction& rho,
                                 const BicombingFn& chart, double r, int samples_per_piece) {
  if (!(r > 0.0)) throw GeometryError("retraction_geodesic: scale must be positive");
  if (x.size() != y.size()) throw GeometryError("retraction_geodesic: dimension mismatch");
  if (samples_per_piece < 1) samples_per_piece = 1;
  check_fixed(rho, x, "x");
  check_fixed(rho, y, "y");

  const double total = dist(x, y);
  std::vector<Point> ambient{x, y}, image{x, y};
  std::vector<Point> knots{x};
  Point cur = x;
  while (dist(cur, y) > r) {
    const double d = dist(cur, y);
    const Point z = lerp(cur, y, r / d);
    Point w = rho(z);
    if (dist(rho(w), w) > kTauMetric)
      throw GeometryError("retraction_geodesic: rho is not idempotent on a sampled point");
    for (std::size_t i = 0; i < ambient.size(); ++i)
      if (dist(w, image[i]) > dist(z, ambient[i]) + kTauMetric)
        throw GeometryError("retraction_geodesic: rho fails the 1-Lipschitz check (excess " +
                            std::to_string(dist(w, image[i]) - dist(z, ambient[i])) + ")");
    const double split = dist(cur, w) + dist(w, y) - d;
    if (std::abs(split) > kTauMetric * std::max(1.0, d))
      throw GeometryError("retraction_geodesic: additivity violated by " + std::to_string(split));
    if (dist(cur, w) <= 0.5 * r)
      throw GeometryError("retraction_geodesic: no progress at scale r");
    ambient.push_back(z);
    image.push_back(w);
    knots.push_back(w);
    cur = std::move(w);
  }
  knots.push_back(y);

  std::vector<Point> pts{x};
  std::vector<double> arc{0.0};
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double len = dist(knots[k], knots[k + 1]);
    for (int j = 1; j <= samples_per_piece; ++j) {
      const double t = static_cast<double>(j) / samples_per_piece;
      pts.push_back(j == samples_per_piece ? knots[k + 1] : chart(knots[k], knots[k + 1], t));
      arc.push_back(acc + t * len);
    }
    acc += len;
  }
  if (total == 0.0) return PolyLinePath({0.0}, {x});
  std::vector<double> params;
  std::vector<Point> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double s = i + 1 == pts.size() ? 1.0 : arc[i] / acc;
    if (!params.empty() && s <= params.back()) continue;
    params.push_back(s);
    kept.push_back(std::move(pts[i]));
  }
  PolyLinePath out(std::move(params), std::move(kept));
  const double defect = geodesic_defect(out, LinfSpace(x.size()));
  if (defect > kTauGeo)
    throw GeometryError("retraction_geodesic: geodesic defect " + std::to_string(defect) +
                        " exceeds tolerance");
  return out;
}

std::string to_string(ShortenResult::Status s) {
  switch (s) {
    case ShortenResult::Status::Shortened: return "shortened";
    case ShortenResult::Status::Contracted: return "contracted";
    case ShortenResult::Status::AuditFailed: return "audit-failed";
    case ShortenResult::Status::NoDecrease: return "no-decrease";
  }
  return "unknown";
}

namespace {

// Point at arc position u of the boundary of [0, a]^2, counterclockwise from the origin.
std::array<double, 2> square_point(double a, double u) {
  const double side = std::floor(u / a);
  const double v = u - side * a;
  switch (static_cast<int>(side) % 4) {
    case 0: return {v, 0.0};
    case 1: return {a, v};
    case 2: return {a - v, a};
    default: return {0.0, a - v};
  }
}

double plane_dist(const std::array<double, 2>& p, const std::array<double, 2>& q) {
  return std::max(std::abs(p[0] - q[0]), std::abs(p[1] - q[1]));
}

ShortenResult audit_failure(ShortenResult res, const PolyLinePath& gamma, const GeometryError& e) {
  res.status = ShortenResult::Status::AuditFailed;
  res.loop = gamma;
  res.length_after = res.length_before;
  res.note = e.what();
  return res;
}

}  // namespace

ShortenResult shorten_loop(const PolyLinePath& gamma, const Retraction& rho, double r) {
  if (!(r > 0.0)) throw GeometryError("shorten_loop: scale must be positive");
  if (gamma.size() < 2 || dist(gamma.front(), gamma.back()) > kTauSample)
    throw GeometryError("shorten_loop: path is not closed");

  // distinct samples along the loop with their arc positions
  std::vector<Point> pts{gamma.front()};
  std::vector<double> arc{0.0};
  double L = 0.0;
  for (std::size_t i = 1; i < gamma.size(); ++i) {
    const double d = dist(gamma.points()[i - 1], gamma.points()[i]);
    L += d;
    if (d > 0.0 && i + 1 < gamma.size()) {
      pts.push_back(gamma.points()[i]);
      arc.push_back(L);
    }
  }
  ShortenResult res;
  res.length_before = L;
  res.bound = std::max(0.0, L - 8 * r);
  const std::size_t N = pts.size();
  const double a = L / 4;
  std::vector<std::array<double, 2>> outer(N);
  for (std::size_t k = 0; k < N; ++k) outer[k] = square_point(a, arc[k]);
  std::vector<std::size_t> anchors(N);
  for (std::size_t k = 0; k < N; ++k) anchors[k] = k;

  // symmetric McShane extension: mean of the lower and upper extensions
  auto extend = [&](const std::vector<std::array<double, 2>>& nodes) {
    std::vector<std::vector<double>> D(nodes.size(), std::vector<double>(nodes.size(), 0.0));
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j) D[i][j] = plane_dist(nodes[i], nodes[j]);
    const DistanceMatrix B = make_metric(D);
    auto lower = mcshane_extend(B, anchors, pts);
    std::vector<Point> neg = pts;
    for (auto& p : neg)
      for (double& v : p) v = -v;
    const auto upper = mcshane_extend(B, anchors, neg);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t k = 0; k < lower[i].size(); ++k) lower[i][k] = 0.5 * (lower[i][k] - upper[i][k]);
    return lower;
  };

  if (N < 2 || L <= 8 * r) {
    auto nodes = outer;
    nodes.push_back({0.5 * a, 0.5 * a});
    Point centre = pts.front();
    if (N >= 2) {
      try {
        centre = extend(nodes)[N];
      } catch (const GeometryError& e) {
        return audit_failure(std::move(res), gamma, e);
      }
    }
    const Point p = rho(centre);
    res.loop = PolyLinePath({0.0, 1.0}, {p, p});
    res.status = ShortenResult::Status::Contracted;
    res.eta = L;
    res.note = "disk variant";
    return res;
  }

  const double scale = (a - 2 * r) / a;
  auto nodes = outer;
  for (std::size_t k = 0; k < N; ++k)
    nodes.push_back({0.5 * a + scale * (outer[k][0] - 0.5 * a), 0.5 * a + scale * (outer[k][1] - 0.5 * a)});
  std::vector<Point> ext;
  try {
    ext = extend(nodes);
  } catch (const GeometryError& e) {
    return audit_failure(std::move(res), gamma, e);
  }
  std::vector<Point> loop;
  for (std::size_t k = 0; k < N; ++k) loop.push_back(rho(ext[N + k]));
  loop.push_back(loop.front());
  double L2 = 0.0;
  for (std::size_t k = 0; k + 1 < loop.size(); ++k) L2 += dist(loop[k], loop[k + 1]);
  res.loop = PolyLinePath(std::move(loop));
  res.length_after = L2;
  res.eta = L - L2;
  res.status = res.eta > kTauGeo ? ShortenResult::Status::Shortened : ShortenResult::Status::NoDecrease;
  res.note = "annulus sides " + std::to_string(a) + ", " + std::to_string(a - 2 * r);
  return res;
}

}  // namespace cartan
