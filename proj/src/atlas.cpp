#include "cartan/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cartan {

// ---------------------------------------------------------------- ChartAtlas

ChartAtlas::ChartAtlas(SpacePtr space, std::vector<Chart> charts, std::vector<Point> declared) {
  if (!space) throw GeometryError("ChartAtlas: null space");
  if (charts.empty()) throw GeometryError("ChartAtlas: no charts");
  for (const auto& c : charts) {
    if (!(c.radius > 0.0)) throw GeometryError("ChartAtlas: chart radius must be positive");
    if (!c.sigma.eval) throw GeometryError("ChartAtlas: chart without bicombing");
  }
  d_ = std::make_shared<const Data>(Data{std::move(space), std::move(charts), std::move(declared)});
}

double ChartAtlas::slack(std::size_t k, const Point& p) const {
  const auto& c = d_->charts[k];
  return c.radius - d_->space->distance(c.center, p);
}

std::optional<std::size_t> ChartAtlas::best_chart(const Point& p) const {
  std::optional<std::size_t> best;
  double s = 0.0;
  for (std::size_t k = 0; k < d_->charts.size(); ++k) {
    const double v = slack(k, p);
    if (v > s) {
      s = v;
      best = k;
    }
  }
  return best;
}

double ChartAtlas::best_slack(const Point& p) const {
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < d_->charts.size(); ++k) s = std::max(s, slack(k, p));
  return s;
}

std::optional<std::size_t> ChartAtlas::chart_containing(std::span<const Point> pts, double margin,
                                                        std::optional<std::size_t> hint) const {
  auto min_slack = [&](std::size_t k) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      m = std::min(m, slack(k, p));
      if (m <= margin) break;
    }
    return m;
  };
  if (hint && *hint < d_->charts.size() && min_slack(*hint) > margin) return hint;
  std::optional<std::size_t> best;
  double s = margin;
  for (std::size_t k = 0; k < d_->charts.size(); ++k) {
    const double v = min_slack(k);
    if (v > s) {
      s = v;
      best = k;
    }
  }
  return best;
}

SegmentInterpolator ChartAtlas::interpolator() const {
  return [atlas = *this](const Point& a, const Point& b, double t) {
    const Point pts[] = {a, b};
    const auto k = atlas.chart_containing(pts);
    if (!k) throw GeometryError("interpolator: samples share no chart");
    return atlas.chart(*k).sigma(a, b, t);
  };
}

// ----------------------------------------------------------------- ChartPath

ChartPath::ChartPath(std::vector<PathPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw GeometryError("ChartPath: no pieces");
  if (pieces_.front().t0 != 0.0 || pieces_.back().t1 != 1.0)
    throw GeometryError("ChartPath: parameters must run from 0 to 1");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].t0 < pieces_[i].t1)) throw GeometryError("ChartPath: empty piece");
    if (i > 0 && pieces_[i].t0 != pieces_[i - 1].t1)
      throw GeometryError("ChartPath: pieces not contiguous");
  }
}

ChartPath ChartPath::constant(const Point& p, std::size_t chart) {
  return ChartPath({PathPiece{0.0, 1.0, p, p, chart}});
}

ChartPath ChartPath::segment(const Point& a, const Point& b, std::size_t chart) {
  return ChartPath({PathPiece{0.0, 1.0, a, b, chart}});
}

Point ChartPath::at(double t, const ChartAtlas& A) const {
  t = std::clamp(t, 0.0, 1.0);
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), t,
                             [](const PathPiece& p, double v) { return p.t1 < v; });
  if (it == pieces_.end()) it = std::prev(pieces_.end());
  const double u = (t - it->t0) / (it->t1 - it->t0);
  if (u <= 0.0) return it->from;
  if (u >= 1.0) return it->to;
  return A.chart(it->chart).sigma(it->from, it->to, u);
}

ChartPath ChartPath::restrict(double a, double b, const ChartAtlas& A) const {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (a > b) throw GeometryError("ChartPath::restrict: a > b");
  const double w = b - a;
  if (w <= 1e-15) {
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), a,
                               [](const PathPiece& p, double v) { return p.t1 < v; });
    if (it == pieces_.end()) it = std::prev(pieces_.end());
    return constant(at(a, A), it->chart);
  }
  std::vector<PathPiece> out;
  for (const auto& p : pieces_) {
    if (p.t1 <= a || p.t0 >= b) continue;
    PathPiece q = p;
    if (p.t0 < a) q.from = at(a, A);
    if (p.t1 > b) q.to = at(b, A);
    q.t0 = std::max(0.0, (std::max(p.t0, a) - a) / w);
    q.t1 = std::min(1.0, (std::min(p.t1, b) - a) / w);
    if (!out.empty() && !(q.t1 > out.back().t1)) {
      out.back().to = q.to;  // sliver below resolution
      continue;
    }
    if (!out.empty()) q.t0 = out.back().t1;
    out.push_back(std::move(q));
  }
  out.front().t0 = 0.0;
  out.back().t1 = 1.0;
  return ChartPath(std::move(out));
}

ChartPath ChartPath::reversed() const {
  std::vector<PathPiece> out;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it)
    out.push_back({1.0 - it->t1, 1.0 - it->t0, it->to, it->from, it->chart});
  out.front().t0 = 0.0;
  out.back().t1 = 1.0;
  return ChartPath(std::move(out));
}

double ChartPath::length(const ChartAtlas& A) const {
  double L = 0.0;
  for (const auto& p : pieces_) L += A.space().distance(p.from, p.to);
  return L;
}

std::vector<double> ChartPath::sample_params(int level) const {
  auto g = dyadic_grid(level);
  for (const auto& p : pieces_) g.push_back(p.t0);
  std::sort(g.begin(), g.end());
  std::vector<double> out;
  for (double t : g)
    if (out.empty() || t - out.back() > 1e-14) out.push_back(t);
  out.back() = 1.0;
  return out;
}

PolyLinePath ChartPath::sample(int level, const ChartAtlas& A) const {
  auto params = sample_params(level);
  std::vector<Point> pts;
  pts.reserve(params.size());
  for (double t : params) pts.push_back(at(t, A));
  return PolyLinePath(std::move(params), std::move(pts));
}

ChartPath ChartPath::with_endpoints(const Point& p, const Point& q) const {
  ChartPath out = *this;
  out.pieces_.front().from = p;
  out.pieces_.back().to = q;
  return out;
}

ChartPath ChartPath::join(const ChartPath& c, const ChartPath& d, double split) {
  if (!(split > 0.0 && split < 1.0)) throw GeometryError("ChartPath::join: split outside (0,1)");
  std::vector<PathPiece> out;
  for (auto p : c.pieces_) {
    p.t0 *= split;
    p.t1 *= split;
    out.push_back(std::move(p));
  }
  out.back().t1 = split;
  bool first = true;
  for (auto p : d.pieces_) {
    p.t0 = split + (1.0 - split) * p.t0;
    p.t1 = split + (1.0 - split) * p.t1;
    if (first) {
      p.t0 = split;
      p.from = c.end();
      first = false;
    }
    out.push_back(std::move(p));
  }
  out.back().t1 = 1.0;
  return ChartPath(std::move(out));
}

ChartPath ChartPath::merged(const ChartAtlas& A, double tol) const {
  const auto& X = A.space();
  std::vector<PathPiece> out;
  std::size_t i = 0;
  while (i < pieces_.size()) {
    PathPiece cur = pieces_[i];
    std::vector<Point> pts{cur.from, cur.to};
    std::vector<double> joints{cur.t1};
    std::size_t j = i;
    while (j + 1 < pieces_.size()) {
      const auto& nx = pieces_[j + 1];
      pts.push_back(nx.to);
      const auto k = A.chart_containing(pts, 0.0, cur.chart);
      if (!k) {
        pts.pop_back();
        break;
      }
      // joints sit at pts[1 .. size-2]
      const auto& sigma = A.chart(*k).sigma;
      const double span = nx.t1 - cur.t0;
      bool ok = true;
      for (std::size_t m = 0; m < joints.size() && ok; ++m) {
        const Point g = sigma(cur.from, nx.to, (joints[m] - cur.t0) / span);
        ok = X.distance(g, pts[m + 1]) <= tol;
      }
      if (!ok) {
        pts.pop_back();
        break;
      }
      joints.push_back(nx.t1);
      cur = {cur.t0, nx.t1, cur.from, nx.to, *k};
      ++j;
    }
    out.push_back(std::move(cur));
    i = j + 1;
  }
  return ChartPath(std::move(out));
}

double chart_path_distance(const ChartPath& c, const ChartPath& c2, const ChartAtlas& A, int level) {
  auto params = c.sample_params(level);
  const auto more = c2.sample_params(level);
  params.insert(params.end(), more.begin(), more.end());
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
  double D = 0.0;
  for (double t : params) D = std::max(D, A.space().distance(c.at(t, A), c2.at(t, A)));
  return D;
}

// ------------------------------------------------------------- certification

double perturbation_radius(const ChartPath& c, const ChartAtlas& A, int level) {
  double s = std::numeric_limits<double>::infinity();
  for (double t : c.sample_params(level)) s = std::min(s, A.best_slack(c.at(t, A)));
  for (const auto& p : c.pieces()) s = std::min(s, A.best_slack(p.to));
  return 0.5 * std::max(0.0, s);
}

LocalGeodesicPath certify_local_geodesic(const ChartPath& c, const ChartAtlas& A, double tol,
                                         int level) {
  const auto& X = A.space();
  const auto params = c.sample_params(level);
  std::vector<Point> pts;
  std::vector<std::vector<std::size_t>> member(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    pts.push_back(c.at(params[i], A));
    for (std::size_t k = 0; k < A.charts().size(); ++k)
      if (A.slack(k, pts[i]) > 0.0) member[i].push_back(k);
    if (member[i].empty())
      throw CertificationError("certify_local_geodesic: sample lies in no chart", 0.0, params[i],
                               params[i], 0.0);
  }

  LocalGeodesicPath out;
  out.path = c;
  double wa = 0, wb = 0, wt = 0;
  constexpr double kT[] = {0.25, 0.5, 0.75};
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<std::size_t> common = member[i];
    for (std::size_t j = i + 1; j < params.size(); ++j) {
      std::vector<std::size_t> next;
      std::set_intersection(common.begin(), common.end(), member[j].begin(), member[j].end(),
                            std::back_inserter(next));
      if (next.empty()) break;
      common = std::move(next);
      const auto& sigma = A.chart(common.front()).sigma;
      const double a = params[i], b = params[j];
      for (double t : kT) {
        const double r = X.distance(sigma(pts[i], pts[j], t), c.at((1 - t) * a + t * b, A));
        if (r > out.residual) {
          out.residual = r;
          wa = a;
          wb = b;
          wt = t;
        }
      }
    }
  }
  if (out.residual > tol)
    throw CertificationError("certify_local_geodesic: consistency residual " +
                                 std::to_string(out.residual) + " at a=" + std::to_string(wa) +
                                 " b=" + std::to_string(wb) + " t=" + std::to_string(wt),
                             out.residual, wa, wb, wt);
  out.epsilon = perturbation_radius(c, A, level);
  out.length = c.length(A);
  return out;
}

LocalGeodesicPath certify_local_geodesic(const PolyLinePath& c, const ChartAtlas& A, double tol,
                                         int level) {
  const auto& t = c.params();
  const auto& p = c.points();
  if (p.empty()) throw GeometryError("certify_local_geodesic: empty path");
  if (p.size() == 1) {
    const auto k = A.best_chart(p[0]);
    if (!k) throw CertificationError("certify_local_geodesic: sample lies in no chart", 0, 0, 0, 0);
    return certify_local_geodesic(ChartPath::constant(p[0], *k), A, tol, level);
  }
  std::vector<PathPiece> pieces;
  std::optional<std::size_t> hint;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Point seg[] = {p[i], p[i + 1]};
    const auto k = A.chart_containing(seg, 0.0, hint);
    if (!k)
      throw CertificationError("certify_local_geodesic: unassignable segment", 0.0, t[i], t[i + 1],
                               0.0);
    hint = k;
    pieces.push_back({t[i], t[i + 1], p[i], p[i + 1], *k});
  }
  return certify_local_geodesic(ChartPath(std::move(pieces)), A, tol, level);
}

// ------------------------------------------------------------ validate_atlas

namespace {

void keep_worst(CheckReport& agg, const CheckReport& r, std::size_t chart) {
  if (r.residual > agg.residual) {
    agg.residual = r.residual;
    agg.witness = r.witness;
    agg.note = "chart " + std::to_string(chart);
  }
}

}  // namespace

std::vector<CheckReport> validate_atlas(const ChartAtlas& A, const AtlasPlan& plan, double tol) {
  const auto& X = A.space();
  const auto& charts = A.charts();
  std::mt19937_64 rng(plan.seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  CheckReport coverage{"coverage", true, 0.0, 0.0, {}, {}};
  for (const auto& p : A.declared()) {
    const double s = A.best_slack(p);
    if (s <= 0.0 && -s >= coverage.residual) {
      coverage.pass = false;
      coverage.residual = -s;
      coverage.witness = {{p}, {}};
      coverage.note = "point outside every open chart ball";
    }
  }

  std::vector<std::vector<std::size_t>> members(charts.size());
  for (std::size_t i = 0; i < A.declared().size(); ++i)
    for (std::size_t k = 0; k < charts.size(); ++k)
      if (A.slack(k, A.declared()[i]) > 0.0) members[k].push_back(i);

  CheckReport containment{"containment", true, 0.0, tol, {}, {}};
  CheckReport geodesic{"geodesic", true, 0.0, tol, {}, {}};
  CheckReport consistency{"consistency", true, 0.0, tol, {}, {}};
  CheckReport conical{"conical", true, 0.0, tol, {}, {}};
  const auto grid = dyadic_grid(plan.t_level);

  for (std::size_t k = 0; k < charts.size(); ++k) {
    const auto& ch = charts[k];
    std::vector<Point> pool{ch.center};
    for (auto i : members[k]) pool.push_back(A.declared()[i]);
    const std::size_t base = pool.size();
    for (std::size_t m = 0; m < base; ++m) {
      const Point q = ch.sigma(pool[pick(base)], pool[pick(base)], unit(rng));
      if (A.slack(k, q) > 0.0) pool.push_back(q);
    }
    CheckPlan cp;
    cp.t_level = plan.t_level;
    for (int m = 0; m < plan.pairs_per_chart; ++m)
      cp.pairs.emplace_back(pool[pick(pool.size())], pool[pick(pool.size())]);
    for (int m = 0; m < plan.quadruples_per_chart; ++m)
      cp.quadruples.push_back(
          {pool[pick(pool.size())], pool[pick(pool.size())], pool[pick(pool.size())],
           pool[pick(pool.size())]});

    for (const auto& [y, z] : cp.pairs)
      for (double t : grid) {
        const double v = -A.slack(k, ch.sigma(y, z, t));
        if (v > containment.residual) {
          containment.residual = v;
          containment.witness = {{y, z}, {t}};
          containment.note = "chart " + std::to_string(k);
        }
      }
    keep_worst(geodesic, check_geodesic(ch.sigma, cp, tol), k);
    keep_worst(consistency, check_consistency(ch.sigma, cp, tol), k);
    keep_worst(conical, check_conical(ch.sigma, cp, tol), k);
  }

  CheckReport overlap{"overlap", true, 0.0, tol, {}, {}};
  for (std::size_t k = 0; k < charts.size(); ++k)
    for (std::size_t l = k + 1; l < charts.size(); ++l) {
      if (X.distance(charts[k].center, charts[l].center) >= charts[k].radius + charts[l].radius)
        continue;
      std::vector<std::size_t> common;
      std::set_intersection(members[k].begin(), members[k].end(), members[l].begin(),
                            members[l].end(), std::back_inserter(common));
      if (common.empty()) continue;
      for (int m = 0; m < plan.overlap_pairs; ++m) {
        const Point& y = A.declared()[common[pick(common.size())]];
        const Point& z = A.declared()[common[pick(common.size())]];
        for (double t : grid) {
          const double v = X.distance(charts[k].sigma(y, z, t), charts[l].sigma(y, z, t));
          if (v > overlap.residual) {
            overlap.residual = v;
            overlap.witness = {{y, z}, {t}};
            overlap.note = "charts " + std::to_string(k) + "," + std::to_string(l);
          }
        }
      }
    }

  for (auto* r : {&containment, &geodesic, &consistency, &conical, &overlap})
    r->pass = r->residual <= r->tolerance;
  return {coverage, containment, geodesic, consistency, conical, overlap};
}

}  // namespace cartan
