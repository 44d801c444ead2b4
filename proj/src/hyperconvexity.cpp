#include "cartan/hyperconvexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cartan {

double Witness::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (double s : slacks) m = std::min(m, s);
  return m;
}

Witness make_witness(Point p, const BallFamily& F, const MetricSpace& X) {
  Witness w;
  w.slacks.reserve(F.size());
  for (const auto& b : F) w.slacks.push_back(b.radius - X.distance(b.center, p));
  w.point = std::move(p);
  return w;
}

Feasibility pairwise_feasible(const BallFamily& F, const MetricSpace& X, double tol) {
  Feasibility out;
  out.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = i + 1; j < F.size(); ++j) {
      const double e = X.distance(F[i].center, F[j].center) - F[i].radius - F[j].radius;
      if (e > out.worst_excess) {
        out.worst_excess = e;
        out.i = i;
        out.j = j;
      }
    }
  if (F.size() < 2) out.worst_excess = 0.0;
  out.feasible = out.worst_excess <= tol;
  return out;
}

Witness helly_witness_linf(const BallFamily& F, double tol, const LinfSpace* domain) {
  if (F.empty()) throw GeometryError("helly_witness_linf: empty family");
  const std::size_t n = F.front().center.size();
  for (const auto& b : F) {
    if (b.center.size() != n) throw GeometryError("helly_witness_linf: mixed dimensions");
    if (!(b.radius >= 0.0)) throw GeometryError("helly_witness_linf: negative radius");
  }
  Point p(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& b : F) {
      lo = std::max(lo, b.center[k] - b.radius);
      hi = std::min(hi, b.center[k] + b.radius);
    }
    if (domain && domain->bounded()) {
      lo = std::max(lo, domain->lo()[k]);
      hi = std::min(hi, domain->hi()[k]);
    }
    if (lo > hi + tol)
      throw GeometryError("helly_witness_linf: empty interval in coordinate " + std::to_string(k) +
                          " (gap " + std::to_string(lo - hi) + "); family is not pairwise feasible");
    p[k] = 0.5 * (lo + hi);
  }
  return make_witness(std::move(p), F, LinfSpace(n));
}

std::optional<Witness> helly_witness_finite(const BallFamily& F, const FiniteSpace& X,
                                            const std::vector<std::size_t>& candidates, double tol) {
  std::optional<Witness> best;
  auto consider = [&](std::size_t i) {
    Witness w = make_witness(FiniteSpace::point(i), F, X);
    if (!best || w.min_slack() > best->min_slack()) best = std::move(w);
  };
  if (candidates.empty())
    for (std::size_t i = 0; i < X.size(); ++i) consider(i);
  else
    for (std::size_t i : candidates) consider(i);
  if (best && best->min_slack() < -tol) return std::nullopt;
  return best;
}

Witness tight_span_helly_witness(const BallFamily& F, const DistanceMatrix& X, double tol) {
  Witness box = helly_witness_linf(F, tol);
  return make_witness(retract_to_tight_span(box.point, X), F, LinfSpace(X.size()));
}

WitnessSolver geodesic_candidate_solver(const Bicombing& sigma) {
  return [sigma](const BallFamily& F) -> std::optional<Witness> {
    if (F.empty()) return std::nullopt;
    const auto& X = *sigma.space;
    std::optional<Witness> best;
    auto consider = [&](Point p) {
      Witness w = make_witness(std::move(p), F, X);
      if (!best || w.min_slack() > best->min_slack()) best = std::move(w);
    };
    for (const auto& b : F) consider(b.center);
    for (std::size_t i = 0; i < F.size(); ++i)
      for (std::size_t j = 0; j < F.size(); ++j) {
        if (i == j) continue;
        const double d = X.distance(F[i].center, F[j].center);
        if (d <= 0.0) continue;
        for (double t : {F[i].radius / d, (d - F[j].radius) / d})
          if (t > 0.0 && t < 1.0) consider(sigma(F[i].center, F[j].center, t));
      }
    return best;
  };
}

HellyBackend linf_box_backend(std::shared_ptr<const LinfSpace> box) {
  if (!box->bounded()) throw GeometryError("linf_box_backend: box bounds required");
  HellyBackend b;
  b.space = box;
  b.name = "linf-box";
  double side = 0.0;
  for (std::size_t k = 0; k < box->dimension(); ++k) side = std::max(side, box->hi()[k] - box->lo()[k]);
  b.max_radius = 0.5 * side;
  b.sample_center = [box](std::mt19937_64& rng) {
    Point p(box->dimension());
    for (std::size_t k = 0; k < p.size(); ++k)
      p[k] = std::uniform_real_distribution<double>(box->lo()[k], box->hi()[k])(rng);
    return p;
  };
  b.solve = [box](const BallFamily& F) -> std::optional<Witness> {
    try {
      return helly_witness_linf(F, kTauMetric, box.get());
    } catch (const GeometryError&) {
      return std::nullopt;
    }
  };
  return b;
}

HellyBackend finite_backend(std::shared_ptr<const FiniteSpace> X, std::vector<std::size_t> subset) {
  if (subset.empty())
    for (std::size_t i = 0; i < X->size(); ++i) subset.push_back(i);
  HellyBackend b;
  b.space = X;
  b.name = "finite";
  double diam = 0.0;
  b.integer_radii = true;
  for (std::size_t i : subset)
    for (std::size_t j : subset) {
      diam = std::max(diam, X->metric()(i, j));
      if (X->metric()(i, j) != std::round(X->metric()(i, j))) b.integer_radii = false;
    }
  b.max_radius = std::max(0.5 * diam, 1e-12);
  b.sample_center = [subset](std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, subset.size() - 1);
    return FiniteSpace::point(subset[pick(rng)]);
  };
  b.solve = [X, subset](const BallFamily& F) -> std::optional<Witness> {
    return helly_witness_finite(F, *X, subset, std::numeric_limits<double>::infinity());
  };
  return b;
}

BallFamily random_feasible_family(const HellyBackend& backend, int size, std::mt19937_64& rng) {
  const auto& X = *backend.space;
  std::uniform_real_distribution<double> radius(0.0, backend.max_radius);
  BallFamily F;
  for (int i = 0; i < size; ++i) {
    Point c = backend.sample_center(rng);
    const double r = radius(rng);
    F.push_back({std::move(c), backend.integer_radii ? std::floor(r + 0.5) : r});
  }
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = i + 1; j < F.size(); ++j) {
      const double e = X.distance(F[i].center, F[j].center) - F[i].radius - F[j].radius;
      if (e <= 0.0) continue;
      if (backend.integer_radii) {
        F[i].radius += std::ceil(0.5 * e);
        F[j].radius += std::floor(0.5 * e);
      } else {
        F[i].radius += 0.5 * e;
        F[j].radius += 0.5 * e;
      }
    }
  return F;
}

CheckReport is_hyperconvex_sampled(const HellyBackend& backend, int trials, int max_family,
                                   std::uint64_t seed) {
  if (max_family < 1) throw GeometryError("is_hyperconvex_sampled: family size must be positive");
  CheckReport r;
  r.property = "hyperconvex-sampled";
  r.tolerance = kTauMetric;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(std::min(2, max_family), max_family);
  int ok = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const BallFamily F = random_feasible_family(backend, size(rng), rng);
    const auto w = backend.solve(F);
    const double violation = w ? -w->min_slack() : std::numeric_limits<double>::max();
    if (violation <= r.tolerance) {
      ++ok;
      continue;
    }
    if (r.pass) {
      r.pass = false;
      r.residual = w ? violation : 1.0;
      for (const auto& b : F) {
        r.witness.points.push_back(b.center);
        r.witness.params.push_back(b.radius);
      }
    }
  }
  r.note = backend.name + ": " + std::to_string(ok) + "/" + std::to_string(trials) +
           " families admit a witness";
  return r;
}

namespace {

struct Halver {
  const Bicombing& sigma;
  const WitnessSolver& base;
  double r0;
  double tol;
  long calls = 0;

  Point solve(const BallFamily& F, int level) {
    if (level > 60) throw GeometryError("halving_witness: recursion depth exceeds 60");
    double rmax = 0.0;
    for (const auto& b : F) rmax = std::max(rmax, b.radius);
    if (rmax <= r0) {
      ++calls;
      const auto w = base(F);
      if (!w || w->min_slack() < -tol)
        throw GeometryError("halving_witness: base solver failed at level " + std::to_string(level) +
                            (w ? ", slack " + std::to_string(w->min_slack()) : std::string()));
      return w->point;
    }
    const std::size_t k = F.size();
    BallFamily outer;
    for (std::size_t i = 0; i < k; ++i) {
      BallFamily Fi;
      for (std::size_t j = 0; j < k; ++j) {
        Point y = i == j ? F[i].center : sigma(F[i].center, F[j].center, 0.5);
        Fi.push_back({std::move(y), 0.5 * F[j].radius});
      }
      outer.push_back({solve(Fi, level + 1), 0.5 * F[i].radius});
    }
    return solve(outer, level + 1);
  }
};

}  // namespace

HalvingResult halving_witness(const BallFamily& F, const Bicombing& sigma, const WitnessSolver& base,
                              double r0) {
  if (F.empty()) throw GeometryError("halving_witness: empty family");
  if (!(r0 > 0.0)) throw GeometryError("halving_witness: R0 must be positive");
  const auto& X = *sigma.space;
  const auto feas = pairwise_feasible(F, X);
  if (!feas.feasible)
    throw GeometryError("halving_witness: family is not pairwise feasible (balls " +
                        std::to_string(feas.i) + ", " + std::to_string(feas.j) + ")");
  double rmax = 0.0;
  for (const auto& b : F) rmax = std::max(rmax, b.radius);
  HalvingResult out;
  out.depth = rmax > r0 ? static_cast<int>(std::ceil(std::log2(rmax / r0))) : 0;
  if (out.depth > 60) throw GeometryError("halving_witness: recursion depth exceeds 60");
  out.tolerance = kTauMetric * (out.depth + 1);
  Halver h{sigma, base, r0, out.tolerance};
  Point p = h.solve(F, 0);
  out.base_calls = h.calls;
  out.witness = make_witness(std::move(p), F, X);
  if (out.witness.min_slack() < -out.tolerance)
    throw GeometryError("halving_witness: witness slack " + std::to_string(out.witness.min_slack()) +
                        " below tolerance");
  return out;
}

DistanceMatrix cycle_metric(int n) {
  if (n < 3) throw GeometryError("cycle_metric: need at least 3 vertices");
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    labels.push_back("v" + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      const int k = std::abs(i - j);
      d[i][j] = std::min(k, n - k);
    }
  }
  return make_metric(d, labels);
}

SphereReport sphere_counterexample(int n, int trials, std::uint64_t seed) {
  if (n < 6 || n % 3 != 0)
    throw GeometryError("sphere_counterexample: n must be a multiple of 3 with n >= 6, got " +
                        std::to_string(n));
  SphereReport rep;
  rep.n = n;
  const int third = n / 3;
  rep.x = FiniteSpace::point(0);
  rep.y = FiniteSpace::point(third);
  rep.z = FiniteSpace::point(2 * third);
  rep.eps = 1.0;
  rep.r = third;
  rep.local_radius = n / 4;
  auto X = std::make_shared<const FiniteSpace>(cycle_metric(n));
  const auto& D = X->metric();

  // (a) every radius-floor(n/4) ball is an isometric arc, hence hyperconvex
  {
    CheckReport interval;
    interval.property = "local-balls-interval";
    CheckReport sampled;
    sampled.property = "local-balls-hyperconvex";
    sampled.tolerance = kTauMetric;
    int passed = 0;
    for (int v = 0; v < n; ++v) {
      const int rho = rep.local_radius;
      std::vector<std::size_t> ball;
      for (int a = -rho; a <= rho; ++a) ball.push_back(static_cast<std::size_t>(((v + a) % n + n) % n));
      for (int a = 0; a <= 2 * rho && interval.pass; ++a)
        for (int b = 0; b <= 2 * rho; ++b)
          if (D(ball[a], ball[b]) != std::abs(a - b)) {
            interval.pass = false;
            interval.residual = std::abs(D(ball[a], ball[b]) - std::abs(a - b));
            interval.witness.points = {FiniteSpace::point(ball[a]), FiniteSpace::point(ball[b])};
            break;
          }
      auto r = is_hyperconvex_sampled(finite_backend(X, ball), trials, 4, seed + v);
      if (r.pass) {
        ++passed;
      } else if (sampled.pass) {
        sampled.pass = false;
        sampled.residual = r.residual;
        sampled.witness = r.witness;
      }
    }
    interval.note = std::to_string(n) + " balls of radius " + std::to_string(rep.local_radius);
    sampled.note = std::to_string(passed) + "/" + std::to_string(n) + " balls pass " +
                   std::to_string(trials) + " sampled families";
    rep.local_balls_hyperconvex = interval.pass && sampled.pass;
    rep.checks.push_back(std::move(interval));
    rep.checks.push_back(std::move(sampled));
  }

  const BallFamily F{{rep.x, rep.eps}, {rep.y, rep.r - rep.eps}, {rep.z, rep.r - rep.eps}};
  {
    const auto feas = pairwise_feasible(F, *X, 0.0);
    CheckReport c;
    c.property = "pairwise-feasible";
    c.pass = feas.feasible;
    c.residual = std::max(0.0, feas.worst_excess);
    rep.checks.push_back(std::move(c));
  }

  // (b) the triple intersection is empty on the vertices
  {
    CheckReport c;
    c.property = "triple-empty-in-cycle";
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t v = 0; v < X->size(); ++v) {
      const double s = make_witness(FiniteSpace::point(v), F, *X).min_slack();
      if (s > best) {
        best = s;
        arg = v;
      }
    }
    c.pass = best < 0.0;
    c.residual = c.pass ? 0.0 : best;
    c.witness.points = {FiniteSpace::point(arg)};
    c.witness.params = {best};
    c.note = "best vertex slack " + std::to_string(best);
    rep.triple_empty_in_cycle = c.pass;
    rep.checks.push_back(std::move(c));
  }

  // (c) in the Kuratowski embedding the balls are boxes with a common point
  {
    const auto rows = kuratowski_embed(D);
    BallFamily G;
    for (const auto& b : F) G.push_back({rows[static_cast<std::size_t>(b.center[0])], b.radius});
    CheckReport c;
    c.property = "box-nonempty";
    try {
      rep.box_witness = helly_witness_linf(G, 0.0);
      c.pass = rep.box_witness.min_slack() >= 0.0;
      c.residual = std::max(0.0, -rep.box_witness.min_slack());
      c.witness.points = {rep.box_witness.point};
      c.witness.params = rep.box_witness.slacks;
    } catch (const GeometryError& e) {
      c.pass = false;
      c.note = e.what();
    }
    rep.box_nonempty = c.pass;
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace cartan
