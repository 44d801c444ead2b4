// Ball families, Helly witnesses, the halving recursion and the circle
// counterexample.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cartan/bicombing.hpp"

namespace cartan {

struct Ball {
  Point center;
  double radius = 0.0;
};

using BallFamily = std::vector<Ball>;

struct Witness {
  Point point;
  std::vector<double> slacks;  // r_i - d(x_i, point)
  double min_slack() const;
};

Witness make_witness(Point p, const BallFamily& F, const MetricSpace& X);

struct Feasibility {
  bool feasible = true;
  double worst_excess = 0.0;  // max of d(x_i, x_j) - r_i - r_j
  std::size_t i = 0, j = 0;
};

Feasibility pairwise_feasible(const BallFamily& F, const MetricSpace& X, double tol = kTauMetric);

/// Balls in l-infinity are boxes: intersect coordinate intervals and return the
/// interval midpoints. With `domain` the intervals are also clipped to the box.
/// Throws if some interval is empty by more than tol.
Witness helly_witness_linf(const BallFamily& F, double tol = kTauMetric,
                           const LinfSpace* domain = nullptr);

/// Maximal-slack point among `candidates` (all points when empty), lowest
/// index on ties; nullopt when its slack is below -tol.
std::optional<Witness> helly_witness_finite(const BallFamily& F, const FiniteSpace& X,
                                            const std::vector<std::size_t>& candidates = {},
                                            double tol = kTauMetric);

/// Balls with centers in the tight span E(X): box witness in l-infinity^n
/// followed by the 1-Lipschitz retraction onto E(X).
Witness tight_span_helly_witness(const BallFamily& F, const DistanceMatrix& X,
                                 double tol = kTauMetric);

/// Solvers return the best candidate they found; callers compare its minimum
/// slack with their tolerance. nullopt means no candidate at all.
using WitnessSolver = std::function<std::optional<Witness>(const BallFamily&)>;

/// Best point among the centers and the points of [x_i, x_j] at distance r_i
/// from x_i or r_j from x_j. Exact on metric trees, where the gate of x_i in
/// the intersection is always of this form.
WitnessSolver geodesic_candidate_solver(const Bicombing& sigma);

struct HellyBackend {
  SpacePtr space;
  std::function<Point(std::mt19937_64&)> sample_center;
  WitnessSolver solve;
  double max_radius = 1.0;
  /// Integer-valued metrics on vertex sets are only hyperconvex for integer
  /// radii (B(a, 1/2) and B(b, 1/2) miss each other when d(a, b) = 1).
  bool integer_radii = false;
  std::string name;
};

HellyBackend linf_box_backend(std::shared_ptr<const LinfSpace> box);
/// Enumeration over the given point subset (all points when empty).
HellyBackend finite_backend(std::shared_ptr<const FiniteSpace> X, std::vector<std::size_t> subset = {});

/// Random pairwise-feasible families of up to max_family balls; passes iff
/// every family has a witness. The first failure is stored as the witness:
/// points are the centers, params the radii.
CheckReport is_hyperconvex_sampled(const HellyBackend& backend, int trials, int max_family,
                                   std::uint64_t seed);

/// Random pairwise-feasible family: radii drawn in [0, max_radius] (integers
/// when the backend asks for them) and then raised pair by pair until
/// d(x_i, x_j) <= r_i + r_j.
BallFamily random_feasible_family(const HellyBackend& backend, int size, std::mt19937_64& rng);

struct HalvingResult {
  Witness witness;
  int depth = 0;             // ceil(log2(max r / R0)), at least 0
  long base_calls = 0;
  double tolerance = 0.0;    // tau_metric * (depth + 1)
};

/// Intersection point by the recursion P(R) => P(2R): y_ij = sigma(x_i, x_j, 1/2),
/// z_i in the intersection of B(y_ij, r_j / 2), then x in the intersection of
/// B(z_i, r_i / 2). Families with radii at most r0 go to `base`.
HalvingResult halving_witness(const BallFamily& F, const Bicombing& sigma, const WitnessSolver& base,
                              double r0);

struct SphereReport {
  int n = 0;
  Point x, y, z;           // vertex indices as one-element points
  double eps = 1.0, r = 0.0;
  bool local_balls_hyperconvex = false;  // (a)
  int local_radius = 0;
  bool triple_empty_in_cycle = false;    // (b)
  bool box_nonempty = false;             // (c)
  Witness box_witness;                   // p in l-infinity^n
  std::vector<CheckReport> checks;
};

/// Throws GeometryError unless n is a multiple of 3 with n >= 6.
SphereReport sphere_counterexample(int n, int trials = 200, std::uint64_t seed = 1);

/// The cycle C_n as a finite space on its vertices.
DistanceMatrix cycle_metric(int n);

}  // namespace cartan
