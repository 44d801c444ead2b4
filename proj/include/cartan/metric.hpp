// Finite metric spaces, l-infinity vectors and Lipschitz extension.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cartan {

/// A point of a model space. Interpretation depends on the space:
/// l-infinity coordinates, an index into a finite space, (edge, offset) on a
/// metric graph or (angle, height) on a flat cylinder.
using Point = std::vector<double>;

inline constexpr double kTauMetric = 1e-9;
inline constexpr double kTauSample = 1e-6;
inline constexpr double kTauGeo = 1e-7;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DistanceMatrix;
struct MetricViolation;
using MetricValidation = std::variant<DistanceMatrix, MetricViolation>;

class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::vector<std::vector<double>> rows() const;
  double diameter() const;

 private:
  friend MetricValidation validate_metric(const std::vector<std::vector<double>>&,
                                          std::vector<std::string>, double);
  std::size_t n_ = 0;
  std::vector<double> d_;
  std::vector<std::string> labels_;
};

struct MetricViolation {
  enum class Kind { NotSquare, NonzeroDiagonal, Negative, Asymmetric, ZeroOffDiagonal, Triangle };
  Kind kind;
  // Witnessing indices. For Triangle, d(i,k) > d(i,j) + d(j,k) is reported as (i, k, j).
  std::vector<std::size_t> indices;
  double residual = 0.0;

  std::string describe() const;
};

/// Checks the metric axioms in a fixed order and returns either the matrix or
/// the first violation found.
MetricValidation validate_metric(const std::vector<std::vector<double>>& d,
                                 std::vector<std::string> labels = {},
                                 double tol = kTauMetric);

/// Throwing convenience wrapper around validate_metric.
DistanceMatrix make_metric(const std::vector<std::vector<double>>& d,
                           std::vector<std::string> labels = {}, double tol = kTauMetric);

double linf_distance(std::span<const double> u, std::span<const double> v);

/// x_i -> (d(x_i, x_j))_j. Exact isometry into l-infinity of the point set.
std::vector<Point> kuratowski_embed(const DistanceMatrix& X);

/// Coordinatewise McShane extension: for b in B,
///   f_k(b) = min_{a in A} (f_k(a) + d(a, b)).
/// `anchors` are indices into B; `values` holds f on those anchors.
/// Throws GeometryError naming the offending pair if f is not 1-Lipschitz.
std::vector<Point> mcshane_extend(const DistanceMatrix& B, const std::vector<std::size_t>& anchors,
                                  const std::vector<Point>& values, double tol = kTauMetric);

/// Worst value of ||f(a) - f(b)||_inf - d(a,b) over anchor pairs, with the pair.
struct LipschitzAudit {
  double excess = 0.0;
  std::size_t a = 0, b = 0;
};
LipschitzAudit lipschitz_audit(const DistanceMatrix& B, const std::vector<std::size_t>& anchors,
                               const std::vector<Point>& values);

}  // namespace cartan
