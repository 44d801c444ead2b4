#include "cartan/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cartan {

std::vector<std::vector<double>> DistanceMatrix::rows() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

double DistanceMatrix::diameter() const {
  double m = 0.0;
  for (double v : d_) m = std::max(m, v);
  return m;
}

std::string MetricViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::NotSquare: os << "matrix is not square"; break;
    case Kind::NonzeroDiagonal: os << "nonzero diagonal"; break;
    case Kind::Negative: os << "negative entry"; break;
    case Kind::Asymmetric: os << "asymmetry"; break;
    case Kind::ZeroOffDiagonal: os << "zero off-diagonal entry"; break;
    case Kind::Triangle: os << "triangle violation"; break;
  }
  if (!indices.empty()) {
    os << " at (";
    for (std::size_t i = 0; i < indices.size(); ++i) os << (i ? "," : "") << indices[i];
    os << ")";
  }
  os << " residual " << residual;
  return os.str();
}

MetricValidation validate_metric(const std::vector<std::vector<double>>& d,
                                 std::vector<std::string> labels, double tol) {
  using Kind = MetricViolation::Kind;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i)
    if (d[i].size() != n) return MetricViolation{Kind::NotSquare, {i}, 0.0};
  if (!labels.empty() && labels.size() != n) return MetricViolation{Kind::NotSquare, {}, 0.0};

  for (std::size_t i = 0; i < n; ++i)
    if (d[i][i] != 0.0) return MetricViolation{Kind::NonzeroDiagonal, {i, i}, std::abs(d[i][i])};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(d[i][j] >= 0.0)) return MetricViolation{Kind::Negative, {i, j}, d[i][j]};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[i][j] != d[j][i])
        return MetricViolation{Kind::Asymmetric, {i, j}, std::abs(d[i][j] - d[j][i])};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[i][j] == 0.0) return MetricViolation{Kind::ZeroOffDiagonal, {i, j}, 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        const double excess = d[i][k] - d[i][j] - d[j][k];
        if (excess > tol) return MetricViolation{Kind::Triangle, {i, k, j}, excess};
      }

  DistanceMatrix m;
  m.n_ = n;
  m.d_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.d_[i * n + j] = d[i][j];
  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
  }
  m.labels_ = std::move(labels);
  return m;
}

DistanceMatrix make_metric(const std::vector<std::vector<double>>& d,
                           std::vector<std::string> labels, double tol) {
  auto v = validate_metric(d, std::move(labels), tol);
  if (auto* bad = std::get_if<MetricViolation>(&v)) throw GeometryError(bad->describe());
  return std::get<DistanceMatrix>(std::move(v));
}

double linf_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw GeometryError("linf_distance: dimension mismatch " + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()));
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

std::vector<Point> kuratowski_embed(const DistanceMatrix& X) {
  std::vector<Point> out(X.size(), Point(X.size()));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < X.size(); ++j) out[i][j] = X(i, j);
  return out;
}

LipschitzAudit lipschitz_audit(const DistanceMatrix& B, const std::vector<std::size_t>& anchors,
                               const std::vector<Point>& values) {
  LipschitzAudit worst{-std::numeric_limits<double>::infinity(), 0, 0};
  if (anchors.size() < 2) return LipschitzAudit{};
  for (std::size_t a = 0; a < anchors.size(); ++a)
    for (std::size_t b = a + 1; b < anchors.size(); ++b) {
      const double excess = linf_distance(values[a], values[b]) - B(anchors[a], anchors[b]);
      if (excess > worst.excess) worst = {excess, anchors[a], anchors[b]};
    }
  return worst;
}

std::vector<Point> mcshane_extend(const DistanceMatrix& B, const std::vector<std::size_t>& anchors,
                                  const std::vector<Point>& values, double tol) {
  if (anchors.empty() || anchors.size() != values.size())
    throw GeometryError("mcshane_extend: anchors and values must be nonempty and of equal size");
  const std::size_t dim = values.front().size();
  for (const auto& v : values)
    if (v.size() != dim) throw GeometryError("mcshane_extend: inconsistent value dimensions");
  for (auto a : anchors)
    if (a >= B.size()) throw GeometryError("mcshane_extend: anchor index out of range");

  const auto audit = lipschitz_audit(B, anchors, values);
  if (audit.excess > tol)
    throw GeometryError("mcshane_extend: input is not 1-Lipschitz at pair (" +
                        std::to_string(audit.a) + "," + std::to_string(audit.b) + "), excess " +
                        std::to_string(audit.excess));

  std::vector<Point> out(B.size(), Point(dim, std::numeric_limits<double>::infinity()));
  for (std::size_t b = 0; b < B.size(); ++b)
    for (std::size_t a = 0; a < anchors.size(); ++a) {
      const double dab = B(anchors[a], b);
      for (std::size_t k = 0; k < dim; ++k) out[b][k] = std::min(out[b][k], values[a][k] + dab);
    }
  // Restriction to A is exactly f.
  for (std::size_t a = 0; a < anchors.size(); ++a) out[anchors[a]] = values[a];
  return out;
}

}  // namespace cartan
