#include "svg.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace cartan::svg {

void Canvas::polyline(std::vector<P2> pts, std::string color, double width) {
  shapes_.push_back({Shape::Line, std::move(pts), std::move(color), "", width});
}

void Canvas::polygon(std::vector<P2> pts, std::string fill, std::string stroke) {
  shapes_.push_back({Shape::Poly, std::move(pts), std::move(fill), std::move(stroke), 1.0});
}

void Canvas::dot(P2 p, std::string color, double radius) {
  shapes_.push_back({Shape::Dot, {p}, std::move(color), "", radius});
}

std::string Canvas::render(int size) const {
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (const auto& s : shapes_)
    for (const auto& p : s.pts)
      for (int k = 0; k < 2; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
  if (shapes_.empty()) lo[0] = lo[1] = 0, hi[0] = hi[1] = 1;
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-9});
  const double margin = 20.0, scale = (size - 2 * margin) / span;
  auto X = [&](const P2& p) { return margin + (p[0] - lo[0]) * scale; };
  auto Y = [&](const P2& p) { return size - margin - (p[1] - lo[1]) * scale; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& s : shapes_) {
    if (s.kind == Shape::Dot) {
      os << "<circle cx=\"" << X(s.pts[0]) << "\" cy=\"" << Y(s.pts[0]) << "\" r=\"" << s.w << "\" fill=\""
         << s.a << "\"/>\n";
      continue;
    }
    os << (s.kind == Shape::Line ? "<polyline" : "<polygon") << " points=\"";
    for (const auto& p : s.pts) os << X(p) << "," << Y(p) << " ";
    if (s.kind == Shape::Line)
      os << "\" fill=\"none\" stroke=\"" << s.a << "\" stroke-width=\"" << s.w << "\"/>\n";
    else
      os << "\" fill=\"" << s.a << "\" fill-opacity=\"0.4\" stroke=\"" << s.b << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cartan::svg
