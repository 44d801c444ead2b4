// Minimal SVG output for 2-dimensional pictures.
#pragma once

#include <array>
#include <string>
#include <vector>

namespace cartan::svg {

using P2 = std::array<double, 2>;

class Canvas {
 public:
  void polyline(std::vector<P2> pts, std::string color, double width = 1.5);
  void polygon(std::vector<P2> pts, std::string fill, std::string stroke);
  void dot(P2 p, std::string color, double radius = 3.0);
  /// Fits all shapes into a size x size picture with a margin.
  std::string render(int size = 480) const;

 private:
  struct Shape {
    enum Kind { Line, Poly, Dot } kind;
    std::vector<P2> pts;
    std::string a, b;
    double w;
  };
  std::vector<Shape> shapes_;
};

}  // namespace cartan::svg
