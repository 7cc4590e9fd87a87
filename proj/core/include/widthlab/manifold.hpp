#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace widthlab {

struct MeshSurrogate;

enum class ManifoldKind { Circle, FlatTorus, Sphere, Mesh };

std::string to_string(ManifoldKind kind);

// Circle: x[0] is the arc-length coordinate. Torus: x[0..s) are the side
// coordinates. Sphere: x is a unit vector. Mesh: vertex indexes the surrogate
// and x holds its position.
struct Point {
  std::array<double, 3> x{};
  int vertex = -1;
};

class Manifold {
public:
  static Manifold circle(double circumference);
  static Manifold flat_torus(std::vector<double> sides);
  static Manifold sphere();
  static Manifold mesh(std::shared_ptr<const MeshSurrogate> surrogate);

  ManifoldKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  double volume() const { return volume_; }
  double diameter() const { return diameter_; }
  // Circumference (circle) or side lengths (torus); empty otherwise.
  const std::vector<double>& sides() const { return sides_; }
  const MeshSurrogate& surrogate() const;
  const std::shared_ptr<const MeshSurrogate>& surrogate_ptr() const { return mesh_; }
  std::string name() const;

  void validate(const Point& p) const;
  double distance(const Point& a, const Point& b) const;

private:
  Manifold() = default;

  ManifoldKind kind_ = ManifoldKind::Circle;
  int dimension_ = 1;
  double volume_ = 0.0;
  double diameter_ = 0.0;
  std::vector<double> sides_;
  std::shared_ptr<const MeshSurrogate> mesh_;
};

// kind: "circle" | "torus" | "sphere". Empty scale selects the defaults
// (circumference 2*pi, torus sides 2*pi each; torus dimension from scale size
// or torus_dimension when scale is empty).
Manifold make_manifold(const std::string& kind, const std::vector<double>& scale,
                       int torus_dimension = 2);

double geodesic_distance(const Manifold& m, const Point& a, const Point& b);

Point circle_point(double theta);
Point torus_point(double x0, double x1, double x2 = 0.0);
Point sphere_point(double colatitude, double longitude);
Point mesh_point(const Manifold& m, int vertex);

} // namespace widthlab
