#include "widthlab/manifold.hpp"

#include <cmath>
#include <numbers>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"

namespace widthlab {

namespace {

constexpr double kPi = std::numbers::pi;

double wrapped_gap(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

} // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
  case ManifoldKind::Circle: return "circle";
  case ManifoldKind::FlatTorus: return "torus";
  case ManifoldKind::Sphere: return "sphere";
  case ManifoldKind::Mesh: return "mesh";
  }
  return "unknown";
}

Manifold Manifold::circle(double circumference) {
  if (!(circumference > 0.0) || !std::isfinite(circumference))
    fail(ErrorCode::InvalidArgument, "circle circumference must be positive");
  Manifold m;
  m.kind_ = ManifoldKind::Circle;
  m.dimension_ = 1;
  m.sides_ = {circumference};
  m.volume_ = circumference;
  m.diameter_ = circumference / 2.0;
  return m;
}

Manifold Manifold::flat_torus(std::vector<double> sides) {
  if (sides.empty() || sides.size() > 3)
    fail(ErrorCode::Unsupported, "flat torus dimension must be 1, 2 or 3");
  Manifold m;
  m.kind_ = ManifoldKind::FlatTorus;
  m.dimension_ = static_cast<int>(sides.size());
  m.volume_ = 1.0;
  double diam2 = 0.0;
  for (double L : sides) {
    if (!(L > 0.0) || !std::isfinite(L)) fail(ErrorCode::InvalidArgument, "torus sides must be positive");
    m.volume_ *= L;
    diam2 += 0.25 * L * L;
  }
  m.diameter_ = std::sqrt(diam2);
  m.sides_ = std::move(sides);
  return m;
}

Manifold Manifold::sphere() {
  Manifold m;
  m.kind_ = ManifoldKind::Sphere;
  m.dimension_ = 2;
  m.volume_ = 4.0 * kPi;
  m.diameter_ = kPi;
  return m;
}

Manifold Manifold::mesh(std::shared_ptr<const MeshSurrogate> surrogate) {
  if (!surrogate) fail(ErrorCode::InvalidArgument, "null mesh surrogate");
  Manifold m;
  m.kind_ = ManifoldKind::Mesh;
  m.dimension_ = 2;
  m.volume_ = surrogate->volume;
  m.diameter_ = surrogate->diameter;
  m.mesh_ = std::move(surrogate);
  return m;
}

const MeshSurrogate& Manifold::surrogate() const {
  if (!mesh_) fail(ErrorCode::InvalidArgument, "manifold is not a mesh surrogate");
  return *mesh_;
}

std::string Manifold::name() const {
  switch (kind_) {
  case ManifoldKind::Circle: return "circle";
  case ManifoldKind::FlatTorus: return "torus" + std::to_string(dimension_);
  case ManifoldKind::Sphere: return "sphere2";
  case ManifoldKind::Mesh: return "mesh";
  }
  return "unknown";
}

void Manifold::validate(const Point& p) const {
  switch (kind_) {
  case ManifoldKind::Circle:
  case ManifoldKind::FlatTorus:
    for (int d = 0; d < dimension_; ++d)
      if (!std::isfinite(p.x[d])) fail(ErrorCode::InvalidArgument, "non-finite coordinate");
    return;
  case ManifoldKind::Sphere: {
    const double r2 = p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2];
    if (!std::isfinite(r2) || std::abs(r2 - 1.0) > 1e-9)
      fail(ErrorCode::InvalidArgument, "sphere point is not a unit vector");
    return;
  }
  case ManifoldKind::Mesh:
    if (p.vertex < 0 || p.vertex >= static_cast<int>(mesh_->mesh.vertices.size()))
      fail(ErrorCode::InvalidArgument, "mesh point has no valid vertex index");
    return;
  }
}

double Manifold::distance(const Point& a, const Point& b) const {
  switch (kind_) {
  case ManifoldKind::Circle:
    return wrapped_gap(a.x[0], b.x[0], sides_[0]);
  case ManifoldKind::FlatTorus: {
    double acc = 0.0;
    for (int d = 0; d < dimension_; ++d) {
      const double g = wrapped_gap(a.x[d], b.x[d], sides_[d]);
      acc += g * g;
    }
    return std::sqrt(acc);
  }
  case ManifoldKind::Sphere: {
    const double dot = a.x[0] * b.x[0] + a.x[1] * b.x[1] + a.x[2] * b.x[2];
    const double cx = a.x[1] * b.x[2] - a.x[2] * b.x[1];
    const double cy = a.x[2] * b.x[0] - a.x[0] * b.x[2];
    const double cz = a.x[0] * b.x[1] - a.x[1] * b.x[0];
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
  }
  case ManifoldKind::Mesh:
    return mesh_->distances(a.vertex, b.vertex);
  }
  return 0.0;
}

Manifold make_manifold(const std::string& kind, const std::vector<double>& scale, int torus_dimension) {
  if (kind == "circle") {
    if (scale.size() > 1) fail(ErrorCode::InvalidArgument, "circle takes one scale parameter");
    return Manifold::circle(scale.empty() ? 2.0 * kPi : scale[0]);
  }
  if (kind == "torus" || kind == "flat-torus") {
    if (!scale.empty()) return Manifold::flat_torus(scale);
    if (torus_dimension < 1) fail(ErrorCode::InvalidArgument, "torus dimension must be positive");
    return Manifold::flat_torus(std::vector<double>(static_cast<std::size_t>(torus_dimension), 2.0 * kPi));
  }
  if (kind == "sphere" || kind == "sphere2") {
    if (!scale.empty() && !(scale.size() == 1 && scale[0] == 1.0))
      fail(ErrorCode::Unsupported, "sphere radius is fixed to 1");
    return Manifold::sphere();
  }
  fail(ErrorCode::Unsupported, "unsupported manifold kind '" + kind + "'");
}

double geodesic_distance(const Manifold& m, const Point& a, const Point& b) {
  m.validate(a);
  m.validate(b);
  return m.distance(a, b);
}

Point circle_point(double theta) {
  Point p;
  p.x[0] = theta;
  return p;
}

Point torus_point(double x0, double x1, double x2) {
  Point p;
  p.x = {x0, x1, x2};
  return p;
}

Point sphere_point(double colatitude, double longitude) {
  Point p;
  p.x = {std::sin(colatitude) * std::cos(longitude), std::sin(colatitude) * std::sin(longitude),
         std::cos(colatitude)};
  return p;
}

Point mesh_point(const Manifold& m, int vertex) {
  const auto& mesh = m.surrogate().mesh;
  if (vertex < 0 || vertex >= static_cast<int>(mesh.vertices.size()))
    fail(ErrorCode::InvalidArgument, "vertex index out of range");
  Point p;
  p.vertex = vertex;
  p.x = {mesh.vertices[vertex].x(), mesh.vertices[vertex].y(), mesh.vertices[vertex].z()};
  return p;
}

} // namespace widthlab
