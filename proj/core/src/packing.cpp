#include "widthlab/packing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "widthlab/errors.hpp"
#include "widthlab/mesh.hpp"

namespace widthlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Bucket grid over a coordinate chart whose distances never exceed the
// geodesic distance (wrapped coordinates on tori, chords on the sphere), so a
// query of radius R only has to visit neighbouring cells of width >= R.
class CellIndex {
public:
  CellIndex(const Manifold& m, double cell) : m_(m) {
    switch (m.kind()) {
    case ManifoldKind::Circle:
    case ManifoldKind::FlatTorus:
      dims_ = m.dimension();
      for (int d = 0; d < dims_; ++d) {
        const double L = m.sides()[d];
        cells_[d] = std::max(1, static_cast<int>(std::floor(L / cell)));
        width_[d] = L / cells_[d];
        periodic_ = true;
      }
      break;
    case ManifoldKind::Sphere:
      dims_ = 3;
      for (int d = 0; d < 3; ++d) {
        cells_[d] = std::max(1, static_cast<int>(std::floor(2.0 / cell)));
        width_[d] = 2.0 / cells_[d];
      }
      break;
    case ManifoldKind::Mesh:
      dims_ = 0;
      break;
    }
  }

  void insert(const Point& p, std::size_t id) {
    points_.push_back(p);
    buckets_[key(cell_of(p))].push_back(id);
  }

  // Distance to the nearest stored point if it is <= radius, else infinity.
  double nearest_within(const Point& p, double radius) const {
    double best = std::numeric_limits<double>::infinity();
    if (dims_ == 0) {
      for (const Point& q : points_) best = std::min(best, m_.distance(p, q));
      return best <= radius ? best : std::numeric_limits<double>::infinity();
    }
    const auto c = cell_of(p);
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < dims_; ++d) {
      if (periodic_ && cells_[d] <= 3) {
        lo[d] = 0;
        hi[d] = cells_[d] - 1;
      } else {
        lo[d] = c[d] - 1;
        hi[d] = c[d] + 1;
      }
    }
    std::array<int, 3> o{};
    for (o[0] = lo[0]; o[0] <= hi[0]; ++o[0])
      for (o[1] = lo[1]; o[1] <= hi[1]; ++o[1])
        for (o[2] = lo[2]; o[2] <= hi[2]; ++o[2]) {
          std::array<int, 3> cc = o;
          bool skip = false;
          for (int d = 0; d < dims_; ++d) {
            if (periodic_)
              cc[d] = ((cc[d] % cells_[d]) + cells_[d]) % cells_[d];
            else if (cc[d] < 0 || cc[d] >= cells_[d])
              skip = true;
          }
          if (skip) continue;
          auto it = buckets_.find(key(cc));
          if (it == buckets_.end()) continue;
          for (std::size_t id : it->second) best = std::min(best, m_.distance(p, points_[id]));
        }
    return best <= radius ? best : std::numeric_limits<double>::infinity();
  }

private:
  std::array<int, 3> cell_of(const Point& p) const {
    std::array<int, 3> c{0, 0, 0};
    for (int d = 0; d < dims_; ++d) {
      double x = periodic_ ? p.x[d] : p.x[d] + 1.0;
      if (periodic_) x = x - std::floor(x / m_.sides()[d]) * m_.sides()[d];
      c[d] = std::clamp(static_cast<int>(std::floor(x / width_[d])), 0, cells_[d] - 1);
    }
    return c;
  }
  static std::int64_t key(const std::array<int, 3>& c) {
    return (static_cast<std::int64_t>(c[0]) << 42) ^ (static_cast<std::int64_t>(c[1]) << 21) ^ c[2];
  }

  const Manifold& m_;
  int dims_ = 0;
  bool periodic_ = false;
  std::array<int, 3> cells_{1, 1, 1};
  std::array<double, 3> width_{1, 1, 1};
  std::vector<Point> points_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

} // namespace

bool BallPacking::centers_on_nodes() const {
  return !center_nodes.empty() &&
         std::none_of(center_nodes.begin(), center_nodes.end(), [](std::size_t n) { return n == kNoNode; });
}

double packing_radius(const Manifold& m, int N) {
  if (N < 1) fail(ErrorCode::InvalidArgument, "N must be a positive integer");
  return std::pow(static_cast<double>(N), -1.0 / m.dimension());
}

CandidateSet grid_candidates(const Quadrature& q, double rho) {
  const Manifold& m = q.manifold();
  CandidateSet c;
  if (q.layout() == QuadratureLayout::MeshVertices) {
    const auto& sur = m.surrogate();
    const int n = static_cast<int>(sur.mesh.vertices.size());
    for (int v = 0; v < n; ++v) {
      c.points.push_back(mesh_point(m, v));
      c.nodes.push_back(static_cast<std::size_t>(v));
    }
    c.spacing = sur.mean_edge;
    c.description = "mesh vertices";
    return c;
  }
  if (q.layout() != QuadratureLayout::UniformGrid)
    fail(ErrorCode::Unsupported, "grid candidates need a uniform grid or mesh quadrature");
  const int s = m.dimension();
  std::array<std::size_t, 3> stride{1, 1, 1}, count{1, 1, 1};
  for (int d = 0; d < s; ++d) {
    const double h = m.sides()[d] / q.shape()[d];
    if (h > rho / 4.0) fail(ErrorCode::BandInsufficient, "quadrature grid is coarser than rho/4");
    stride[d] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(rho / 4.0 / h)));
    count[d] = (static_cast<std::size_t>(q.shape()[d]) + stride[d] - 1) / stride[d];
    c.spacing = std::max(c.spacing, h * static_cast<double>(stride[d]));
  }
  std::array<std::size_t, 3> i{0, 0, 0};
  for (i[0] = 0; i[0] < count[0]; ++i[0])
    for (i[1] = 0; i[1] < count[1]; ++i[1])
      for (i[2] = 0; i[2] < count[2]; ++i[2]) {
        std::size_t node = 0;
        for (int d = 0; d < s; ++d) node = node * static_cast<std::size_t>(q.shape()[d]) + i[d] * stride[d];
        c.points.push_back(q.node(node));
        c.nodes.push_back(node);
      }
  c.description = "quadrature sub-lattice";
  return c;
}

CandidateSet fibonacci_candidates(std::size_t count) {
  if (count < 2) fail(ErrorCode::InvalidArgument, "Fibonacci candidates need at least two points");
  CandidateSet c;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    Point p;
    p.x = {r * std::cos(phi), r * std::sin(phi), z};
    c.points.push_back(p);
    c.nodes.push_back(kNoNode);
  }
  // Nearest-neighbour gaps of the Fibonacci lattice are about sqrt(4 pi / n) * 1.1.
  c.spacing = 1.1 * std::sqrt(4.0 * kPi / static_cast<double>(count));
  c.description = "Fibonacci sphere";
  return c;
}

CandidateSet default_candidates(const Quadrature& q, double rho) {
  if (q.layout() == QuadratureLayout::SphereGaussLegendre) {
    const double h = rho / 4.0 / 1.1;
    return fibonacci_candidates(static_cast<std::size_t>(std::ceil(4.0 * kPi / (h * h))));
  }
  return grid_candidates(q, rho);
}

BallPacking greedy_packing(const Manifold& m, int N, const CandidateSet& candidates) {
  BallPacking pk;
  pk.N = N;
  pk.rho = packing_radius(m, N);
  if (!(2.0 * pk.rho < m.diameter())) fail(ErrorCode::InvalidArgument, "packing needs 2 N^{-1/s} < diameter");
  if (candidates.points.empty()) fail(ErrorCode::InvalidArgument, "empty candidate set");
  if (candidates.spacing > pk.rho / 4.0 * (1.0 + 1e-12))
    fail(ErrorCode::BandInsufficient, "candidate spacing exceeds rho/4");
  pk.candidate_count = candidates.points.size();
  pk.candidate_spacing = candidates.spacing;
  pk.candidate_description = candidates.description;

  CellIndex index(m, 3.0 * pk.rho);
  for (std::size_t i = 0; i < candidates.points.size(); ++i) {
    const Point& p = candidates.points[i];
    if (std::isfinite(index.nearest_within(p, 2.0 * pk.rho))) continue;
    index.insert(p, pk.centers.size());
    pk.centers.push_back(p);
    pk.center_nodes.push_back(i < candidates.nodes.size() ? candidates.nodes[i] : kNoNode);
  }

  // Post hoc verification of both packing invariants.
  pk.min_center_distance = std::numeric_limits<double>::infinity();
  {
    CellIndex probe(m, 3.0 * pk.rho);
    for (std::size_t i = 0; i < pk.centers.size(); ++i) {
      pk.min_center_distance = std::min(pk.min_center_distance, probe.nearest_within(pk.centers[i], 3.0 * pk.rho));
      probe.insert(pk.centers[i], i);
    }
  }
  if (pk.min_center_distance <= 2.0 * pk.rho)
    fail(ErrorCode::Falsified, "greedy packing produced centers closer than 2 rho");
  pk.covering_radius = 0.0;
  for (const Point& p : candidates.points) {
    const double d = index.nearest_within(p, 3.0 * pk.rho);
    if (!std::isfinite(d)) fail(ErrorCode::BandInsufficient, "covering check failed: candidate grid too coarse");
    pk.covering_radius = std::max(pk.covering_radius, d);
  }
  return pk;
}

} // namespace widthlab
