#include "widthlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <sstream>

#include "widthlab/errors.hpp"

namespace widthlab {

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  // Next non-empty line with comments stripped; false at end of input.
  bool next(std::string& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out = line;
      return true;
    }
    return false;
  }
};

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
  fail(ErrorCode::ParseError, "OFF line " + std::to_string(line_no) + ": " + what);
}

double triangle_area(const TriangleMesh& mesh, const std::array<int, 3>& f) {
  const Eigen::Vector3d e1 = mesh.vertices[f[1]] - mesh.vertices[f[0]];
  const Eigen::Vector3d e2 = mesh.vertices[f[2]] - mesh.vertices[f[0]];
  return 0.5 * e1.cross(e2).norm();
}

double mesh_scale(const TriangleMesh& mesh) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return mesh.vertices.empty() ? 0.0 : (hi - lo).norm();
}

} // namespace

TriangleMesh parse_off(const std::string& text) {
  LineReader reader(text);
  std::string line;
  if (!reader.next(line)) parse_fail(reader.line_no, "empty input, expected header 'OFF'");

  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") parse_fail(reader.line_no, "expected header 'OFF', got '" + magic + "'");

  // Counts may follow the header on the same line.
  std::string rest;
  std::getline(header, rest);
  if (rest.find_first_not_of(" \t\r") == std::string::npos) {
    if (!reader.next(rest)) parse_fail(reader.line_no, "missing counts line");
  }
  long nv = -1, nf = -1, ne = 0;
  {
    std::istringstream counts(rest);
    if (!(counts >> nv >> nf)) parse_fail(reader.line_no, "malformed counts line");
    counts >> ne;
    if (nv < 3 || nf < 1) parse_fail(reader.line_no, "vertex/face counts must be positive");
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!reader.next(line)) parse_fail(reader.line_no, "unexpected end of file in vertex list");
    std::istringstream vs(line);
    double x, y, z;
    if (!(vs >> x >> y >> z)) parse_fail(reader.line_no, "malformed vertex line");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
      parse_fail(reader.line_no, "non-finite vertex coordinate");
    mesh.vertices.emplace_back(x, y, z);
  }
  mesh.faces.reserve(static_cast<std::size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    if (!reader.next(line)) parse_fail(reader.line_no, "unexpected end of file in face list");
    std::istringstream fs(line);
    long count = 0;
    if (!(fs >> count)) parse_fail(reader.line_no, "malformed face line");
    if (count != 3)
      parse_fail(reader.line_no, "non-triangle face with " + std::to_string(count) + " vertices");
    std::array<int, 3> f{};
    for (int k = 0; k < 3; ++k) {
      long idx = -1;
      if (!(fs >> idx)) parse_fail(reader.line_no, "malformed face line");
      if (idx < 0 || idx >= nv) parse_fail(reader.line_no, "face references vertex " + std::to_string(idx));
      f[k] = static_cast<int>(idx);
    }
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) parse_fail(reader.line_no, "face repeats a vertex");
    mesh.faces.push_back(f);
  }
  validate_closed_mesh(mesh);
  return mesh;
}

TriangleMesh read_off_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open mesh file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_off(buf.str());
}

std::string write_off(const TriangleMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  return out.str();
}

void validate_closed_mesh(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> edge_faces;
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3];
      ++edge_faces[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& [edge, count] : edge_faces) {
    if (count == 1)
      fail(ErrorCode::ParseError, "open mesh: boundary edge (" + std::to_string(edge.first) + ", " +
                                      std::to_string(edge.second) + ") has one adjacent face");
    if (count > 2)
      fail(ErrorCode::ParseError, "non-manifold edge (" + std::to_string(edge.first) + ", " +
                                      std::to_string(edge.second) + ") has " + std::to_string(count) +
                                      " adjacent faces");
  }
  const double scale = mesh_scale(mesh);
  for (std::size_t i = 0; i < mesh.faces.size(); ++i)
    if (triangle_area(mesh, mesh.faces[i]) < 1e-14 * scale * scale)
      fail(ErrorCode::ParseError, "degenerate triangle " + std::to_string(i));
  std::vector<char> used(mesh.vertices.size(), 0);
  for (const auto& f : mesh.faces)
    for (int v : f) used[v] = 1;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) fail(ErrorCode::ParseError, "isolated vertex " + std::to_string(i));
}

double mesh_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const auto& f : mesh.faces) area += triangle_area(mesh, f);
  return area;
}

double mean_edge_length(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, double> edges;
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}] = (mesh.vertices[a] - mesh.vertices[b]).norm();
    }
  double sum = 0.0;
  for (const auto& e : edges) sum += e.second;
  return edges.empty() ? 0.0 : sum / static_cast<double>(edges.size());
}

MeshOperators cotan_laplacian(const TriangleMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  const double scale = mesh_scale(mesh);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.faces.size() * 12);
  MeshOperators ops;
  ops.mass = Eigen::VectorXd::Zero(n);
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& f = mesh.faces[fi];
    const double area = triangle_area(mesh, f);
    if (area < 1e-14 * scale * scale) fail(ErrorCode::InvalidArgument, "degenerate triangle " + std::to_string(fi));
    for (int k = 0; k < 3; ++k) {
      const int i = f[k], j = f[(k + 1) % 3], o = f[(k + 2) % 3];
      const Eigen::Vector3d u = mesh.vertices[i] - mesh.vertices[o];
      const Eigen::Vector3d v = mesh.vertices[j] - mesh.vertices[o];
      const double cot = u.dot(v) / u.cross(v).norm();
      const double w = 0.5 * cot;
      trips.emplace_back(i, j, -w);
      trips.emplace_back(j, i, -w);
      trips.emplace_back(i, i, w);
      trips.emplace_back(j, j, w);
      ops.mass[f[k]] += area / 3.0;
    }
  }
  ops.stiffness.resize(n, n);
  ops.stiffness.setFromTriplets(trips.begin(), trips.end());
  ops.stiffness.makeCompressed();
  return ops;
}

TriangleMesh icosphere(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 7) fail(ErrorCode::InvalidArgument, "icosphere subdivisions must be in [0,7]");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  const double raw[12][3] = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& r : raw) mesh.vertices.push_back(Eigen::Vector3d(r[0], r[1], r[2]).normalized());
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> faces;
    faces.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      faces.push_back({f[0], a, c});
      faces.push_back({f[1], b, a});
      faces.push_back({f[2], c, b});
      faces.push_back({a, b, c});
    }
    mesh.faces = std::move(faces);
  }
  return mesh;
}

Eigen::MatrixXd all_pairs_geodesics(const TriangleMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  if (n > 8192) fail(ErrorCode::ResourceBudget, "all-pairs geodesics limited to 8192 vertices");
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  std::map<std::pair<int, int>, double> edges;
  for (const auto& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const int a = f[k], b = f[(k + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}] = (mesh.vertices[a] - mesh.vertices[b]).norm();
    }
  for (const auto& [e, len] : edges) {
    adj[e.first].emplace_back(e.second, len);
    adj[e.second].emplace_back(e.first, len);
  }
  Eigen::MatrixXd dist(n, n);
  using Item = std::pair<double, int>;
  for (int src = 0; src < n; ++src) {
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    d[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (const auto& [v, w] : adj[u])
        if (du + w < d[v]) {
          d[v] = du + w;
          heap.emplace(d[v], v);
        }
    }
    for (int v = 0; v < n; ++v) {
      if (!std::isfinite(d[v])) fail(ErrorCode::InvalidArgument, "disconnected mesh: vertex unreachable");
      dist(src, v) = d[v];
    }
  }
  // Symmetrize exactly; Dijkstra sums can differ in the last bit by direction.
  const Eigen::MatrixXd sym = 0.5 * (dist + dist.transpose());
  return sym;
}

std::shared_ptr<const MeshSurrogate> make_mesh_surrogate(TriangleMesh mesh, int k, std::uint64_t seed) {
  validate_closed_mesh(mesh);
  auto out = std::make_shared<MeshSurrogate>();
  const MeshOperators ops = cotan_laplacian(mesh);
  out->spectrum = lanczos_eigs(ops, k, seed);
  out->mass = ops.mass;
  out->distances = all_pairs_geodesics(mesh);
  out->volume = ops.mass.sum();
  out->diameter = out->distances.maxCoeff();
  out->mean_edge = mean_edge_length(mesh);
  out->resolved_lambda = std::pow(std::numbers::pi / out->mean_edge, 2) / 4.0;
  out->mesh = std::move(mesh);
  return out;
}

} // namespace widthlab
