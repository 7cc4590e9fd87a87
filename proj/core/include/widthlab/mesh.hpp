#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace widthlab {

struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
};

struct MeshOperators {
  Eigen::SparseMatrix<double> stiffness; // cotan weights, symmetric PSD
  Eigen::VectorXd mass;                  // lumped: one third of adjacent areas
};

struct DiscreteSpectrum {
  Eigen::VectorXd eigenvalues;  // nondecreasing
  Eigen::MatrixXd eigenvectors; // columns mass-orthonormal
  Eigen::VectorXd residuals;    // ||L v - lambda M v|| / ||v|| per pair
  int iterations = 0;
};

// Everything the kernel and discretization code needs from a mesh.
struct MeshSurrogate {
  TriangleMesh mesh;
  Eigen::VectorXd mass;
  Eigen::MatrixXd distances; // all-pairs edge-graph geodesics
  DiscreteSpectrum spectrum;
  double volume = 0.0;
  double diameter = 0.0;
  double mean_edge = 0.0;
  double resolved_lambda = 0.0; // (pi / mean edge)^2 / 4
};

TriangleMesh parse_off(const std::string& text);
TriangleMesh read_off_file(const std::string& path);
std::string write_off(const TriangleMesh& mesh);

// Throws ParseError diagnostics for non-closed or non-manifold meshes and
// degenerate triangles.
void validate_closed_mesh(const TriangleMesh& mesh);

double mesh_area(const TriangleMesh& mesh);
double mean_edge_length(const TriangleMesh& mesh);

MeshOperators cotan_laplacian(const TriangleMesh& mesh);

struct LanczosOptions {
  int max_subspace = 0;   // 0: automatic
  double tolerance = 1e-10;
  int max_restarts = 3;
};

DiscreteSpectrum lanczos_eigs(const MeshOperators& ops, int k, std::uint64_t seed,
                              const LanczosOptions& options = {});

// Icosahedron refined by midpoint subdivision and projected to the unit sphere.
TriangleMesh icosphere(int subdivisions);

Eigen::MatrixXd all_pairs_geodesics(const TriangleMesh& mesh);

std::shared_ptr<const MeshSurrogate> make_mesh_surrogate(TriangleMesh mesh, int k, std::uint64_t seed);

} // namespace widthlab
