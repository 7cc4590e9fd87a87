#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "widthlab/manifold.hpp"
#include "widthlab/quadrature.hpp"

namespace widthlab {

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

// Finite point set from which packing centers are drawn, in greedy order.
struct CandidateSet {
  std::vector<Point> points;
  std::vector<std::size_t> nodes; // quadrature node index per point, or kNoNode
  double spacing = 0.0;           // largest gap between neighbouring candidates
  std::string description;
};

// Circle/torus: sub-lattice of the quadrature grid with spacing <= rho/4, in
// lexicographic index order. Sphere: Fibonacci points. Mesh: all vertices.
CandidateSet default_candidates(const Quadrature& q, double rho);
CandidateSet grid_candidates(const Quadrature& q, double rho);
CandidateSet fibonacci_candidates(std::size_t count);

struct BallPacking {
  int N = 0;
  double rho = 0.0; // N^{-1/s}
  std::vector<Point> centers;
  std::vector<std::size_t> center_nodes; // kNoNode when a center is not a quadrature node
  std::size_t candidate_count = 0;
  double candidate_spacing = 0.0;
  std::string candidate_description;
  double min_center_distance = 0.0; // > 2 rho
  double covering_radius = 0.0;     // max over candidates of the distance to the nearest center, <= 3 rho

  std::size_t size() const { return centers.size(); }
  bool centers_on_nodes() const;
};

double packing_radius(const Manifold& m, int N);

BallPacking greedy_packing(const Manifold& m, int N, const CandidateSet& candidates);

} // namespace widthlab
