#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "maxcon/errors.hpp"

namespace maxcon {

// Undirected, unweighted, connected graph. Adjacency and degrees are stored
// as integers; the Laplacian L = D - A is therefore exact.
class Graph {
 public:
  // Validates and builds: node ids in [0, node_count), no self loops, no
  // duplicate edges (either orientation), graph connected.
  static Graph from_edges(int node_count, std::vector<std::pair<int, int>> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  // Edges normalized to i < j and sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Neighbor ids of node i, ascending.
  const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
  int degree(int i) const { return static_cast<int>(adjacency_[i].size()); }
  // Sum of all degrees, i.e. the number of directed links (2 * edge_count).
  int directed_link_count() const { return directed_link_count_; }

  Eigen::MatrixXi adjacency_matrix() const;
  Eigen::MatrixXi degree_matrix() const;
  Eigen::MatrixXi laplacian() const;

 private:
  Graph() = default;

  int node_count_ = 0;
  int directed_link_count_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

// Eigenstructure of the Laplacian of a connected graph.
//
// eigenvalues: ascending, eigenvalues[0] snapped to exactly 0
// u:           orthonormal eigenvector basis, column k for eigenvalues[k];
//              column 0 is exactly (1/sqrt(N)) * ones
// phi():       columns 2..N of u (eigenvectors for the nonzero eigenvalues)
// b_diagonal(): diag entries of B = diag(-lambda_2, ..., -lambda_N)
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd u;

  Eigen::MatrixXd phi() const { return u.rightCols(u.cols() - 1); }
  Eigen::VectorXd b_diagonal() const {
    return -eigenvalues.tail(eigenvalues.size() - 1);
  }
};

// Dense symmetric eigendecomposition of L. Residual tolerance 1e-10 per
// entry check; lambda_1 within that tolerance of 0 is snapped to 0.
Spectrum spectral_decompose(const Graph& graph);

// lambda_2, strictly positive for a connected graph.
double algebraic_connectivity(const Spectrum& spectrum);

// Nodes placed uniformly at random in the unit square; nodes at Euclidean
// distance <= radius are linked. Placement is redrawn (deterministically,
// derived from seed) up to max_attempts times until the graph is connected;
// throws CouldNotConnect if no attempt succeeds.
Graph random_geometric_graph(int node_count, double radius, std::uint64_t seed,
                             int max_attempts = 100);

// Edge-list text format: first line is the node count, every following line
// one "i j" pair, 0-indexed.
Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);
void write_edge_list(const Graph& graph, std::ostream& out);
void save_edge_list(const Graph& graph, const std::string& path);

}  // namespace maxcon
